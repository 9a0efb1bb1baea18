use std::path::Path;

use gossipfpp_core::analysis::{self, run_validation, scaling_experiment, ScalingTable, ValidationSetup};
use gossipfpp_core::chains::{truth_probability, TRUE};
use gossipfpp_core::percolation::{
    hopcount_estimate, passage_time_estimate, replicate, ring_absorbing_expectation, NodeSelection, SourceTree,
};
use gossipfpp_core::seed::SeedStream;
use gossipfpp_core::simulate::{self, AcceptanceRule, SimulationConfig};
use gossipfpp_core::stats::mean_and_std_error;
use gossipfpp_core::topology::{build_auxiliary, Family, GossipNetwork};
use gossipfpp_core::Error;
use rayon::prelude::*;

use crate::error::{invalid, CliError};
use crate::output::*;
use crate::spec::Resolved;

/// Walks sampled for the single-chain check in `verify`.
const WALKS: usize = 100_000;
const WALK_STEPS: u32 = 10;

const TV_LIMIT: f64 = 0.02;
const AGE_LIMIT: f64 = 0.05;

const WALK_SALT: u64 = 3;

fn network_info(net: &GossipNetwork) -> NetworkInfo {
    NetworkInfo { family: net.family(), n: net.n(), lambda: net.lambda(), lambda_e: net.lambda_e() }
}

pub fn simulate(r: &Resolved) -> Result<(), CliError> {
    let net = r.network()?;
    let mut base = SimulationConfig::new(net.clone(), r.chain.clone());
    base.horizon = r.horizon;
    base.burn_in = r.burn_in.unwrap_or(0.0);
    base.snapshot_interval = r.snapshot_interval;
    base.master_seed = r.seed;
    base.validate().map_err(|e| invalid("horizon", e.to_string()))?;

    let outputs = (0..r.reps)
        .into_par_iter()
        .map(|rep| {
            let mut cfg = base.clone();
            cfg.replication_index = rep as u64;
            simulate::run(&cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;

    ensure_dir(&r.out)?;
    for (rep, out) in outputs.iter().enumerate() {
        write_snapshots(&rep_file(&r.out, "snapshots", rep), out)?;
        write_final_states(&rep_file(&r.out, "final_states", rep), out)?;
    }
    let truth_fraction = if r.chain.k() == 2 && outputs.iter().all(|o| o.snapshots.len() >= 2) {
        Some(analysis::estimate_truth_fraction(&base, &outputs)?)
    } else {
        None
    };
    let summary = SimulateSummary {
        schema_version: SCHEMA_VERSION,
        network: network_info(&net),
        chain: r.chain_spec.clone(),
        seed: r.seed,
        reps: r.reps,
        horizon: r.horizon,
        snapshot_interval: r.snapshot_interval,
        replications: outputs.iter().enumerate().map(|(i, o)| ReplicationSummary::new(i, o)).collect(),
        truth_fraction,
    };
    write_json(&r.out.join("summary.json"), &summary)?;
    println!("simulate: {} replication(s) of {} n={} written to {}", r.reps, net.family(), net.n(), r.out.display());
    Ok(())
}

fn node_means(trees: &[SourceTree], n: usize) -> Vec<NodeMeans> {
    (1..=n)
        .map(|i| {
            let t: Vec<f64> = trees.iter().map(|tr| tr.passage_time(i)).collect();
            let h: Vec<f64> = trees.iter().map(|tr| tr.hopcount(i) as f64).collect();
            let (mt, st) = mean_and_std_error(&t);
            let (mh, sh) = mean_and_std_error(&h);
            NodeMeans {
                node: i,
                mean_passage_time: mt,
                mean_hopcount: mh,
                std_errors: StdErrors { passage_time: st, hopcount: sh },
            }
        })
        .collect()
}

pub fn percolate(r: &Resolved) -> Result<(), CliError> {
    let net = r.network()?;
    let aux = build_auxiliary(&net);
    let trees = replicate(&aux, r.reps, &SeedStream::new(r.seed));

    ensure_dir(&r.out)?;
    let path = r.out.join("replications.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| write_err(&path, e))?;
    for (rep_id, tree) in trees.iter().enumerate() {
        for node in 1..=net.n() {
            let row =
                ReplicationRow { rep_id, node, passage_time: tree.passage_time(node), hopcount: tree.hopcount(node) };
            w.serialize(row).map_err(|e| write_err(&path, e))?;
        }
    }
    w.flush().map_err(|e| write_err(&path, e))?;

    let t = passage_time_estimate(&trees, NodeSelection::Pooled);
    let h = hopcount_estimate(&trees, NodeSelection::Pooled);
    let transitive = net.is_vertex_transitive();
    let summary = PercolateSummary {
        schema_version: SCHEMA_VERSION,
        family: net.family(),
        n: net.n(),
        lambda: net.lambda(),
        lambda_e: net.lambda_e(),
        reps: r.reps,
        seed: r.seed,
        selection: if transitive { "pooled" } else { "node_average" }.into(),
        mean_passage_time: t.mean,
        mean_hopcount: h.mean,
        std_errors: StdErrors { passage_time: t.std_error, hopcount: h.std_error },
        per_node: if transitive { Vec::new() } else { node_means(&trees, net.n()) },
    };
    write_json(&r.out.join("summary.json"), &summary)?;
    println!("percolate: {} n={} reps={} mean_T={} mean_H={}", net.family(), net.n(), r.reps, t.mean, h.mean);
    Ok(())
}

fn check(name: &str, value: f64, threshold: f64, passed: bool, detail: String) -> Check {
    println!("{} {name}: {value} (threshold {threshold}) {detail}", if passed { "PASS" } else { "FAIL" });
    Check { name: name.into(), value, threshold, passed, detail }
}

fn info(name: &str, value: f64, detail: String) -> Info {
    println!("INFO {name}: {value} {detail}");
    Info { name: name.into(), value, detail }
}

/// Fraction of `walks` sampled chain walks of `steps` steps that end truthful.
fn sampled_truth_fraction(r: &Resolved, walks: usize, steps: u32) -> f64 {
    let mut rng = SeedStream::new(r.seed).derive(WALK_SALT).rng(0);
    let mut hits = 0usize;
    for _ in 0..walks {
        let mut s = r.chain.initial_state();
        for _ in 0..steps {
            s = r.chain.sample_step(s, &mut rng);
        }
        hits += usize::from(s == TRUE);
    }
    hits as f64 / walks as f64
}

pub fn verify(r: &Resolved, invert: bool) -> Result<(), CliError> {
    let p = r.truth_p()?;
    let net = r.network()?;
    let setup = ValidationSetup {
        network: net.clone(),
        chain: r.chain.clone(),
        horizon: r.horizon,
        snapshot_interval: r.snapshot_interval,
        sim_reps: r.sim_reps,
        percolation_reps: r.reps,
        seeds: SeedStream::new(r.seed),
        acceptance: if invert { AcceptanceRule::Inverted } else { AcceptanceRule::SenderFresher },
    };
    let run = run_validation(&setup).map_err(|e| match e {
        Error::InvalidConfig(m) => invalid("horizon", m),
        Error::InsufficientBurnIn(_) => invalid("horizon", "some node was never reached before the horizon"),
        other => other.into(),
    })?;

    let mut checks = Vec::new();
    let mut infos = Vec::new();

    let expected = truth_probability(p, WALK_STEPS);
    let observed = sampled_truth_fraction(r, WALKS, WALK_STEPS);
    let sigma = (expected * (1.0 - expected) / WALKS as f64).sqrt();
    let dev = (observed - expected).abs();
    checks.push(check(
        "chain_walk_truth",
        dev,
        3.0 * sigma,
        dev <= 3.0 * sigma + 1e-12,
        format!("|{observed} - p^{WALK_STEPS}| over {WALKS} walks"),
    ));

    let (predicted, simulated) = match run.quality_law() {
        Ok(cmp) => {
            checks.push(check(
                "quality_law_tv",
                cmp.total_variation,
                TV_LIMIT,
                cmp.total_variation <= TV_LIMIT,
                format!("simulated {:?} vs predicted {:?}", cmp.simulated, cmp.predicted),
            ));
            (cmp.predicted, cmp.simulated)
        }
        Err(e) => {
            checks.push(check("quality_law_tv", f64::NAN, TV_LIMIT, false, e.to_string()));
            (run.prediction.pooled.probs().to_vec(), Vec::new())
        }
    };
    match run.mean_age() {
        Ok(cmp) => checks.push(check(
            "mean_age_relative_error",
            cmp.relative_error,
            AGE_LIMIT,
            cmp.relative_error <= AGE_LIMIT,
            format!(
                "simulated age {} vs mean passage time {}",
                cmp.simulated_mean_age, cmp.predicted_mean_passage_time
            ),
        )),
        Err(e) => checks.push(check("mean_age_relative_error", f64::NAN, AGE_LIMIT, false, e.to_string())),
    }
    if net.family() == Family::Ring {
        let bound = ring_absorbing_expectation(net.n()) + 3.0 * run.hopcount.std_error;
        checks.push(check(
            "ring_hopcount_coupling_bound",
            run.hopcount.mean,
            bound,
            run.hopcount.mean <= bound,
            "mean hopcount vs absorbing-chain transitions + 3 se".into(),
        ));
        infos.push(info(
            "ring_sqrt_bound",
            (net.n() as f64 * std::f64::consts::PI).sqrt() / 4.0,
            format!("mean hopcount {}", run.hopcount.mean),
        ));
    }

    infos.push(info("mean_passage_time", run.passage.mean, format!("std_error {}", run.passage.std_error)));
    infos.push(info("mean_hopcount", run.hopcount.mean, format!("std_error {}", run.hopcount.std_error)));
    if let Ok(est) = analysis::estimate_truth_fraction(&run.configs[0], &run.outputs) {
        infos.push(info(
            "simulated_truth_fraction",
            est.estimate,
            format!("std_error {} predicted {}", est.std_error, run.prediction.pooled.get(TRUE)),
        ));
    }

    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        network: network_info(&net),
        chain: r.chain_spec.clone(),
        seed: r.seed,
        percolation_reps: r.reps,
        sim_reps: r.sim_reps,
        horizon: r.horizon,
        inverted_acceptance: invert,
        burn_ins: run.burn_ins.clone(),
        predicted,
        simulated,
        checks,
        info: infos,
        passed,
    };
    ensure_dir(&r.out)?;
    write_json(&r.out.join("verify_report.json"), &report)?;
    if passed {
        println!("verify: all checks passed");
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(CliError::VerificationFailed(failed.join(", ")))
    }
}

fn write_scan_csv(path: &Path, table: &ScalingTable) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| write_err(path, e))?;
    for row in &table.rows {
        w.serialize(ScanRow {
            family: table.family,
            n: row.n,
            truth_fraction: row.truth_fraction,
            truth_fraction_std_error: row.truth_fraction_std_error,
            log_p_truth_fraction: row.log_p_truth_fraction,
            mean_hopcount: row.mean_hopcount,
            hopcount_std_error: row.hopcount_std_error,
            mean_passage_time: row.mean_passage_time,
            passage_time_std_error: row.passage_time_std_error,
        })
        .map_err(|e| write_err(path, e))?;
    }
    w.flush().map_err(|e| write_err(path, e))
}

pub fn scan(r: &Resolved) -> Result<(), CliError> {
    let families = r.scan_families()?;
    let n_list = r.n_list()?;
    let p = r.truth_p()?;
    let seeds = SeedStream::new(r.seed);
    ensure_dir(&r.out)?;

    let mut tables = Vec::new();
    for family in families {
        let table = scaling_experiment(family, &n_list, p, r.lambda, r.reps, &seeds).map_err(|e| match e {
            Error::InvalidSize(m) => invalid("n_list", m),
            other => other.into(),
        })?;
        let stem = format!("scan_{}", family.as_str());
        write_json(
            &r.out.join(format!("{stem}.json")),
            &ScanReport { schema_version: SCHEMA_VERSION, seed: r.seed, table: table.clone() },
        )?;
        write_scan_csv(&r.out.join(format!("{stem}.csv")), &table)?;
        println!("scan: {family} slope={} r_squared={} over n={:?}", table.fit.slope, table.fit.r_squared, n_list);
        tables.push(table);
    }

    let complete = tables.iter().find(|t| t.family == Family::Complete);
    let ring = tables.iter().find(|t| t.family == Family::Ring);
    if let (Some(c), Some(g)) = (complete, ring) {
        let path = r.out.join("scan_separation.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| write_err(&path, e))?;
        for (a, b) in c.rows.iter().zip(&g.rows) {
            let se = (a.truth_fraction_std_error.powi(2) + b.truth_fraction_std_error.powi(2)).sqrt();
            w.serialize(SeparationRow {
                n: a.n,
                p,
                complete: a.truth_fraction,
                ring: b.truth_fraction,
                sigmas: (a.truth_fraction - b.truth_fraction) / se,
            })
            .map_err(|e| write_err(&path, e))?;
        }
        w.flush().map_err(|e| write_err(&path, e))?;
    }
    Ok(())
}
