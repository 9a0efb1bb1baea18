//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use gossipfpp_core::analysis::{
    percolation_truth_fraction, run_validation, scaling_experiment, separation_sigmas, ValidationSetup,
};
use gossipfpp_core::chains::{truth_chain, truth_probability, TRUE};
use gossipfpp_core::percolation::{
    gaussian_integral_check, hopcount_estimate, replicate, ring_absorbing_expectation, sample_weights, solve_to_source,
    HopcountEstimate, NodeSelection,
};
use gossipfpp_core::seed::{replication_rng, SeedStream};
use gossipfpp_core::simulate::AcceptanceRule;
use gossipfpp_core::topology::{
    build_auxiliary, build_complete, build_ring, AuxiliaryGraph, Family, GossipNetwork, SOURCE,
};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn c1_chain_walks() -> Outcome {
    const WALKS: usize = 100_000;
    let start = Instant::now();
    let chain = truth_chain(0.9).unwrap();
    let mut rng = replication_rng(1, 0);
    let mut hits = 0usize;
    for _ in 0..WALKS {
        let mut s = chain.initial_state();
        for _ in 0..10 {
            s = chain.sample_step(s, &mut rng);
        }
        hits += usize::from(s == TRUE);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let target = 0.348_678_44;
    let exact = truth_probability(0.9, 10);
    let observed = hits as f64 / WALKS as f64;
    let sigma = (target * (1.0 - target) / WALKS as f64).sqrt();
    let passed = (observed - target).abs() <= 3.0 * sigma && (exact - target).abs() < 1e-8 && elapsed < 1.0;
    outcome(
        passed,
        format!("empirical {observed:.5} vs {target} (3 sigma {:.5}), 0.9^10 = {exact:.8}, {elapsed:.3}s", 3.0 * sigma),
    )
}

fn c2_complete_hopcount() -> Outcome {
    let aux = build_auxiliary(&build_complete(1024, 1.0, 1.0).unwrap());
    let h = hopcount_estimate(&replicate(&aux, 200, &SeedStream::new(2)), NodeSelection::Pooled);
    let target = 1024f64.ln() + EULER_GAMMA - 1.0;
    let rel = (h.mean - target).abs() / target;
    outcome(
        rel <= 0.10,
        format!(
            "mean H {:.4} (se {:.4}) vs ln(1024)+gamma-1 = {target:.4}, relative error {rel:.4} <= 0.10",
            h.mean, h.std_error
        ),
    )
}

fn ring_hopcounts() -> Vec<(usize, HopcountEstimate)> {
    [100usize, 400, 1600]
        .iter()
        .map(|&n| {
            let aux = build_auxiliary(&build_ring(n, 1.0, 1.0).unwrap());
            (n, hopcount_estimate(&replicate(&aux, 1000, &SeedStream::new(3).derive(n as u64)), NodeSelection::Pooled))
        })
        .collect()
}

fn c3_ring_bound(rings: &[(usize, HopcountEstimate)]) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (n, h) in rings {
        let nf = *n as f64;
        let bound = (nf * std::f64::consts::PI).sqrt() / 4.0;
        let ratio = h.mean / nf.sqrt();
        let ok = h.mean <= bound + 3.0 * h.std_error && (0.2..=0.45).contains(&ratio);
        passed &= ok;
        parts.push(format!("n={n}: H {:.3} (se {:.3}) bound {bound:.3}, H/sqrt(n) {ratio:.3}", h.mean, h.std_error));
    }
    outcome(passed, parts.join("; "))
}

fn c4_absorbing(rings: &[(usize, HopcountEstimate)]) -> Outcome {
    let e2 = ring_absorbing_expectation(2);
    let exact = e2 == 5.0 / 3.0;
    let h = &rings.iter().find(|(n, _)| *n == 400).unwrap().1;
    let e400 = ring_absorbing_expectation(400);
    let bounded = h.mean <= e400 + 3.0 * h.std_error;
    outcome(exact && bounded, format!("E(2) = {e2:.16} vs 5/3; n=400 mean H {:.3} <= {e400:.3} + 3 se", h.mean))
}

fn validation(
    net: GossipNetwork,
    horizon: f64,
    sim_reps: usize,
    perc_reps: usize,
    seed: u64,
    rule: AcceptanceRule,
) -> ValidationSetup {
    ValidationSetup {
        network: net,
        chain: truth_chain(0.8).unwrap(),
        horizon,
        snapshot_interval: 1.0,
        sim_reps,
        percolation_reps: perc_reps,
        seeds: SeedStream::new(seed),
        acceptance: rule,
    }
}

fn c5_quality_law() -> Outcome {
    let ring = build_ring(16, 1.0, 1.0).unwrap();
    let tv = |rule| -> Result<f64, String> {
        let run = run_validation(&validation(ring.clone(), 5000.0, 8, 10_000, 5, rule)).map_err(|e| e.to_string())?;
        run.quality_law().map(|c| c.total_variation).map_err(|e| e.to_string())
    };
    match (tv(AcceptanceRule::SenderFresher), tv(AcceptanceRule::Inverted)) {
        (Ok(good), Ok(bad)) => outcome(
            good <= 0.02 && bad > 0.05,
            format!("TV {good:.4} <= 0.02; inverted-acceptance control TV {bad:.4} > 0.05"),
        ),
        (a, b) => outcome(false, format!("error: {a:?} / {b:?}")),
    }
}

fn c6_age() -> Outcome {
    let cases = [
        ("ring n=32", build_ring(32, 1.0, 1.0).unwrap(), 4000.0),
        ("complete n=256", build_complete(256, 1.0, 1.0).unwrap(), 1000.0),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, net, horizon) in cases {
        let res = run_validation(&validation(net, horizon, 4, 4000, 6, AcceptanceRule::SenderFresher))
            .and_then(|r| r.mean_age());
        match res {
            Ok(c) => {
                passed &= c.relative_error <= 0.05;
                parts.push(format!(
                    "{name}: age {:.4} vs T {:.4}, relative error {:.4}",
                    c.simulated_mean_age, c.predicted_mean_passage_time, c.relative_error
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    outcome(passed, parts.join("; "))
}

fn c7_scaling() -> Outcome {
    let seeds = SeedStream::new(7);
    let pk = percolation_truth_fraction(&build_complete(256, 1.0, 0.0).unwrap(), 0.97, 400, &seeds).unwrap();
    let pc = percolation_truth_fraction(&build_ring(256, 1.0, 0.0).unwrap(), 0.97, 400, &seeds).unwrap();
    let sep = separation_sigmas(&pk, &pc);
    let mut passed = pk.estimate > pc.estimate && sep >= 3.0;
    let mut parts = vec![format!("n=256: P(K) {:.4} vs P(C) {:.4}, {sep:.1} sigma", pk.estimate, pc.estimate)];
    for family in [Family::Complete, Family::Ring] {
        let table = scaling_experiment(family, &[64, 256, 1024], 0.97, 1.0, 200, &seeds).unwrap();
        passed &= table.fit.r_squared >= 0.95;
        parts.push(format!("{family} R^2 {:.5}", table.fit.r_squared));
    }
    outcome(passed, parts.join("; "))
}

/// Minimum `(T, H)` over all simple paths to the source, accumulated from the source end.
fn brute_force(aux: &AuxiliaryGraph, w: &[f64]) -> Vec<(f64, u32)> {
    fn dfs(
        aux: &AuxiliaryGraph,
        w: &[f64],
        v: usize,
        cost: f64,
        hops: u32,
        seen: &mut [bool],
        best: &mut [(f64, u32)],
    ) {
        for &id in aux.incoming(v) {
            let u = aux.arc(id).tail;
            if seen[u] {
                continue;
            }
            let c = w[id] + cost;
            if (c, hops + 1) < best[u] {
                best[u] = (c, hops + 1);
            }
            seen[u] = true;
            dfs(aux, w, u, c, hops + 1, seen, best);
            seen[u] = false;
        }
    }
    let m = aux.node_count();
    let mut best = vec![(f64::INFINITY, u32::MAX); m];
    best[SOURCE] = (0.0, 0);
    let mut seen = vec![false; m];
    seen[SOURCE] = true;
    dfs(aux, w, SOURCE, 0.0, 0, &mut seen, &mut best);
    best
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut reach = vec![false; n + 1];
    let mut stack = vec![1];
    reach[1] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let u = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !reach[u] {
                reach[u] = true;
                stack.push(u);
            }
        }
    }
    reach[1..].iter().all(|&r| r)
}

fn c8_exhaustive() -> Outcome {
    let mut graphs = 0usize;
    let mut cases = 0usize;
    let mut mismatches = 0usize;
    for n in 1..=6usize {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            if !connected(n, &edges) {
                continue;
            }
            let aux = build_auxiliary(&GossipNetwork::from_edges(n, 1.0, 1.0, edges).unwrap());
            let mut rng = replication_rng(8, graphs as u64);
            graphs += 1;
            for _ in 0..50 {
                let sample = sample_weights(&aux, &mut rng);
                let tree = solve_to_source(&aux, sample.weights());
                let best = brute_force(&aux, sample.weights());
                cases += 1;
                if (1..=n).any(|i| (tree.passage_time(i), tree.hopcount(i)) != best[i]) {
                    mismatches += 1;
                }
            }
        }
    }
    outcome(mismatches == 0, format!("{graphs} connected labeled graphs, {cases} draws, {mismatches} mismatches"))
}

fn c9_integral() -> Outcome {
    let v = gaussian_integral_check();
    let closed = std::f64::consts::PI.sqrt() / 4.0;
    outcome((v - 0.443_113_46).abs() <= 1e-8, format!("integral {v:.10} vs 0.44311346 (sqrt(pi)/4 = {closed:.10})"))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn c10_determinism() -> Outcome {
    let tmp = std::env::temp_dir().join(format!("gossipfpp-acceptance-{}", std::process::id()));
    let commands: [&[&str]; 4] = [
        &["simulate", "--n", "16", "--p", "0.8", "--reps", "4", "--horizon", "200", "--burn-in", "50"],
        &["percolate", "--family", "complete", "--n", "64", "--reps", "200"],
        &["verify", "--n", "12", "--reps", "2000", "--sim-reps", "4", "--horizon", "1500"],
        &["scan", "--n-list", "16,32,64", "--reps", "60"],
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for args in commands {
        let mut outputs = Vec::new();
        for (run, workers) in ["1", "8", "8"].iter().enumerate() {
            let out = tmp.join(format!("{}-{run}", args[0]));
            let status = Command::new(env!("CARGO_BIN_EXE_gossipfpp"))
                .args(args)
                .args(["--seed", "10", "--workers", workers, "--out"])
                .arg(&out)
                .env_remove("GOSSIPFPP_SEED")
                .output()
                .unwrap()
                .status;
            passed &= status.code() == Some(0);
            outputs.push(files(&out));
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty();
        passed &= same;
        parts.push(format!("{} {} files {}", args[0], outputs[0].len(), if same { "identical" } else { "DIFFER" }));
    }
    let _ = fs::remove_dir_all(&tmp);
    outcome(passed, parts.join("; "))
}

fn main() {
    let rings = ring_hopcounts();
    let criteria: Vec<Criterion> = vec![
        ("chain walk truth probability", Box::new(c1_chain_walks)),
        ("complete-graph hopcount", Box::new(c2_complete_hopcount)),
        ("ring hopcount bound and trend", Box::new(|| c3_ring_bound(&rings))),
        ("absorbing-chain oracle", Box::new(|| c4_absorbing(&rings))),
        ("stationary quality law", Box::new(c5_quality_law)),
        ("mean age equals mean passage time", Box::new(c6_age)),
        ("scaling separation and trends", Box::new(c7_scaling)),
        ("exhaustive shortest-path oracle", Box::new(c8_exhaustive)),
        ("gaussian second-moment integral", Box::new(c9_integral)),
        ("determinism across worker counts", Box::new(c10_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.passed {
            failed += 1;
        }
        println!(
            "acceptance {:>2} {} {name}: {} [{:.1}s]",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
