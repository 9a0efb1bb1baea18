//! Cross-validation of the simulator against the percolation oracle, truthful
//! fraction estimates, and scaling experiments over network size.
//!
//! The oracle side composes the empirical hopcount law with the degradation
//! chain: a node whose freshest packet travelled `h` hops holds a state drawn
//! from the chain run `h` steps from the initial state. The simulation side is
//! an exact time average after burn-in.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::{truth_probability, DegradationChain, StateDistribution, TRUE};
use crate::error::{Error, Result};
use crate::percolation::{passage_time_estimate, replicate, HopcountEstimate, NodeSelection, SourceTree};
use crate::seed::SeedStream;
use crate::simulate::{self, AcceptanceRule, SimulationConfig, SimulationOutput};
use crate::stats::{batch_means, linear_fit, mean_and_std_error, LinearFit};
use crate::topology::{build_auxiliary, AuxiliaryGraph, Family, GossipNetwork};

/// Largest time-averaged not-reached fraction tolerated in a comparison window.
pub const MAX_NOT_REACHED: f64 = 1e-3;

/// Predicted quality law: the hopcount distribution composed with the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityPrediction {
    /// Node-averaged distribution over chain states.
    pub pooled: StateDistribution,
    /// Per-node distribution, index `i - 1`.
    pub per_node: Vec<StateDistribution>,
    /// Pooled count of nodes-by-replication with hopcount `h`, index `h`.
    pub hop_histogram: Vec<u64>,
    pub reps: usize,
}

impl QualityPrediction {
    pub fn from_trees(trees: &[SourceTree], chain: &DegradationChain) -> Self {
        let n = trees.first().map_or(0, |t| t.hopcounts().len());
        let max_h = trees.iter().flat_map(|t| t.hopcounts()).copied().max().unwrap_or(0) as usize;
        let mut per_node_hist = vec![vec![0u64; max_h + 1]; n];
        for tree in trees {
            for (i, &h) in tree.hopcounts().iter().enumerate() {
                per_node_hist[i][h as usize] += 1;
            }
        }
        let mut hop_histogram = vec![0u64; max_h + 1];
        for hist in &per_node_hist {
            for (h, c) in hist.iter().enumerate() {
                hop_histogram[h] += c;
            }
        }
        let laws = chain.trajectory(chain.initial_state(), max_h);
        let mix = |hist: &[u64]| {
            let total = hist.iter().sum::<u64>() as f64;
            let mut probs = vec![0.0; chain.k()];
            for (h, &count) in hist.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let w = count as f64 / total;
                for (s, p) in laws[h].probs().iter().enumerate() {
                    probs[s] += w * p;
                }
            }
            StateDistribution::new(probs).expect("mixture of distributions is a distribution")
        };
        Self {
            pooled: mix(&hop_histogram),
            per_node: per_node_hist.iter().map(|h| mix(h)).collect(),
            hop_histogram,
            reps: trees.len(),
        }
    }
}

pub fn predict_quality(
    aux: &AuxiliaryGraph,
    chain: &DegradationChain,
    reps: usize,
    seeds: &SeedStream,
) -> Result<QualityPrediction> {
    if reps == 0 {
        return Err(Error::InvalidParameter("at least one replication is required".into()));
    }
    Ok(QualityPrediction::from_trees(&replicate(aux, reps, seeds), chain))
}

/// Average of `p^H` over every node of every replication.
pub fn mean_truth_power(trees: &[SourceTree], p: f64) -> f64 {
    let per_rep: Vec<f64> = trees.iter().map(|t| truth_power(t, p)).collect();
    per_rep.iter().sum::<f64>() / per_rep.len() as f64
}

fn truth_power(tree: &SourceTree, p: f64) -> f64 {
    let h = tree.hopcounts();
    h.iter().map(|&h| truth_probability(p, h)).sum::<f64>() / h.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityLawComparison {
    /// Time-averaged state distribution of reached nodes.
    pub simulated: Vec<f64>,
    pub predicted: Vec<f64>,
    pub per_state_difference: Vec<f64>,
    pub total_variation: f64,
    pub not_reached: f64,
}

/// Window-weighted average of the per-state node-time fractions across runs.
fn pooled_fractions(outputs: &[SimulationOutput]) -> Result<(Vec<f64>, f64)> {
    let first = outputs.first().ok_or_else(|| Error::InvalidParameter("no simulation output".into()))?;
    let k = first.k;
    let mut fractions = vec![0.0; k];
    let mut not_reached = 0.0;
    let mut total = 0.0;
    for out in outputs {
        if out.k != k {
            return Err(Error::InvalidParameter("simulations use chains of different sizes".into()));
        }
        let w = out.averages.window;
        for (s, f) in out.averages.state_fractions.iter().enumerate() {
            fractions[s] += w * f;
        }
        not_reached += w * out.averages.not_reached;
        total += w;
    }
    fractions.iter_mut().for_each(|f| *f /= total);
    Ok((fractions, not_reached / total))
}

pub fn compare_quality_law(
    outputs: &[SimulationOutput],
    prediction: &QualityPrediction,
) -> Result<QualityLawComparison> {
    let (fractions, not_reached) = pooled_fractions(outputs)?;
    if not_reached >= MAX_NOT_REACHED {
        return Err(Error::InsufficientBurnIn(not_reached));
    }
    if fractions.len() != prediction.pooled.len() {
        return Err(Error::InvalidParameter("prediction and simulation differ in state count".into()));
    }
    let reached = 1.0 - not_reached;
    let simulated: Vec<f64> = fractions.iter().map(|f| f / reached).collect();
    let predicted = prediction.pooled.probs().to_vec();
    let per_state_difference: Vec<f64> = simulated.iter().zip(&predicted).map(|(a, b)| a - b).collect();
    let total_variation = 0.5 * per_state_difference.iter().map(|d| d.abs()).sum::<f64>();
    Ok(QualityLawComparison { simulated, predicted, per_state_difference, total_variation, not_reached })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanAgeComparison {
    pub simulated_mean_age: f64,
    pub predicted_mean_passage_time: f64,
    pub relative_error: f64,
}

pub fn compare_mean_age(outputs: &[SimulationOutput], passage: &HopcountEstimate) -> Result<MeanAgeComparison> {
    let (_, not_reached) = pooled_fractions(outputs)?;
    if not_reached >= MAX_NOT_REACHED {
        return Err(Error::InsufficientBurnIn(not_reached));
    }
    let total: f64 = outputs.iter().map(|o| o.averages.window).sum();
    let age = outputs.iter().map(|o| o.averages.window * o.averages.mean_time_age()).sum::<f64>() / total;
    Ok(MeanAgeComparison {
        simulated_mean_age: age,
        predicted_mean_passage_time: passage.mean,
        relative_error: (age - passage.mean).abs() / passage.mean,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Simulation,
    PercolationFormula,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFractionResult {
    pub family: Family,
    pub n: usize,
    pub p: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub method: EstimateMethod,
}

const TRUTH_BATCHES: usize = 20;

/// Time average of the truthful fraction over post-burn-in snapshots, pooled
/// across replications, with a batch-means standard error.
pub fn estimate_truth_fraction(config: &SimulationConfig, outputs: &[SimulationOutput]) -> Result<TruthFractionResult> {
    if config.chain.k() != 2 {
        return Err(Error::UnsupportedChain(format!(
            "truthful fraction needs a two-state chain, got {} states",
            config.chain.k()
        )));
    }
    if outputs.is_empty() {
        return Err(Error::InvalidParameter("no simulation output".into()));
    }
    let mut means = Vec::with_capacity(outputs.len());
    let mut variances = Vec::with_capacity(outputs.len());
    for out in outputs {
        let series: Vec<f64> =
            out.snapshots.iter().filter(|s| s.time >= out.burn_in).map(|s| s.fraction_per_state[TRUE]).collect();
        if series.len() < 2 {
            return Err(Error::InvalidConfig("need at least two snapshots after burn-in".into()));
        }
        let (m, se) = batch_means(&series, TRUTH_BATCHES);
        means.push(m);
        variances.push(se * se);
    }
    let r = outputs.len() as f64;
    Ok(TruthFractionResult {
        family: config.network.family(),
        n: config.network.n(),
        p: config.chain.probability(TRUE, TRUE),
        estimate: means.iter().sum::<f64>() / r,
        std_error: variances.iter().sum::<f64>().sqrt() / r,
        method: EstimateMethod::Simulation,
    })
}

/// `P(G)` from the percolation formula: mean of `p^H` over nodes, with the
/// standard error across replications.
pub fn percolation_truth_fraction(
    net: &GossipNetwork,
    p: f64,
    reps: usize,
    seeds: &SeedStream,
) -> Result<TruthFractionResult> {
    check_p(p)?;
    if reps == 0 {
        return Err(Error::InvalidParameter("at least one replication is required".into()));
    }
    let trees = replicate(&build_auxiliary(net), reps, seeds);
    Ok(truth_fraction_from_trees(net, p, &trees))
}

fn truth_fraction_from_trees(net: &GossipNetwork, p: f64, trees: &[SourceTree]) -> TruthFractionResult {
    let per_rep: Vec<f64> = trees.iter().map(|t| truth_power(t, p)).collect();
    let (estimate, std_error) = mean_and_std_error(&per_rep);
    TruthFractionResult {
        family: net.family(),
        n: net.n(),
        p,
        estimate,
        std_error,
        method: EstimateMethod::PercolationFormula,
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {p}")))
    }
}

/// Separation of two estimates in units of their combined standard error.
pub fn separation_sigmas(a: &TruthFractionResult, b: &TruthFractionResult) -> f64 {
    (a.estimate - b.estimate) / (a.std_error.powi(2) + b.std_error.powi(2)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub truth_fraction: f64,
    pub truth_fraction_std_error: f64,
    /// `log_p` of the truthful fraction (0 when `p == 1`).
    pub log_p_truth_fraction: f64,
    pub mean_hopcount: f64,
    pub hopcount_std_error: f64,
    pub mean_passage_time: f64,
    pub passage_time_std_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regressor {
    LnN,
    SqrtN,
}

impl Regressor {
    pub fn for_family(family: Family) -> Result<Self> {
        match family {
            Family::Complete => Ok(Regressor::LnN),
            Family::Ring => Ok(Regressor::SqrtN),
            other => Err(Error::InvalidParameter(format!("scaling experiment does not support family `{other}`"))),
        }
    }

    pub fn apply(self, n: usize) -> f64 {
        match self {
            Regressor::LnN => (n as f64).ln(),
            Regressor::SqrtN => (n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub family: Family,
    pub p: f64,
    pub lambda: f64,
    pub reps: usize,
    pub regressor: Regressor,
    pub rows: Vec<ScalingRow>,
    /// Fit of `log_p P` against the regressor.
    pub fit: LinearFit,
    /// Fit of the mean hopcount against the regressor.
    pub hopcount_fit: LinearFit,
}

pub fn scaling_experiment(
    family: Family,
    n_list: &[usize],
    p: f64,
    lambda: f64,
    reps: usize,
    seeds: &SeedStream,
) -> Result<ScalingTable> {
    check_p(p)?;
    let regressor = Regressor::for_family(family)?;
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("n_list is empty".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("n_list must be strictly ascending".into()));
    }
    if reps == 0 {
        return Err(Error::InvalidParameter("at least one replication is required".into()));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let net = match family {
            Family::Complete => GossipNetwork::complete(n, lambda, 0.0)?,
            _ => GossipNetwork::ring(n, lambda, 0.0)?,
        };
        let trees = replicate(&build_auxiliary(&net), reps, &seeds.derive(n as u64));
        let truth = truth_fraction_from_trees(&net, p, &trees);
        let hops = crate::percolation::hopcount_estimate(&trees, NodeSelection::Pooled);
        let times = passage_time_estimate(&trees, NodeSelection::Pooled);
        let log_p = if p < 1.0 { truth.estimate.ln() / p.ln() } else { 0.0 };
        rows.push(ScalingRow {
            n,
            truth_fraction: truth.estimate,
            truth_fraction_std_error: truth.std_error,
            log_p_truth_fraction: log_p,
            mean_hopcount: hops.mean,
            hopcount_std_error: hops.std_error,
            mean_passage_time: times.mean,
            passage_time_std_error: times.std_error,
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| regressor.apply(r.n)).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.log_p_truth_fraction).collect();
    let h: Vec<f64> = rows.iter().map(|r| r.mean_hopcount).collect();
    Ok(ScalingTable {
        family,
        p,
        lambda,
        reps,
        regressor,
        fit: linear_fit(&x, &y),
        hopcount_fit: linear_fit(&x, &h),
        rows,
    })
}

/// Burn-in: first full-coverage time plus five mean passage times.
pub fn rule_burn_in(coverage_time: f64, mean_passage_time: f64) -> f64 {
    coverage_time + 5.0 * mean_passage_time
}

/// Inputs for a simulator-versus-percolation comparison.
#[derive(Debug, Clone)]
pub struct ValidationSetup {
    pub network: GossipNetwork,
    pub chain: DegradationChain,
    pub horizon: f64,
    pub snapshot_interval: f64,
    pub sim_reps: usize,
    pub percolation_reps: usize,
    pub seeds: SeedStream,
    pub acceptance: AcceptanceRule,
}

#[derive(Debug, Clone)]
pub struct ValidationRun {
    pub prediction: QualityPrediction,
    pub passage: HopcountEstimate,
    pub hopcount: HopcountEstimate,
    pub burn_ins: Vec<f64>,
    pub outputs: Vec<SimulationOutput>,
    pub configs: Vec<SimulationConfig>,
}

impl ValidationRun {
    pub fn quality_law(&self) -> Result<QualityLawComparison> {
        compare_quality_law(&self.outputs, &self.prediction)
    }

    pub fn mean_age(&self) -> Result<MeanAgeComparison> {
        compare_mean_age(&self.outputs, &self.passage)
    }
}

const PERCOLATION_SALT: u64 = 1;
const SIMULATION_SALT: u64 = 2;

/// Runs the percolation oracle and `sim_reps` simulations, each with the
/// burn-in given by [`rule_burn_in`] for its own trajectory.
pub fn run_validation(setup: &ValidationSetup) -> Result<ValidationRun> {
    if setup.sim_reps == 0 || setup.percolation_reps == 0 {
        return Err(Error::InvalidParameter("replication counts must be positive".into()));
    }
    let aux = build_auxiliary(&setup.network);
    let trees = replicate(&aux, setup.percolation_reps, &setup.seeds.derive(PERCOLATION_SALT));
    let prediction = QualityPrediction::from_trees(&trees, &setup.chain);
    let passage = passage_time_estimate(&trees, NodeSelection::Pooled);
    let hopcount = crate::percolation::hopcount_estimate(&trees, NodeSelection::Pooled);
    drop(trees);

    let sim_seed = setup.seeds.derive(SIMULATION_SALT).master();
    let results: Vec<Result<(f64, SimulationConfig, SimulationOutput)>> = (0..setup.sim_reps)
        .into_par_iter()
        .map(|rep| {
            let mut cfg = SimulationConfig::new(setup.network.clone(), setup.chain.clone());
            cfg.horizon = setup.horizon;
            cfg.snapshot_interval = setup.snapshot_interval;
            cfg.master_seed = sim_seed;
            cfg.replication_index = rep as u64;
            cfg.acceptance = setup.acceptance;
            let coverage = simulate::coverage_time(&cfg)?.ok_or(Error::InsufficientBurnIn(1.0))?;
            let burn_in = rule_burn_in(coverage, passage.mean);
            if burn_in >= cfg.horizon {
                return Err(Error::InvalidConfig(format!("burn-in {burn_in} reaches the horizon {}", cfg.horizon)));
            }
            cfg.burn_in = burn_in;
            let out = simulate::run(&cfg)?;
            Ok((burn_in, cfg, out))
        })
        .collect();
    let mut burn_ins = Vec::with_capacity(setup.sim_reps);
    let mut configs = Vec::with_capacity(setup.sim_reps);
    let mut outputs = Vec::with_capacity(setup.sim_reps);
    for r in results {
        let (b, c, o) = r?;
        burn_ins.push(b);
        configs.push(c);
        outputs.push(o);
    }
    Ok(ValidationRun { prediction, passage, hopcount, burn_ins, outputs, configs })
}
