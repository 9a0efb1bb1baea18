//! First-passage percolation on the auxiliary graph.
//!
//! A [`PercolationSample`] is one i.i.d. draw of exponential arc weights. Solving
//! it yields, for every node, the passage time to the source and the hopcount
//! of the path realizing it. Estimators repeat this over independent
//! replications keyed by a [`SeedStream`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::SeedStream;
use crate::stats::mean_and_std_error;
use crate::topology::{AuxiliaryGraph, NodeId, SOURCE};

/// Shortest-path tree toward the source. Vectors are indexed by node label,
/// with the source at index 0 (`T = 0`, `H = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct SourceTree {
    passage_time: Vec<f64>,
    hopcount: Vec<u32>,
    next_hop: Vec<NodeId>,
}

impl SourceTree {
    pub fn passage_time(&self, i: NodeId) -> f64 {
        self.passage_time[i]
    }

    pub fn hopcount(&self, i: NodeId) -> u32 {
        self.hopcount[i]
    }

    /// Successor of `i` on its minimizing path. The source maps to itself.
    pub fn next_hop(&self, i: NodeId) -> NodeId {
        self.next_hop[i]
    }

    /// Passage times of nodes `1..=n`.
    pub fn passage_times(&self) -> &[f64] {
        &self.passage_time[1..]
    }

    /// Hopcounts of nodes `1..=n`.
    pub fn hopcounts(&self) -> &[u32] {
        &self.hopcount[1..]
    }

    /// Minimizing path from `i`, ending at the source.
    pub fn path(&self, mut i: NodeId) -> Vec<NodeId> {
        let mut path = vec![i];
        while i != SOURCE {
            i = self.next_hop[i];
            path.push(i);
        }
        path
    }
}

/// One weight draw on the auxiliary graph, optionally solved.
#[derive(Debug, Clone, PartialEq)]
pub struct PercolationSample {
    weights: Vec<f64>,
    tree: Option<SourceTree>,
}

impl PercolationSample {
    /// Wraps explicit arc weights, indexed by arc id.
    pub fn from_weights(aux: &AuxiliaryGraph, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != aux.arc_count() {
            return Err(Error::InvalidParameter(format!("{} weights for {} arcs", weights.len(), aux.arc_count())));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidParameter(format!("arc weight {w} is not positive")));
        }
        Ok(Self { weights, tree: None })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, arc: usize) -> f64 {
        self.weights[arc]
    }

    pub fn tree(&self) -> Option<&SourceTree> {
        self.tree.as_ref()
    }

    /// Same sample with every weight multiplied by `factor`, unsolved.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { weights: self.weights.iter().map(|w| w * factor).collect(), tree: None }
    }
}

pub fn sample_weights<R: Rng + ?Sized>(aux: &AuxiliaryGraph, rng: &mut R) -> PercolationSample {
    let weights = aux.arcs().iter().map(|arc| exponential(rng, arc.rate)).collect();
    PercolationSample { weights, tree: None }
}

fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    loop {
        let w = rng.sample::<f64, _>(Exp1) / rate;
        if w > 0.0 {
            return w;
        }
    }
}

/// Fills in passage times, hopcounts and paths toward the source.
pub fn shortest_to_source(mut sample: PercolationSample, aux: &AuxiliaryGraph) -> PercolationSample {
    sample.tree = Some(solve_to_source(aux, &sample.weights));
    sample
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Label {
    time: f64,
    hops: u32,
    node: NodeId,
}

impl Eq for Label {}

impl Ord for Label {
    // min-heap on (time, hops, node)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.hops.cmp(&self.hops))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sink-rooted Dijkstra over reversed arcs, minimizing `(time, hops)`
/// lexicographically; remaining ties go to the smallest successor label.
pub fn solve_to_source(aux: &AuxiliaryGraph, weights: &[f64]) -> SourceTree {
    let m = aux.node_count();
    let mut time = vec![f64::INFINITY; m];
    let mut hops = vec![u32::MAX; m];
    let mut next = vec![NodeId::MAX; m];
    let mut done = vec![false; m];
    let mut heap = BinaryHeap::new();
    time[SOURCE] = 0.0;
    hops[SOURCE] = 0;
    next[SOURCE] = SOURCE;
    heap.push(Label { time: 0.0, hops: 0, node: SOURCE });

    while let Some(Label { time: t, hops: h, node: u }) = heap.pop() {
        if done[u] || t != time[u] || h != hops[u] {
            continue;
        }
        done[u] = true;
        for &id in aux.incoming(u) {
            let v = aux.arc(id).tail;
            if done[v] {
                continue;
            }
            let cand_t = weights[id] + t;
            let cand_h = h + 1;
            let better = match cand_t.total_cmp(&time[v]) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => cand_h < hops[v] || (cand_h == hops[v] && u < next[v]),
            };
            if better {
                time[v] = cand_t;
                hops[v] = cand_h;
                next[v] = u;
                heap.push(Label { time: cand_t, hops: cand_h, node: v });
            }
        }
    }
    assert!(done.iter().all(|&d| d), "auxiliary graph has a node that cannot reach the source");
    SourceTree { passage_time: time, hopcount: hops, next_hop: next }
}

/// Passage times `T(center, j)` for every node `j` (source included), along
/// forward arcs of the sampled auxiliary graph.
pub fn passage_times_from(aux: &AuxiliaryGraph, weights: &[f64], center: NodeId) -> Vec<f64> {
    let m = aux.node_count();
    let mut time = vec![f64::INFINITY; m];
    let mut done = vec![false; m];
    let mut heap = BinaryHeap::new();
    time[center] = 0.0;
    heap.push(Label { time: 0.0, hops: 0, node: center });
    while let Some(Label { time: t, node: u, .. }) = heap.pop() {
        if done[u] || t != time[u] {
            continue;
        }
        done[u] = true;
        for &id in aux.outgoing(u) {
            let v = aux.arc(id).head;
            let cand = t + weights[id];
            if !done[v] && cand < time[v] {
                time[v] = cand;
                heap.push(Label { time: cand, hops: 0, node: v });
            }
        }
    }
    time
}

/// The nodes within passage time `radius` of `center` in one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomBall {
    pub center: NodeId,
    pub radius: f64,
    pub members: Vec<NodeId>,
}

impl RandomBall {
    pub fn contains(&self, v: NodeId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

pub fn random_ball(sample: &PercolationSample, aux: &AuxiliaryGraph, center: NodeId, radius: f64) -> RandomBall {
    let times = passage_times_from(aux, &sample.weights, center);
    let members = times.iter().enumerate().filter(|(_, &t)| t <= radius).map(|(v, _)| v).collect();
    RandomBall { center, radius, members }
}

/// Solved shortest-path trees for replications `0..reps`, in replication order.
pub fn replicate(aux: &AuxiliaryGraph, reps: usize, seeds: &SeedStream) -> Vec<SourceTree> {
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = seeds.rng(rep as u64);
            let sample = sample_weights(aux, &mut rng);
            solve_to_source(aux, &sample.weights)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeSelection {
    /// Average over all nodes; only meaningful on vertex-transitive graphs.
    Pooled,
    Node(NodeId),
}

impl NodeSelection {
    fn check(self, aux: &AuxiliaryGraph) -> Result<()> {
        match self {
            NodeSelection::Pooled if !aux.is_vertex_transitive() => {
                Err(Error::InvalidParameter("pooled statistics need a vertex-transitive family; select a node".into()))
            }
            NodeSelection::Node(v) if v == SOURCE || v > aux.n() => {
                Err(Error::InvalidParameter(format!("node {v} outside 1..={}", aux.n())))
            }
            _ => Ok(()),
        }
    }

    fn reduce<T: Copy + Into<f64>>(self, per_node: &[T]) -> f64 {
        match self {
            NodeSelection::Pooled => per_node.iter().map(|&x| x.into()).sum::<f64>() / per_node.len() as f64,
            NodeSelection::Node(v) => per_node[v - 1].into(),
        }
    }
}

/// Mean of a per-replication statistic with its standard error across replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopcountEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub selection: NodeSelection,
}

impl HopcountEstimate {
    fn from_values(values: &[f64], selection: NodeSelection) -> Self {
        let (mean, std_error) = mean_and_std_error(values);
        Self { mean, std_error, samples: values.len(), selection }
    }
}

/// Passage-time summary; same shape as the hopcount estimate.
pub type PassageTimeEstimate = HopcountEstimate;

fn check_reps(reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(Error::InvalidParameter("at least one replication is required".into()));
    }
    Ok(())
}

pub fn hopcount_estimate(trees: &[SourceTree], selection: NodeSelection) -> HopcountEstimate {
    let values: Vec<f64> = trees.iter().map(|t| selection.reduce(t.hopcounts())).collect();
    HopcountEstimate::from_values(&values, selection)
}

pub fn passage_time_estimate(trees: &[SourceTree], selection: NodeSelection) -> PassageTimeEstimate {
    let values: Vec<f64> = trees.iter().map(|t| selection.reduce(t.passage_times())).collect();
    HopcountEstimate::from_values(&values, selection)
}

pub fn estimate_hopcount(
    aux: &AuxiliaryGraph,
    reps: usize,
    seeds: &SeedStream,
    selection: NodeSelection,
) -> Result<HopcountEstimate> {
    check_reps(reps)?;
    selection.check(aux)?;
    Ok(hopcount_estimate(&replicate(aux, reps, seeds), selection))
}

pub fn estimate_passage_time(
    aux: &AuxiliaryGraph,
    reps: usize,
    seeds: &SeedStream,
    selection: NodeSelection,
) -> Result<PassageTimeEstimate> {
    check_reps(reps)?;
    selection.check(aux)?;
    Ok(passage_time_estimate(&replicate(aux, reps, seeds), selection))
}

/// Expected number of transitions before absorption of the ring coupling chain.
///
/// From transient state `i` the chain advances to `i + 1` with probability
/// `(n - i) / (n + 1)` and absorbs otherwise; state `n - 1` absorbs surely.
pub fn ring_absorbing_expectation(n: usize) -> f64 {
    assert!(n >= 1, "ring chain needs n >= 1");
    let denom = (n + 1) as f64;
    let mut expected = 1.0; // state n - 1
    for i in (0..n - 1).rev() {
        expected = (denom + (n - i) as f64 * expected) / denom;
    }
    expected
}

/// `x^2 exp(-x^2)`.
pub fn gaussian_moment_integrand(x: f64) -> f64 {
    x * x * (-x * x).exp()
}

/// Composite Simpson rule for the integrand over `[0, upper]`.
pub fn gaussian_moment_integral(upper: f64, intervals: usize) -> f64 {
    let intervals = intervals + intervals % 2;
    let h = upper / intervals as f64;
    let inner: f64 = (1..intervals)
        .map(|i| {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            w * gaussian_moment_integrand(i as f64 * h)
        })
        .sum();
    h / 3.0 * (gaussian_moment_integrand(0.0) + inner + gaussian_moment_integrand(upper))
}

/// Numerical value of the integral of `x^2 exp(-x^2)` over `[0, inf)`.
pub fn gaussian_integral_check() -> f64 {
    // tail beyond 10 is below e^-100
    gaussian_moment_integral(10.0, 20_000)
}
