//! Discrete-time Markov chains describing how a packet's quality degrades per hop.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// State index of truthful information in the two-state chains.
pub const TRUE: usize = 0;
/// State index of false information in the two-state chains.
pub const FALSE: usize = 1;

const ROW_TOLERANCE: f64 = 1e-12;

/// Row-stochastic transition matrix with a designated initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct DegradationChain {
    k: usize,
    // row-major k x k
    matrix: Vec<f64>,
    initial_state: usize,
    labels: Option<Vec<String>>,
}

impl DegradationChain {
    pub fn new(k: usize, matrix: Vec<f64>, initial_state: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("chain needs at least one state".into()));
        }
        if matrix.len() != k * k {
            return Err(Error::InvalidParameter(format!(
                "expected {} matrix entries for k = {k}, got {}",
                k * k,
                matrix.len()
            )));
        }
        if initial_state >= k {
            return Err(Error::InvalidParameter(format!("initial state {initial_state} out of range for k = {k}")));
        }
        for (r, row) in matrix.chunks(k).enumerate() {
            if let Some(x) = row.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(Error::InvalidParameter(format!("row {r} has entry {x} outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::InvalidParameter(format!("row {r} sums to {sum}, not 1")));
            }
        }
        Ok(Self { k, matrix, initial_state, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.k {
            return Err(Error::InvalidParameter(format!("{} labels for {} states", labels.len(), self.k)));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Truth survives a hop with probability `p`; falsehood is absorbing.
    pub fn truth(p: f64) -> Result<Self> {
        check_probability(p)?;
        Self::new(2, vec![p, 1.0 - p, 0.0, 1.0], TRUE)?.with_labels(true_false_labels())
    }

    /// Symmetric chain: each hop flips the state with probability `p`.
    pub fn random_front(p: f64) -> Result<Self> {
        check_probability(p)?;
        Self::new(2, vec![1.0 - p, p, p, 1.0 - p], TRUE)?.with_labels(true_false_labels())
    }

    /// Truth is corrupted with probability `p` per hop and falsehood is absorbing.
    ///
    /// Note the opposite convention to [`DegradationChain::truth`]: here `p` is
    /// the corruption probability, so `false_front(p) == truth(1 - p)`.
    pub fn false_front(p: f64) -> Result<Self> {
        check_probability(p)?;
        Self::new(2, vec![1.0 - p, p, 0.0, 1.0], TRUE)?.with_labels(true_false_labels())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.matrix[s * self.k..(s + 1) * self.k]
    }

    pub fn probability(&self, from: usize, to: usize) -> f64 {
        self.matrix[from * self.k + to]
    }

    /// Row-major copy of the transition matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// One vector-matrix product `dist * P`.
    pub fn step(&self, dist: &StateDistribution) -> StateDistribution {
        let mut next = vec![0.0; self.k];
        for (from, &mass) in dist.0.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (to, &p) in self.row(from).iter().enumerate() {
                next[to] += mass * p;
            }
        }
        StateDistribution(next)
    }

    /// Distribution after `r` steps from state `s`.
    pub fn run_distribution(&self, s: usize, r: usize) -> StateDistribution {
        let mut dist = StateDistribution::point_mass(self.k, s);
        for _ in 0..r {
            dist = self.step(&dist);
        }
        dist
    }

    /// The distributions after `0..=max_steps` steps from state `s`.
    pub fn trajectory(&self, s: usize, max_steps: usize) -> Vec<StateDistribution> {
        let mut out = Vec::with_capacity(max_steps + 1);
        out.push(StateDistribution::point_mass(self.k, s));
        for r in 0..max_steps {
            let next = self.step(&out[r]);
            out.push(next);
        }
        out
    }

    pub fn sample_step<R: Rng + ?Sized>(&self, s: usize, rng: &mut R) -> usize {
        let row = self.row(s);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = s;
        for (to, &p) in row.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            acc += p;
            last = to;
            if u < acc {
                return to;
            }
        }
        last
    }

    /// Stationary distribution by power iteration on the lazy chain `(I + P) / 2`,
    /// using repeated squaring. Every start state must converge to the same limit,
    /// otherwise the stationary distribution is not unique.
    pub fn stationary_distribution(&self) -> Result<StateDistribution> {
        let k = self.k;
        let mut power: Vec<f64> = self
            .matrix
            .iter()
            .enumerate()
            .map(|(idx, &p)| if idx / k == idx % k { 0.5 + 0.5 * p } else { 0.5 * p })
            .collect();
        let mut converged = false;
        for _ in 0..MAX_SQUARINGS {
            let next = normalize_rows(square(&power, k), k);
            let change = next.iter().zip(&power).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            power = next;
            if change < 1e-14 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoUniqueStationary(format!(
                "power iteration did not settle within 2^{MAX_SQUARINGS} steps"
            )));
        }
        let first = &power[..k];
        for s in 1..k {
            let row = &power[s * k..(s + 1) * k];
            let gap = row.iter().zip(first).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if gap > 1e-9 {
                return Err(Error::NoUniqueStationary(format!("start states 0 and {s} reach different limits")));
            }
        }
        let mu = StateDistribution(first.to_vec());
        let residual = self.step(&mu).0.iter().zip(&mu.0).map(|(a, b)| (a - b).abs()).sum::<f64>();
        if residual > 1e-10 {
            return Err(Error::NoUniqueStationary(format!("residual {residual} after convergence")));
        }
        Ok(mu)
    }
}

const MAX_SQUARINGS: usize = 64;

fn square(m: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        for l in 0..k {
            let a = m[i * k + l];
            if a == 0.0 {
                continue;
            }
            for j in 0..k {
                out[i * k + j] += a * m[l * k + j];
            }
        }
    }
    out
}

fn normalize_rows(mut m: Vec<f64>, k: usize) -> Vec<f64> {
    for row in m.chunks_mut(k) {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= s);
    }
    m
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")))
    }
}

fn true_false_labels() -> Vec<String> {
    vec!["true".into(), "false".into()]
}

/// Probability vector over chain states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateDistribution(Vec<f64>);

impl StateDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidParameter("negative or NaN probability".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > ROW_TOLERANCE {
            return Err(Error::InvalidParameter(format!("probabilities sum to {sum}")));
        }
        Ok(Self(probs))
    }

    pub fn point_mass(k: usize, s: usize) -> Self {
        let mut probs = vec![0.0; k];
        probs[s] = 1.0;
        Self(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, s: usize) -> f64 {
        self.0[s]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_variation(&self, other: &StateDistribution) -> f64 {
        0.5 * self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

/// `p^h`: probability that a truthful packet is still truthful after `h` hops.
pub fn truth_probability(p: f64, h: u32) -> f64 {
    // repeated multiplication matches run_distribution exactly
    (0..h).fold(1.0, |acc, _| acc * p)
}

pub fn truth_chain(p: f64) -> Result<DegradationChain> {
    DegradationChain::truth(p)
}

pub fn random_front_chain(p: f64) -> Result<DegradationChain> {
    DegradationChain::random_front(p)
}

pub fn false_front_chain(p: f64) -> Result<DegradationChain> {
    DegradationChain::false_front(p)
}

/// Chain description as accepted in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainSpec {
    Truth { p: f64 },
    RandomFront { p: f64 },
    FalseFront { p: f64 },
    Custom { k: usize, matrix: Vec<f64>, initial: usize },
}

impl ChainSpec {
    pub fn build(&self) -> Result<DegradationChain> {
        match *self {
            ChainSpec::Truth { p } => DegradationChain::truth(p),
            ChainSpec::RandomFront { p } => DegradationChain::random_front(p),
            ChainSpec::FalseFront { p } => DegradationChain::false_front(p),
            ChainSpec::Custom { k, ref matrix, initial } => DegradationChain::new(k, matrix.clone(), initial),
        }
    }
}
