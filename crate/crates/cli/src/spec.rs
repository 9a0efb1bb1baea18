use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use gossipfpp_core::chains::ChainSpec;
use gossipfpp_core::topology::{Family, GossipNetwork};
use gossipfpp_core::DegradationChain;
use serde::{Deserialize, Serialize};

use crate::args::CommonArgs;
use crate::error::{invalid, CliError};

pub const DEFAULT_OUT: &str = "gossipfpp-out";

/// Experiment description as read from `--config`. Every field is optional;
/// flags take precedence and command defaults fill the rest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSpec>,
    /// Shorthand for the keep-probability of a truth, random-front or false-front chain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim_reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_interval: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file = fs::File::open(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        serde_json::from_reader(BufReader::new(file))
            .map_err(|e| CliError::Config { path: path.to_path_buf(), message: e.to_string() })
    }

    /// Config file (if any) overlaid with flags.
    pub fn from_args(args: &CommonArgs) -> Result<Self, CliError> {
        let mut spec = match &args.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        spec.overlay(args)?;
        Ok(spec)
    }

    fn overlay(&mut self, a: &CommonArgs) -> Result<(), CliError> {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if let Some(v) = &a.$f {
                    self.$f = Some(v.clone());
                }
            )*};
        }
        take!(
            family,
            n,
            side,
            edges,
            lambda,
            lambda_e,
            p,
            reps,
            sim_reps,
            horizon,
            burn_in,
            snapshot_interval,
            n_list,
            families,
            seed,
            workers,
            out
        );
        if let Some(kind) = &a.chain {
            let p = self.p.or_else(|| self.chain.as_ref().and_then(chain_p)).unwrap_or(DEFAULT_P);
            self.chain = Some(chain_from_kind(kind, p)?);
        }
        Ok(())
    }
}

pub const DEFAULT_P: f64 = 0.8;

fn chain_p(spec: &ChainSpec) -> Option<f64> {
    match spec {
        ChainSpec::Truth { p } | ChainSpec::RandomFront { p } | ChainSpec::FalseFront { p } => Some(*p),
        ChainSpec::Custom { .. } => None,
    }
}

fn chain_from_kind(kind: &str, p: f64) -> Result<ChainSpec, CliError> {
    match kind {
        "truth" => Ok(ChainSpec::Truth { p }),
        "random_front" => Ok(ChainSpec::RandomFront { p }),
        "false_front" => Ok(ChainSpec::FalseFront { p }),
        other => Err(invalid(
            "chain",
            format!(
                "unknown chain `{other}`; expected truth, random_front or false_front (custom chains need --config)"
            ),
        )),
    }
}

/// Per-command defaults.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub reps: usize,
    pub sim_reps: usize,
    pub horizon: f64,
    pub p: f64,
}

impl Defaults {
    pub fn for_command(command: &str) -> Self {
        match command {
            "simulate" => Defaults { reps: 1, sim_reps: 1, horizon: 1000.0, p: DEFAULT_P },
            "percolate" => Defaults { reps: 1000, sim_reps: 1, horizon: 1000.0, p: DEFAULT_P },
            "verify" => Defaults { reps: 10_000, sim_reps: 8, horizon: 5000.0, p: DEFAULT_P },
            _ => Defaults { reps: 200, sim_reps: 1, horizon: 1000.0, p: 0.97 },
        }
    }
}

/// Fully resolved and validated experiment.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub spec: ExperimentSpec,
    pub chain_spec: ChainSpec,
    pub chain: DegradationChain,
    pub p: f64,
    pub reps: usize,
    pub sim_reps: usize,
    pub horizon: f64,
    pub burn_in: Option<f64>,
    pub snapshot_interval: f64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: PathBuf,
    pub lambda: f64,
    pub lambda_e: f64,
}

impl Resolved {
    pub fn new(spec: ExperimentSpec, defaults: Defaults) -> Result<Self, CliError> {
        let reps = spec.reps.unwrap_or(defaults.reps);
        if reps == 0 {
            return Err(invalid("reps", "must be at least 1"));
        }
        let sim_reps = spec.sim_reps.unwrap_or(defaults.sim_reps);
        if sim_reps == 0 {
            return Err(invalid("sim_reps", "must be at least 1"));
        }
        let horizon = spec.horizon.unwrap_or(defaults.horizon);
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid("horizon", format!("horizon must be positive, got {horizon}")));
        }
        if let Some(b) = spec.burn_in {
            if !(b >= 0.0 && b < horizon) {
                return Err(invalid("burn_in", format!("must lie in [0, horizon), got {b}")));
            }
        }
        let snapshot_interval = spec.snapshot_interval.unwrap_or(1.0);
        if !(snapshot_interval.is_finite() && snapshot_interval > 0.0) {
            return Err(invalid("snapshot_interval", format!("must be positive, got {snapshot_interval}")));
        }
        if spec.workers == Some(0) {
            return Err(invalid("workers", "must be at least 1"));
        }
        let lambda = spec.lambda.unwrap_or(1.0);
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(invalid("lambda", format!("must be positive, got {lambda}")));
        }
        let lambda_e = spec.lambda_e.unwrap_or(1.0);
        if !(lambda_e.is_finite() && lambda_e >= 0.0) {
            return Err(invalid("lambda_e", format!("must be non-negative, got {lambda_e}")));
        }

        let chain_spec = match (&spec.chain, spec.p) {
            (Some(ChainSpec::Custom { .. }), Some(_)) => {
                return Err(invalid("p", "does not apply to a custom chain"));
            }
            (Some(c), None) => c.clone(),
            (Some(c), Some(p)) => chain_from_kind(kind_of(c), p)?,
            (None, p) => ChainSpec::Truth { p: p.unwrap_or(defaults.p) },
        };
        if let Some(p) = chain_p(&chain_spec) {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid("p", format!("must lie in [0, 1], got {p}")));
            }
        }
        let chain = chain_spec.build().map_err(|e| invalid("chain", e.to_string()))?;
        let p = chain_p(&chain_spec).unwrap_or(f64::NAN);

        Ok(Resolved {
            chain_spec,
            chain,
            p,
            reps,
            sim_reps,
            horizon,
            burn_in: spec.burn_in,
            snapshot_interval,
            seed: match spec.seed {
                Some(s) => s,
                None => seed_from_env()?,
            },
            workers: spec.workers,
            out: spec.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            lambda,
            lambda_e,
            spec,
        })
    }

    pub fn family(&self) -> Result<Family, CliError> {
        match (&self.spec.family, &self.spec.edges) {
            (Some(f), _) => f.parse().map_err(|_| invalid("family", format!("unknown family `{f}`"))),
            (None, Some(_)) => Ok(Family::Custom),
            (None, None) => Ok(Family::Ring),
        }
    }

    pub fn network(&self) -> Result<GossipNetwork, CliError> {
        let (lambda, lambda_e) = (self.lambda, self.lambda_e);
        let size = |field: &'static str| move |e: gossipfpp_core::Error| invalid(field, e.to_string());
        match self.family()? {
            Family::Complete => GossipNetwork::complete(self.spec.n.unwrap_or(16), lambda, lambda_e).map_err(size("n")),
            Family::Ring => GossipNetwork::ring(self.spec.n.unwrap_or(16), lambda, lambda_e).map_err(size("n")),
            Family::Grid => {
                let side = match (self.spec.side, self.spec.n) {
                    (Some(s), _) => s,
                    (None, Some(n)) => {
                        let s = (n as f64).sqrt().round() as usize;
                        if s * s != n {
                            return Err(invalid("n", format!("grid needs --side or a square n, got {n}")));
                        }
                        s
                    }
                    (None, None) => 4,
                };
                GossipNetwork::grid(side, lambda, lambda_e).map_err(size("side"))
            }
            Family::Custom => {
                let path = self
                    .spec
                    .edges
                    .as_ref()
                    .ok_or_else(|| invalid("edges", "custom family needs an edge-list file"))?;
                let file = fs::File::open(path).map_err(|source| CliError::Read { path: path.clone(), source })?;
                let net = GossipNetwork::read_edge_list(BufReader::new(file)).map_err(size("edges"))?;
                let lambda = self.spec.lambda.unwrap_or(net.lambda());
                let lambda_e = self.spec.lambda_e.unwrap_or(net.lambda_e());
                let edges: Vec<_> = net.edges().collect();
                GossipNetwork::from_edges(net.n(), lambda, lambda_e, edges).map_err(size("edges"))
            }
        }
    }

    pub fn scan_families(&self) -> Result<Vec<Family>, CliError> {
        let names = match (&self.spec.families, &self.spec.family) {
            (Some(list), _) => list.clone(),
            (None, Some(f)) => vec![f.clone()],
            (None, None) => vec!["complete".into(), "ring".into()],
        };
        if names.is_empty() {
            return Err(invalid("families", "list is empty"));
        }
        names
            .iter()
            .map(|f| match f.parse::<Family>() {
                Ok(fam @ (Family::Complete | Family::Ring)) => Ok(fam),
                _ => Err(invalid("families", format!("scan supports complete and ring, got `{f}`"))),
            })
            .collect()
    }

    pub fn n_list(&self) -> Result<Vec<usize>, CliError> {
        let list = self.spec.n_list.clone().unwrap_or_else(|| vec![64, 256, 1024]);
        if list.is_empty() {
            return Err(invalid("n_list", "list is empty"));
        }
        if list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n_list", "sizes must be strictly ascending"));
        }
        if list[0] == 0 {
            return Err(invalid("n_list", "sizes must be positive"));
        }
        Ok(list)
    }

    /// Keep-probability for commands that need a truth chain.
    pub fn truth_p(&self) -> Result<f64, CliError> {
        match self.chain_spec {
            ChainSpec::Truth { p } if p > 0.0 && p <= 1.0 => Ok(p),
            ChainSpec::Truth { p } => Err(invalid("p", format!("must lie in (0, 1], got {p}"))),
            _ => Err(invalid("chain", "this command needs a truth chain")),
        }
    }
}

pub const SEED_ENV: &str = "GOSSIPFPP_SEED";

fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| invalid("seed", format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn kind_of(spec: &ChainSpec) -> &'static str {
    match spec {
        ChainSpec::Truth { .. } => "truth",
        ChainSpec::RandomFront { .. } => "random_front",
        ChainSpec::FalseFront { .. } => "false_front",
        ChainSpec::Custom { .. } => "custom",
    }
}
