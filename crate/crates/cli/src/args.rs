use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "gossipfpp", version, about = "Gossip networks with degrading updates via first-passage percolation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the event-driven gossip simulator.
    Simulate(CommonArgs),
    /// Sample first-passage percolation on the auxiliary graph.
    Percolate(CommonArgs),
    /// Check the simulator against the percolation oracle.
    Verify(VerifyArgs),
    /// Scaling of the truthful fraction over network size.
    Scan(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Percolate(_) => "percolate",
            Command::Verify(_) => "verify",
            Command::Scan(_) => "scan",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Simulate(a) | Command::Percolate(a) | Command::Scan(a) => a,
            Command::Verify(v) => &v.common,
        }
    }
}

/// Flags shared by every command. Each one overrides the matching field of `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON experiment spec.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// complete | ring | grid | custom
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Torus side length for the grid family.
    #[arg(long)]
    pub side: Option<usize>,
    /// Edge-list file for the custom family.
    #[arg(long, value_name = "PATH")]
    pub edges: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<f64>,
    /// truth | random_front | false_front
    #[arg(long)]
    pub chain: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "lambda-e")]
    pub lambda_e: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Simulation replications for `verify`.
    #[arg(long = "sim-reps")]
    pub sim_reps: Option<usize>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long = "burn-in")]
    pub burn_in: Option<f64>,
    #[arg(long = "snapshot-interval")]
    pub snapshot_interval: Option<f64>,
    /// Comma-separated sizes for `scan`.
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Comma-separated families for `scan`.
    #[arg(long, value_delimiter = ',')]
    pub families: Option<Vec<String>>,
    /// Master seed; falls back to the config file, then GOSSIPFPP_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Accept only strictly older packets (negative control).
    #[arg(long = "debug-invert-acceptance")]
    pub debug_invert_acceptance: bool,
}
