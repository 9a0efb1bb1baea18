//! On-disk schemas. Every JSON document carries `schema_version`.

use std::fs;
use std::path::{Path, PathBuf};

use gossipfpp_core::analysis::{ScalingTable, TruthFractionResult};
use gossipfpp_core::chains::ChainSpec;
use gossipfpp_core::simulate::{SimulationOutput, NOT_REACHED};
use gossipfpp_core::topology::Family;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| write_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| write_err(path, e))
}

pub fn write_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Write { path: path.to_path_buf(), message: e.to_string() }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| write_err(dir, e))
}

pub fn rep_file(dir: &Path, stem: &str, rep: usize) -> PathBuf {
    dir.join(format!("{stem}_rep{rep:04}.csv"))
}

/// Header of a snapshot CSV for a `k`-state chain.
pub fn snapshot_header(k: usize) -> Vec<String> {
    let mut h = vec!["time".to_string()];
    h.extend((0..k).map(|s| format!("frac_state_{s}")));
    h.extend(["frac_not_reached", "mean_version_age", "mean_time_age"].map(String::from));
    h
}

pub fn write_snapshots(path: &Path, out: &SimulationOutput) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| write_err(path, e))?;
    w.write_record(snapshot_header(out.k)).map_err(|e| write_err(path, e))?;
    for s in &out.snapshots {
        let mut rec = vec![s.time.to_string()];
        rec.extend(s.fraction_per_state.iter().map(f64::to_string));
        rec.push(s.fraction_not_reached.to_string());
        rec.push(s.mean_version_age.to_string());
        rec.push(s.mean_time_age.to_string());
        w.write_record(&rec).map_err(|e| write_err(path, e))?;
    }
    w.flush().map_err(|e| write_err(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalStateRow {
    pub node: usize,
    /// `-1` for a node never reached.
    pub version: i64,
    /// `-1` for a node never reached.
    pub quality: i64,
}

pub fn write_final_states(path: &Path, out: &SimulationOutput) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| write_err(path, e))?;
    for (i, s) in out.final_states.iter().enumerate() {
        let reached = s.quality.is_some();
        let row = FinalStateRow {
            node: i + 1,
            version: if reached { s.version as i64 } else { NOT_REACHED },
            quality: s.quality_code(),
        };
        w.serialize(row).map_err(|e| write_err(path, e))?;
    }
    w.flush().map_err(|e| write_err(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub rep_id: usize,
    pub node: usize,
    #[serde(rename = "T")]
    pub passage_time: f64,
    #[serde(rename = "H")]
    pub hopcount: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkInfo {
    pub family: Family,
    pub n: usize,
    pub lambda: f64,
    pub lambda_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub rep_id: usize,
    pub burn_in: f64,
    pub events: u64,
    pub accepted: u64,
    pub final_source_version: u64,
    pub full_coverage_time: Option<f64>,
    pub state_fractions: Vec<f64>,
    pub not_reached: f64,
    pub mean_time_age: f64,
    pub mean_version_age: f64,
}

impl ReplicationSummary {
    pub fn new(rep_id: usize, out: &SimulationOutput) -> Self {
        Self {
            rep_id,
            burn_in: out.burn_in,
            events: out.events,
            accepted: out.accepted,
            final_source_version: out.final_source_version,
            full_coverage_time: out.full_coverage_time,
            state_fractions: out.averages.state_fractions.clone(),
            not_reached: out.averages.not_reached,
            mean_time_age: out.averages.mean_time_age(),
            mean_version_age: out.averages.mean_version_age(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub schema_version: u32,
    pub network: NetworkInfo,
    pub chain: ChainSpec,
    pub seed: u64,
    pub reps: usize,
    pub horizon: f64,
    pub snapshot_interval: f64,
    pub replications: Vec<ReplicationSummary>,
    /// Time-averaged truthful fraction; present for two-state chains.
    pub truth_fraction: Option<TruthFractionResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StdErrors {
    #[serde(rename = "T")]
    pub passage_time: f64,
    #[serde(rename = "H")]
    pub hopcount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMeans {
    pub node: usize,
    #[serde(rename = "mean_T")]
    pub mean_passage_time: f64,
    #[serde(rename = "mean_H")]
    pub mean_hopcount: f64,
    pub std_errors: StdErrors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolateSummary {
    pub schema_version: u32,
    pub family: Family,
    pub n: usize,
    pub lambda: f64,
    pub lambda_e: f64,
    pub reps: usize,
    pub seed: u64,
    /// `pooled` on vertex-transitive families, otherwise `node_average`.
    pub selection: String,
    #[serde(rename = "mean_T")]
    pub mean_passage_time: f64,
    #[serde(rename = "mean_H")]
    pub mean_hopcount: f64,
    pub std_errors: StdErrors,
    /// Per-node means, reported when pooling is not justified.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_node: Vec<NodeMeans>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Info {
    pub name: String,
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub network: NetworkInfo,
    pub chain: ChainSpec,
    pub seed: u64,
    pub percolation_reps: usize,
    pub sim_reps: usize,
    pub horizon: f64,
    pub inverted_acceptance: bool,
    pub burn_ins: Vec<f64>,
    pub predicted: Vec<f64>,
    pub simulated: Vec<f64>,
    pub checks: Vec<Check>,
    pub info: Vec<Info>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: u32,
    pub seed: u64,
    #[serde(flatten)]
    pub table: ScalingTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub family: Family,
    pub n: usize,
    #[serde(rename = "P")]
    pub truth_fraction: f64,
    #[serde(rename = "P_std_error")]
    pub truth_fraction_std_error: f64,
    #[serde(rename = "log_p_P")]
    pub log_p_truth_fraction: f64,
    #[serde(rename = "mean_H")]
    pub mean_hopcount: f64,
    #[serde(rename = "H_std_error")]
    pub hopcount_std_error: f64,
    #[serde(rename = "mean_T")]
    pub mean_passage_time: f64,
    #[serde(rename = "T_std_error")]
    pub passage_time_std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub n: usize,
    pub p: f64,
    #[serde(rename = "P_complete")]
    pub complete: f64,
    #[serde(rename = "P_ring")]
    pub ring: f64,
    pub sigmas: f64,
}
