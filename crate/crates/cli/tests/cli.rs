use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gossipfpp_cli::output::{
    snapshot_header, FinalStateRow, PercolateSummary, ReplicationRow, ScanReport, ScanRow, SeparationRow,
    SimulateSummary, VerifyReport, SCHEMA_VERSION,
};
use tempfile::TempDir;

fn gossipfpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gossipfpp")).args(args).env_remove("GOSSIPFPP_SEED").output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn out_arg(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn simulate_is_deterministic_and_parses_back() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (out_arg(&tmp, "a"), out_arg(&tmp, "b"));
    for out in [&a, &b] {
        let o = gossipfpp(&[
            "simulate",
            "--family",
            "ring",
            "--n",
            "16",
            "--p",
            "0.8",
            "--seed",
            "7",
            "--reps",
            "2",
            "--horizon",
            "60",
            "--burn-in",
            "20",
            "--out",
            out,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let files = read_dir_sorted(Path::new(&a));
    assert_eq!(files, read_dir_sorted(Path::new(&b)));
    let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "final_states_rep0000.csv",
            "final_states_rep0001.csv",
            "snapshots_rep0000.csv",
            "snapshots_rep0001.csv",
            "summary.json"
        ]
    );

    let summary: SimulateSummary =
        serde_json::from_slice(&fs::read(Path::new(&a).join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.schema_version, SCHEMA_VERSION);
    assert_eq!(summary.network.n, 16);
    assert_eq!(summary.replications.len(), 2);
    let tf = summary.truth_fraction.unwrap();
    assert!((0.0..=1.0).contains(&tf.estimate));

    let mut rdr = csv::Reader::from_path(Path::new(&a).join("final_states_rep0000.csv")).unwrap();
    let rows: Vec<FinalStateRow> = rdr.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.quality == -1 || r.quality == 0 || r.quality == 1));

    let mut rdr = csv::Reader::from_path(Path::new(&a).join("snapshots_rep0001.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, snapshot_header(2));
    let recs: Vec<csv::StringRecord> = rdr.records().collect::<Result<_, _>>().unwrap();
    assert_eq!(recs.len(), 41);
    for r in &recs {
        let vals: Vec<f64> = r.iter().map(|x| x.parse().unwrap()).collect();
        assert!((vals[1] + vals[2] + vals[3] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn seed_env_is_a_fallback() {
    let tmp = TempDir::new().unwrap();
    let (a, b, c) = (out_arg(&tmp, "a"), out_arg(&tmp, "b"), out_arg(&tmp, "c"));
    let base = ["percolate", "--n", "12", "--reps", "30"];
    let o = gossipfpp(&[&base[..], &["--seed", "99", "--out", &a]].concat());
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_gossipfpp"))
        .args([&base[..], &["--out", &b]].concat())
        .env("GOSSIPFPP_SEED", "99")
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_gossipfpp"))
        .args([&base[..], &["--seed", "5", "--out", &c]].concat())
        .env("GOSSIPFPP_SEED", "99")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(read_dir_sorted(Path::new(&a)), read_dir_sorted(Path::new(&b)));
    assert_ne!(read_dir_sorted(Path::new(&a)), read_dir_sorted(Path::new(&c)));
}

#[test]
fn percolate_outputs_parse_back() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "p");
    let o =
        gossipfpp(&["percolate", "--family", "complete", "--n", "20", "--reps", "50", "--seed", "3", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s: PercolateSummary = serde_json::from_slice(&fs::read(Path::new(&out).join("summary.json")).unwrap()).unwrap();
    assert_eq!((s.n, s.reps, s.selection.as_str()), (20, 50, "pooled"));
    let mut rdr = csv::Reader::from_path(Path::new(&out).join("replications.csv")).unwrap();
    let rows: Vec<ReplicationRow> = rdr.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 50 * 20);
    let mean_h = rows.iter().map(|r| r.hopcount as f64).sum::<f64>() / rows.len() as f64;
    assert!((mean_h - s.mean_hopcount).abs() < 1e-9);
}

#[test]
fn custom_edges_report_per_node_means() {
    let tmp = TempDir::new().unwrap();
    let edges = tmp.path().join("star.txt");
    fs::write(&edges, "# star\n4 1 1\n1 2\n1 3\n1 4\n").unwrap();
    let out = out_arg(&tmp, "p");
    let o = gossipfpp(&["percolate", "--edges", edges.to_str().unwrap(), "--reps", "40", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s: PercolateSummary = serde_json::from_slice(&fs::read(Path::new(&out).join("summary.json")).unwrap()).unwrap();
    assert_eq!(s.selection, "node_average");
    assert_eq!(s.per_node.len(), 4);
}

#[test]
fn config_file_with_flag_overrides() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("exp.json");
    fs::write(&cfg, r#"{"family": "complete", "n": 10, "reps": 25, "seed": 4}"#).unwrap();
    let out = out_arg(&tmp, "p");
    let o = gossipfpp(&["percolate", "--config", cfg.to_str().unwrap(), "--n", "6", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s: PercolateSummary = serde_json::from_slice(&fs::read(Path::new(&out).join("summary.json")).unwrap()).unwrap();
    assert_eq!((s.n, s.reps, s.seed), (6, 25, 4));

    fs::write(&cfg, r#"{"n_list": []}"#).unwrap();
    let o = gossipfpp(&["scan", "--config", cfg.to_str().unwrap(), "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n_list"));

    fs::write(&cfg, r#"{"horizn": 3}"#).unwrap();
    let o = gossipfpp(&["simulate", "--config", cfg.to_str().unwrap(), "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("horizn"));
}

#[test]
fn invalid_input_exits_2_naming_the_field() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "x");
    let missing = tmp.path().join("missing.json");
    let o = gossipfpp(&["simulate", "--config", missing.to_str().unwrap(), "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(missing.to_str().unwrap()));

    let o = gossipfpp(&["simulate", "--horizon", "0", "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("horizon must be positive"));

    let o = gossipfpp(&["percolate", "--reps", "0", "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("reps"));

    for p in ["0", "1.5"] {
        let o = gossipfpp(&["scan", "--p", p, "--out", &out]);
        assert_eq!(o.status.code(), Some(2));
        assert!(stderr(&o).contains("`p`"));
    }

    let o = gossipfpp(&["simulate", "--family", "hypercube", "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("family"));

    let o = gossipfpp(&["percolate", "--workers", "0", "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("workers"));
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let tmp = TempDir::new().unwrap();
    let (a, b, c) = (out_arg(&tmp, "a"), out_arg(&tmp, "b"), out_arg(&tmp, "c"));
    let o = gossipfpp(&["verify", "--seed", "7", "--out", &a]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report: VerifyReport =
        serde_json::from_slice(&fs::read(Path::new(&a).join("verify_report.json")).unwrap()).unwrap();
    assert!(report.passed);
    assert!(report.checks.iter().any(|c| c.name == "quality_law_tv"));

    let o = gossipfpp(&["verify", "--seed", "7", "--debug-invert-acceptance", "--out", &b]);
    assert_eq!(o.status.code(), Some(1));
    let report: VerifyReport =
        serde_json::from_slice(&fs::read(Path::new(&b).join("verify_report.json")).unwrap()).unwrap();
    let tv = report.checks.iter().find(|c| c.name == "quality_law_tv").unwrap();
    assert!(!tv.passed && tv.value > 0.05);

    let o = gossipfpp(&["verify", "--p", "1", "--seed", "7", "--out", &c]);
    assert_eq!(o.status.code(), Some(0));
    let report: VerifyReport =
        serde_json::from_slice(&fs::read(Path::new(&c).join("verify_report.json")).unwrap()).unwrap();
    let tv = report.checks.iter().find(|c| c.name == "quality_law_tv").unwrap();
    assert!(tv.value < 1e-12);
}

#[test]
fn scan_outputs_parse_back() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "s");
    let o = gossipfpp(&["scan", "--n-list", "8,16,32", "--p", "0.9", "--reps", "30", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    for fam in ["complete", "ring"] {
        let r: ScanReport =
            serde_json::from_slice(&fs::read(Path::new(&out).join(format!("scan_{fam}.json"))).unwrap()).unwrap();
        assert_eq!(r.table.rows.len(), 3);
        let mut rdr = csv::Reader::from_path(Path::new(&out).join(format!("scan_{fam}.csv"))).unwrap();
        let rows: Vec<ScanRow> = rdr.deserialize().collect::<Result<_, _>>().unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), [8, 16, 32]);
    }
    let mut rdr = csv::Reader::from_path(Path::new(&out).join("scan_separation.csv")).unwrap();
    let rows: Vec<SeparationRow> = rdr.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 3);
}
