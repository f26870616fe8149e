use std::path::Path;
use std::process::{Command, Output};

use sisi_core::harness::EvidenceReport;
use sisi_core::report::{read_json, Table};

const ENDEMIC: &str = "0.2,0.3,0.7,0.6,1,0.3";

fn sisi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sisi")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn validate_reports_admissibility() {
    let o = sisi(&[
        "validate", "--b", "0.2", "--alpha", "0.3", "--beta1", "0.7", "--beta2", "0.6", "--k1", "1", "--k2", "0.3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("QSO: yes"));
    let o = sisi(&["validate", "--params", ENDEMIC, "--alpha", "0.9"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("QSO: no") && text.contains("alpha + b"), "{text}");
}

#[test]
fn step_matches_worked_example() {
    let o = sisi(&["step", "--params", ENDEMIC, "--start", "0.25,0.25,0.25,0.25", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Table::read(o.stdout.as_slice()).unwrap();
    let out: Vec<f64> = t.rows[1][1..].iter().map(|v| v.parse().unwrap()).collect();
    for (a, b) in out.iter().zip([0.343125, 0.181875, 0.22625, 0.24875]) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn fixed_points_lists_interior_root() {
    let o = sisi(&[
        "fixed-points",
        "--b",
        "0.2",
        "--alpha",
        "0.3",
        "--beta1",
        "0.7",
        "--beta2",
        "0.6",
        "--k1",
        "1",
        "--k2",
        "0.3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("λ1") && text.contains("λ17") && text.contains("A = 0.17663"), "{text}");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["simulate", "--params", ENDEMIC, "--start", "0.25,0.25,0.25,0.25", "--max-iters", "0"],
        vec!["validate", "--b", "0.2"],
        vec!["validate", "--params", "0.2,0.3"],
        vec!["step", "--params", ENDEMIC],
        vec!["validate", "--params", ENDEMIC, "--bogus"],
        vec!["evidence", "--scenario", "conjecture9"],
        vec!["frobnicate"],
    ] {
        let o = sisi(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn config_file_max_iters_zero_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        &format!(r#"{{"params": "{ENDEMIC}", "start": [0.25,0.25,0.25,0.25], "max-iters": 0}}"#),
    );
    assert_eq!(sisi(&["simulate", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        write(dir.path(), "c.json", r#"{"b": 0.2, "alpha": 0.3, "beta1": 0.7, "beta2": 0.6, "k1": 1, "k2": 0.3}"#);
    assert!(stdout(&sisi(&["validate", "--config", &cfg])).starts_with("QSO: yes"));
    assert!(stdout(&sisi(&["validate", "--config", &cfg, "--alpha", "0.9"])).starts_with("QSO: no"));
}

#[test]
fn domain_errors_exit_with_one() {
    let o = sisi(&["step", "--params", ENDEMIC, "--start", "0.5,0.5,0.5,0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = sisi(&["classify", "--params", ENDEMIC, "--start", "0.25,0.25,0.25,0.25"]);
    assert_eq!(o.status.code(), Some(1));
    let o = sisi(&["step", "--params", "-0.2,0.3,0.7,0.6,1,0.3", "--start", "1,0,0,0"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn simulate_converges_to_interior_point() {
    let o = sisi(&["simulate", "--params", ENDEMIC, "--start", "0.4,0.3,0.2,0.1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: sisi_core::report::Document<sisi_core::Trajectory> = read_json(&stdout(&o)).unwrap();
    assert!(doc.data.converged());
    assert!((doc.data.last().x() - 0.617_968_333_6).abs() < 1e-8);
}

#[test]
fn evidence_output_is_byte_identical_for_equal_seeds() {
    let run = |fmt: &str, seed: &str| {
        sisi(&["evidence", "--scenario", "conjecture2", "--trials", "30", "--seed", seed, "--format", fmt])
    };
    for fmt in ["json", "csv"] {
        let a = run(fmt, "42");
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, run(fmt, "42").stdout);
        assert_ne!(a.stdout, run(fmt, "43").stdout);
    }
    let doc: sisi_core::report::Document<EvidenceReport> = read_json(&stdout(&run("json", "42"))).unwrap();
    assert_eq!(doc.seed, Some(42));
    assert!(doc.data.is_conserved());
    let t = Table::read(run("csv", "42").stdout.as_slice()).unwrap();
    assert_eq!((t.kind.as_str(), t.seed, t.rows.len()), ("evidence", Some(42), 30));
}

#[test]
fn sweep_writes_machine_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(
        dir.path(),
        "grid.json",
        r#"{"ranges": {"k1": {"min": 0.2, "max": 1.4, "steps": 5}},
            "fixed": {"b": 0.2, "alpha": 0.3, "beta1": 0.7, "beta2": 0.6, "k2": 0.3},
            "initial_points": {"count": 2, "seed": 5}}"#,
    );
    let out = dir.path().join("sweep.csv");
    let out = out.to_str().unwrap();
    let o = sisi(&["sweep", "--grid", &grid, "--task", "limit", "--format", "csv", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read(out).unwrap();
    let t = Table::read(first.as_slice()).unwrap();
    assert_eq!((t.kind.as_str(), t.seed, t.rows.len()), ("sweep", Some(5), 10));
    assert_eq!(&t.header[2..8], ["b", "alpha", "beta1", "beta2", "k1", "k2"]);

    sisi(&["sweep", "--grid", &grid, "--task", "limit", "--format", "csv", "--out", out]);
    assert_eq!(std::fs::read(out).unwrap(), first);

    let json = dir.path().join("sweep.json");
    let o = sisi(&["sweep", "--grid", &grid, "--task", "classify", "--out", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&json).unwrap();
    let doc: sisi_core::report::Document<serde_json::Value> = read_json(&text).unwrap();
    assert_eq!(doc.kind, "sweep");
}

#[test]
fn every_machine_output_reparses() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["validate", "--params", ENDEMIC],
        vec!["step", "--params", ENDEMIC, "--start", "0.25,0.25,0.25,0.25"],
        vec!["simulate", "--params", ENDEMIC, "--start", "0.4,0.3,0.2,0.1"],
        vec!["fixed-points", "--params", ENDEMIC],
        vec!["classify", "--params", ENDEMIC],
        vec!["evidence", "--scenario", "theorem3", "--trials", "4"],
    ];
    for args in cases {
        let csv = sisi(&[args.as_slice(), &["--format", "csv"]].concat());
        assert_eq!(csv.status.code(), Some(0), "{args:?}");
        let t = Table::read(csv.stdout.as_slice()).unwrap();
        assert!(t.rows.iter().all(|r| r.len() == t.header.len()));
        let json = sisi(&[args.as_slice(), &["--format", "json"]].concat());
        let doc: sisi_core::report::Document<serde_json::Value> = read_json(&stdout(&json)).unwrap();
        assert_eq!(doc.kind, t.kind);
    }
}
