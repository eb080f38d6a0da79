use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn so42(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_so42"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

/// Report bytes with the timestamp line removed.
fn stable_bytes(dir: &Path) -> String {
    std::fs::read_to_string(dir.join("report.json"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn algebra_verify_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = so42(tmp.path(), &["--out", "r", "algebra", "--verify", "--export"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&tmp.path().join("r"));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["passed"], true);
    assert_eq!(r["result"]["jacobi_triples"], 455);
    assert_eq!(r["config"]["subcommand"], "algebra");
    assert!(tmp.path().join("r/structure_table.json").exists());
}

#[test]
fn check_verdicts_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = so42(tmp.path(), &["--out", "a", "check", "--controls", "L1,L2,A3,S,C", "--nmax", "4"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(report(&tmp.path().join("a"))["result"]["verdict"], "conditions-satisfied");
    let drift = so42(tmp.path(), &["--out", "b", "check", "--controls", "none"]);
    assert_eq!(code(&drift), 1);
    assert_eq!(report(&tmp.path().join("b"))["result"]["verdict"], "not-satisfied");
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["simulate", "--schedule", "missing.json"],
        &["frobnicate"],
        &["check", "--controls", "L1,Q7"],
        &["--tol", "commutator=-1", "algebra"],
        &["--tol", "nonsense=1", "algebra"],
        &["optimize", "--segments", "0"],
        &["optimize", "--target", "2,2,0"],
        &["--config", "absent.toml", "algebra"],
    ];
    for args in cases {
        let out = so42(tmp.path(), args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn reports_are_deterministic_apart_from_timestamp() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["--out", "r", "--seed", "5", "check", "--controls", "L1,L2,A3,S,C", "--probes", "6"];
    assert_eq!(code(&so42(tmp.path(), &args)), 0);
    let first = stable_bytes(&tmp.path().join("r"));
    assert_eq!(code(&so42(tmp.path(), &args)), 0);
    assert_eq!(stable_bytes(&tmp.path().join("r")), first);
    assert!(report(&tmp.path().join("r"))["timestamp"].as_str().unwrap().starts_with("unix:"));
}

#[test]
fn flags_override_config_file_over_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("c.toml"), "n_max = 3\nseed = 11\nprobes = 4\ncommutator = 1e-8\n").unwrap();
    assert_eq!(code(&so42(tmp.path(), &["--config", "c.toml", "--out", "f", "rep"])), 0);
    let r = report(&tmp.path().join("f"));
    assert_eq!(r["config"]["n_max"], 3);
    assert_eq!(r["config"]["seed"], 11);
    assert_eq!(r["config"]["tolerances"]["commutator"], 1e-8);
    assert_eq!(r["config"]["tolerances"]["hermiticity"], 1e-12);

    let args = ["--config", "c.toml", "--out", "g", "--seed", "2", "--tol", "commutator=1e-7", "rep", "--nmax", "5"];
    assert_eq!(code(&so42(tmp.path(), &args)), 0);
    let r = report(&tmp.path().join("g"));
    assert_eq!(r["config"]["n_max"], 5);
    assert_eq!(r["config"]["seed"], 2);
    assert_eq!(r["config"]["tolerances"]["commutator"], 1e-7);

    std::fs::write(tmp.path().join("bad.toml"), "colour = \"blue\"\n").unwrap();
    assert_eq!(code(&so42(tmp.path(), &["--config", "bad.toml", "rep"])), 2);
}

#[test]
fn verify_is_an_alias_for_classical() {
    let tmp = tempfile::tempdir().unwrap();
    let out = so42(tmp.path(), &["--out", "v", "verify", "--sign", "negative", "--samples", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&tmp.path().join("v"))["config"]["subcommand"], "classical");
}

#[test]
fn rep_export_writes_matrices() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&so42(tmp.path(), &["--out", "m", "rep", "--nmax", "3", "--export"])), 0);
    let dir = tmp.path().join("m");
    for f in ["matrices/L1.csv", "matrices/D.csv", "matrices/H.csv", "matrices/basis.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
}

#[test]
fn optimize_then_simulate_roundtrip() {
    let tmp = tempfile::tempdir().unwrap();
    let out = so42(tmp.path(), &["--out", "o", "optimize", "--controls", "S,C,D", "--target", "2,0,0", "--segments", "4", "--budget", "800"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("o");
    let fid = report(&dir)["result"]["fidelity"].as_f64().unwrap();
    let csv = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("time,pop_n1,"));
    assert_eq!(csv.lines().count(), 6);

    let sim = ["--out", "s", "simulate", "--controls", "S,C,D", "--schedule", "o/schedule.json", "--target", "2,0,0"];
    assert_eq!(code(&so42(tmp.path(), &sim)), 0);
    let again = report(&tmp.path().join("s"))["result"]["target_fidelity"].as_f64().unwrap();
    assert!((again - fid).abs() < 1e-9, "{again} vs {fid}");

    let strict = ["--out", "p", "optimize", "--controls", "L3", "--target", "2,0,0", "--segments", "2", "--budget", "50", "--min-fidelity", "0.5"];
    assert_eq!(code(&so42(tmp.path(), &strict)), 1);
}
