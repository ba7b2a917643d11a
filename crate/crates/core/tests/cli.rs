//! End-to-end runs of the `roughwave` binary: outputs, exit codes and
//! determinism.

use std::path::Path;
use std::process::Command;

fn roughwave(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_roughwave")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(roughwave(&["--help"]).status.code(), Some(0));
    assert_eq!(roughwave(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(roughwave(&["converge", "--threads", "many"]).status.code(), Some(1));
    assert_eq!(roughwave(&["inflate", "--experiment", "no_such_sweep"]).status.code(), Some(1));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let unknown = write_config(dir.path(), r#"{"experiment": "series_convergence", "colour": 3}"#);
    assert_eq!(roughwave(&["--config", &unknown, "--out", out, "converge"]).status.code(), Some(1));
    let mismatch = write_config(dir.path(), r#"{"experiment": "solve"}"#);
    assert_eq!(roughwave(&["--config", &mismatch, "--out", out, "converge"]).status.code(), Some(1));
    let invalid = write_config(dir.path(), r#"{"experiment": "supercritical", "dim": 2}"#);
    assert_eq!(roughwave(&["--config", &invalid, "--out", out, "inflate"]).status.code(), Some(1));
    assert_eq!(roughwave(&["--config", "/nonexistent/config.json", "--out", out, "converge"]).status.code(), Some(1));
}

#[test]
fn converge_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = roughwave(&["--out", out.to_str().unwrap(), "--threads", "2", "converge"]);
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.starts_with("n,term_norm,log2_term_norm,partial_error\n"));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], serde_json::Value::Bool(true));
    assert_eq!(summary["experiment"], "series_convergence");
    assert!(summary["fit"]["slope"].is_number());
}

#[test]
fn tolerance_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "series_convergence", "tolerance": 1e-30}"#);
    let out = dir.path().join("out");
    let run = roughwave(&["--config", &cfg, "--out", out.to_str().unwrap(), "converge"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stdout).contains("FAIL"));
    assert!(out.join("summary.json").exists());
}

#[test]
fn identical_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "strichartz", "samples": 4, "sweep": [1, 2]}"#);
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let run = roughwave(&["--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "9", "--threads", threads, "strichartz"]);
        assert!(run.status.code() == Some(0) || run.status.code() == Some(2));
        outputs.push(std::fs::read(out.join("results.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
