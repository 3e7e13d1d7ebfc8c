use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qwalk(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk")).args(args).arg("--out").arg(out).output().unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

#[test]
fn walk_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = qwalk(&["walk", "--steps", "2,4", "--p", "0.97", "--classical-reference"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        summary["files"],
        serde_json::json!(["walk_p0.97_n2.csv", "walk_p0.97_n4.csv", "classical_n2.csv", "classical_n4.csv"])
    );
    let csv = std::fs::read_to_string(dir.path().join("classical_n2.csv")).unwrap();
    assert_eq!(csv, "k,probability\n-2,0.25\n-1,0\n0,0.5\n1,0\n2,0.25\n");
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["noise"][0]["p"], 0.97);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn validation_errors_are_json_with_every_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = qwalk(&["walk", "--steps", "5", "--p", "1.5", "--q", "-0.1", "--trajectories", "10"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr_json(&o);
    assert_eq!(err["error"], "invalid_config");
    let fields: Vec<&str> = err["violations"].as_array().unwrap().iter().map(|v| v["field"].as_str().unwrap()).collect();
    assert_eq!(fields, ["noise[0].p", "noise[0].q", "seed"]);
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn usage_errors_are_json() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["walk", "--steps", "x"][..], &["walk", "--steps", "3", "--topology", "torus"], &["bounded"]] {
        let o = qwalk(args, dir.path());
        assert_eq!(o.status.code(), Some(2));
        assert_eq!(stderr_json(&o)["error"], "usage");
    }
    let o = qwalk(&["preset", "fig9"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "unknown_preset");
    let o = qwalk(&["bounded", "--steps", "10"], dir.path());
    assert_eq!(stderr_json(&o)["violations"][0]["field"], "barriers");
}

#[test]
fn bounded_json_format_and_rerun_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let o = qwalk(
        &["bounded", "--steps", "40", "--barrier=-3,5", "--p", "0.99", "--format", "json", "--sequential"],
        &a,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let curve: Value = serde_json::from_str(&std::fs::read_to_string(a.join("bounded_p0.99.json")).unwrap()).unwrap();
    assert_eq!(curve["columns"], serde_json::json!(["step", "cumulative_absorbed"]));
    assert_eq!(curve["rows"].as_array().unwrap().len(), 40);

    let b = dir.path().join("b");
    let manifest = a.join("manifest.json");
    let o = qwalk(&["run", manifest.to_str().unwrap()], &b);
    assert!(o.status.success());
    assert_eq!(std::fs::read(a.join("bounded_p0.99.json")).unwrap(), std::fs::read(b.join("bounded_p0.99.json")).unwrap());
}

#[test]
fn circle_and_symmetrized_options() {
    let dir = tempfile::tempdir().unwrap();
    let o = qwalk(&["walk", "--steps", "12", "--topology", "circle:5", "--protocol", "symmetrized", "--q", "0.9"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("walk_q0.9_n12.csv")).unwrap();
    assert_eq!(text.lines().count(), 6);

    let o = qwalk(&["walk", "--steps", "4", "--coin", "halfpi", "--initial", "zero"], dir.path());
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["nonstandard"].as_array().unwrap().len(), 1);
}

#[test]
fn preset_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = qwalk(&["preset", "fig2"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["files"].as_array().unwrap().len(), 8);
}
