use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn entanglers(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entanglers")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_identity(path: &Path, n: usize, kind: &str) {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..n).map(|i| (0..n).map(|j| [if i == j { 1.0 } else { 0.0 }, 0.0]).collect()).collect();
    let kind: Value = serde_json::from_str(kind).unwrap();
    let doc = serde_json::json!({ "n": n, "kind": kind, "rows": rows });
    std::fs::write(path, doc.to_string()).unwrap();
}

#[test]
fn gate_reports_the_fermionic_boundary() {
    let out = entanglers(&["gate", "--kind", "fermionic", "--d", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["exists"], false);
    assert_eq!(v["prediction"]["lhs"], 20);
    assert_eq!(v["prediction"]["rhs"], 20);
    let v = json(&entanglers(&["gate", "--kind", "fermionic", "--d", "8"]));
    assert_eq!(v["exists"], true);
    assert_eq!((v["prediction"]["lhs"].as_u64(), v["prediction"]["rhs"].as_u64()), (Some(24), Some(27)));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(entanglers(&["gate", "--kind", "distinguishable", "--d", "3"]).status.code(), Some(2));
    assert_eq!(entanglers(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(entanglers(&["verify", "/nonexistent/gate.json"]).status.code(), Some(2));
    let out = entanglers(&["construct", "householder", "--d", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("d >= 5"));
}

#[test]
fn identity_gate_yields_a_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.json");
    write_identity(&path, 6, r#"{"family":"bosonic","d":3}"#);
    let out = entanglers(&["verify", path.to_str().unwrap(), "--restarts", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"], "counterexample_found");
    assert!(v["counterexample"]["image_residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["provenance"], "external");
    assert!(v.get("construction_status").is_none());
}

#[test]
fn mismatched_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.json");
    write_identity(&path, 6, r#"{"family":"bosonic","d":3}"#);
    let out = entanglers(&["verify", path.to_str().unwrap(), "--kind", "fermionic"]);
    assert_eq!(out.status.code(), Some(2));
    write_identity(&path, 5, r#"{"family":"bosonic","d":3}"#);
    assert_eq!(entanglers(&["verify", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn constructed_gate_verifies_as_proven() {
    let dir = tempfile::tempdir().unwrap();
    let gate = dir.path().join("p4.json");
    let gate = gate.to_str().unwrap();
    assert_eq!(entanglers(&["construct", "permutation", "--d", "4", "--out", gate]).status.code(), Some(0));
    let out = entanglers(&["verify", gate, "--restarts", "20", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "none_found_within_budget");
    assert_eq!(v["construction_status"], "proven");
    assert_eq!(v["manifest"]["seed"], 5);
    assert!(v["manifest"].get("wall_time_s").is_none());

    let timed = json(&entanglers(&["verify", gate, "--restarts", "4", "--timing"]));
    assert!(timed["manifest"]["wall_time_s"].as_f64().is_some());

    let profile = json(&entanglers(&["profile", gate, "--samples", "500"]));
    assert!(profile["min"].as_f64().unwrap() > 0.0);
}

#[test]
fn certify_and_prevalence_report_json() {
    let out = entanglers(&["certify-appendices", "--d", "5", "--restarts", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v.to_string().contains("e1_positive"));

    let out = entanglers(&["prevalence", "--kind", "fermionic", "--d", "4", "--count", "2", "--restarts", "20"]);
    let v = json(&out);
    assert_eq!(v["counterexamples_found"], 2);
    assert_eq!(v["fraction_none_found"], 0.0);
}
