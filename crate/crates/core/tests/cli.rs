//! End-to-end runs of the `padic-gibbs` binary.

use std::path::Path;
use std::process::Command;

use serde_json::Value;

const FOUR_TEN: &str = r#"{"p": 3, "precision": 32, "k": 2, "depth": 2,
 "lambda": {"mode": "homogeneous",
            "table": {"++": {"log_of": "4"}, "+-": {"log_of": "10"}, "-+": "0", "--": {"log_of": "4"}}},
 "field": {"mode": "translation-invariant"}}"#;

fn run(args: &[&str]) -> (i32, Value, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_padic-gibbs")).args(args).output().unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report, out.stdout)
}

fn config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn norm_of_a_rational() {
    let (code, report, _) = run(&["norm", "--p", "2", "--rational", "10/1"]);
    assert_eq!(code, 0);
    assert_eq!(report["command"], "norm");
    assert_eq!(report["result"]["norm_exponent"], -1);
}

#[test]
fn translation_invariant_solve_passes_its_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "four_ten.json", FOUR_TEN);
    let (code, report, _) = run(&["ti-solve", "--config", &cfg]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["result"]["checks"]["near_one"], true);
    assert_eq!(report["result"]["checks"]["residual_ok"], true);
}

#[test]
fn compatibility_of_solved_and_arbitrary_fields() {
    let dir = tempfile::tempdir().unwrap();
    let solved = FOUR_TEN.replace(r#"{"mode": "translation-invariant"}"#, r#"{"mode": "solve", "seed": {"/1/1": "3"}}"#);
    let cfg = config(dir.path(), "solved.json", &solved);
    let (code, report, _) = run(&["compat", "--config", &cfg]);
    assert_eq!(code, 0, "{report}");

    let explicit = FOUR_TEN.replace(r#"{"mode": "translation-invariant"}"#, r#"{"mode": "zero"}"#);
    let cfg = config(dir.path(), "zero.json", &explicit);
    let (code, _, _) = run(&["compat", "--config", &cfg]);
    assert_eq!(code, 1);
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "bad.json", r#"{"p": 3, "unknown": true}"#);
    let (code, report, _) = run(&["uniqueness", "--config", &cfg]);
    assert_eq!(code, 2);
    assert!(report["error"]["kind"].is_string());
    assert!(report["error"]["message"].as_str().unwrap().contains("malformed"));

    let (code, report, _) = run(&["norm", "--p", "4", "--rational", "1/2"]);
    assert_eq!(code, 2);
    assert!(report["error"].is_object());
}

#[test]
fn reports_are_deterministic_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "four_ten.json", FOUR_TEN);
    let out = dir.path().join("report.json");
    let out = out.to_str().unwrap();
    let (_, _, first) = run(&["measure", "--config", &cfg, "--out", out]);
    let (_, _, second) = run(&["measure", "--config", &cfg]);
    assert_eq!(first, second);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(written, serde_json::from_slice::<Value>(&first).unwrap());
    assert!(!Path::new(&format!("{out}.partial")).exists());
}

#[test]
fn ising_report_for_the_two_adic_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "ising.json", r#"{"p": 2, "k": 2, "depth": 2, "ising": {"J": "4", "eta": "4"}}"#);
    let (code, report, _) = run(&["ising-report", "--config", &cfg, "--windows", "3"]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["result"]["unique"]["value"], true);
    assert_eq!(report["result"]["bounded"]["value"], false);
}
