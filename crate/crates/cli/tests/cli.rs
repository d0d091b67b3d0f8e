use std::path::Path;
use std::process::{Command, Output};

use quadwaring_core::calibration::{Calibration, CALIBRATION_ENV};
use quadwaring_core::exactlp::{random_small_lp, simplex_solve};
use serde_json::Value;

fn quadwaring(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_quadwaring"));
    c.args(args).env_remove(CALIBRATION_ENV);
    c
}

fn run(args: &[&str]) -> Output {
    quadwaring(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn base_case_report_has_manifest_and_exact_optima() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["verify-base-cases", "--s", "6", "--n", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["manifest"]["subcommand"], "verify-base-cases");
    assert_eq!(v["manifest"]["calibration_digest"], Calibration::embedded().digest());
    assert!(v["manifest"]["finished"].is_string());
    assert_eq!(v["body"][0]["all_certified"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify-base-cases", "--s", "6"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["counterexample", "--p", "101", "--tau", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["counterexample", "--p", "100"]).status.code(), Some(2));
    assert_eq!(run(&["sumset", "--modulus", "7", "--set", "0,9"]).status.code(), Some(2));
    assert_eq!(run(&["prop-test", "lemma71", "--s", "4", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn malformed_lp_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"objective\": [").unwrap();
    assert_eq!(run(&["lp", "solve", bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["lp", "solve", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn lp_solve_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..8 {
        let problem = random_small_lp(7, i);
        let input = dir.path().join(format!("lp{i}.json"));
        let out = dir.path().join(format!("sol{i}.json"));
        std::fs::write(&input, serde_json::to_string(&problem).unwrap()).unwrap();
        let o = run(&["lp", "solve", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let v = read_json(&out);
        let expected = serde_json::to_value(simplex_solve(&problem)).unwrap();
        assert_eq!(v["body"]["solution"], expected);
        if expected["status"] == "optimal" {
            assert_eq!(v["body"]["certificate_verified"], true);
        }
    }
}

#[test]
fn explicit_sumset_lists_missing_residues() {
    let o = run(&["sumset", "--modulus", "11", "--set", "0,1", "--set", "0,3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["body"]["size"], 4);
    assert_eq!(v["body"]["missing"], serde_json::json!([2, 5, 6, 7, 8, 9, 10]));
    assert_eq!(v["body"]["cauchy_davenport"]["ok"], true);
}

#[test]
fn counterexample_misses_a_residue() {
    let o = run(&["counterexample", "--p", "1009", "--s", "5", "--tau", "0.15"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v["body"]["missing"].as_array().unwrap().is_empty());
}

#[test]
fn energy_writes_csv_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("energy.csv");
    let o = run(&["energy", "--quick", "--max-product", "100", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,n,S,energy,ratio"));
    assert_eq!(lines.next().map(|l| l.starts_with("3,1,2,6,")), Some(true));
}

#[test]
fn prop_test_is_deterministic_per_seed() {
    let args = ["prop-test", "lemma71", "--s", "7", "--n", "3", "--trials", "40", "--seed", "5"];
    let a: Value = serde_json::from_slice(&run(&args).stdout).unwrap();
    let b: Value = serde_json::from_slice(&run(&args).stdout).unwrap();
    assert_eq!(a["body"], b["body"]);
    assert_eq!(a["manifest"]["seeds"], serde_json::json!([5]));
    assert_eq!(a["passed"], true);
}

#[test]
fn calibration_override_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "not json").unwrap();
    let o = quadwaring(&["gauss", "--quick"]).env(CALIBRATION_ENV, &garbage).output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    // Constants far below the empirical suprema make the bound checks fail.
    let mut tight = Calibration::embedded();
    tight.gauss_c = 0.01;
    let path = dir.path().join("tight.json");
    std::fs::write(&path, tight.to_json()).unwrap();
    let o = quadwaring(&["gauss", "--quick", "--p-max", "13"]).env(CALIBRATION_ENV, &path).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);
    assert_eq!(v["manifest"]["calibration_digest"], tight.digest());
}

#[test]
fn all_quick_writes_one_report_per_suite() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["all", "--quick", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read_json(&dir.path().join("summary.json"));
    assert_eq!(summary.as_object().unwrap().len(), 10);
    assert!(summary.as_object().unwrap().values().all(|v| v == true));
    assert_eq!(read_json(&dir.path().join("gauss.json"))["passed"], true);
}
