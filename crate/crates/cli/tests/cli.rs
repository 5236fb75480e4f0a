use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn appell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_appell"))
        .args(args)
        .output()
        .expect("run appell")
}

fn value(out: &Output) -> (f64, f64) {
    let text = String::from_utf8_lossy(&out.stdout);
    let mut it = text.split_whitespace().map(|t| t.parse::<f64>().unwrap());
    (it.next().unwrap(), it.next().unwrap())
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn eval_bessel_half_order() {
    let out = appell(&["eval", "bessel_k", "nu=0.5", "z=1"]);
    assert_eq!(out.status.code(), Some(0));
    let (re, im) = value(&out);
    let expected = (std::f64::consts::PI / 2.0).sqrt() * (-1f64).exp();
    assert!((re - expected).abs() < 1e-15 && im == 0.0);
    assert!(stderr(&out).contains("bessel_k"));
}

#[test]
fn eval_f1pv_at_origin_is_beta_ratio() {
    let f = value(&appell(&["eval", "f1pv", "b1=1", "b2=1", "b3=1", "c1=3", "x=0", "y=0", "p=1", "nu=0"]));
    let b = value(&appell(&["eval", "beta_pv", "x=1", "y=2", "p=1", "nu=0"]));
    // B(1, 2) = 1/2
    assert!((f.0 - 2.0 * b.0).abs() < 1e-13);
}

#[test]
fn eval_routes_agree() {
    let args = ["eval", "f1pv", "b1=1", "b2=1", "b3=1", "c1=3", "x=0.3", "y=0.4", "p=1", "nu=0.5"];
    let series = value(&appell(&[&args[..], &["--route", "series"]].concat()));
    let integral = value(&appell(&[&args[..], &["--route", "integral"]].concat()));
    assert!((series.0 - integral.0).abs() < 1e-12);
    assert!((series.0 - 1.092873469696065e-2).abs() < 1e-13);
}

#[test]
fn eval_complex_parameter() {
    let out = appell(&["eval", "bessel_k", "nu=0.7", "z=1+1i"]);
    assert_eq!(out.status.code(), Some(0));
    let (_, im) = value(&out);
    assert!(im != 0.0);
}

#[test]
fn eval_pole_is_domain_error() {
    let out = appell(&["eval", "f1pv", "b1=1", "b2=1", "b3=1", "c1=1", "x=0.1", "y=0.1", "p=1", "nu=0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("pole"));
}

#[test]
fn eval_missing_parameter_is_domain_error() {
    let out = appell(&["eval", "beta_pv", "x=1", "y=2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing parameter p"));
}

#[test]
fn unknown_flag_exits_64_with_usage() {
    let out = appell(&["verify", "--bogus"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("Usage"));
    let out = appell(&["eval", "not_a_function"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn convergence_failure_exits_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_appell"))
        .args(["eval", "f1", "b1=1", "b2=1", "b3=1", "c1=2", "x=0.99", "y=0.99", "--route", "series"])
        .env("APPELL_MAX_TERMS", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn bad_quadrature_levels_env_is_domain_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_appell"))
        .args(["eval", "beta_pv", "x=1", "y=2", "p=1", "nu=0"])
        .env("APPELL_QUAD_LEVELS", "99")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn report(path: &Path) -> Vec<Value> {
    serde_json::from_slice::<Value>(&std::fs::read(path).unwrap())
        .unwrap()
        .as_array()
        .unwrap()
        .clone()
}

#[test]
fn verify_recursion_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = appell(&["verify", "recursion", "--trials", "100", "--seed", "7", "--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("suite=recursion pass=600/600 max_rel_err="), "{text}");
    let records = report(&path);
    assert_eq!(records.len(), 600);
    assert!(records.iter().all(|r| r["status"] == "pass" && r["elapsed_ms"] == 0.0));
}

#[test]
fn verify_meijer_records_skips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let out = appell(&["verify", "meijer", "--trials", "2", "--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let records = report(&path);
    assert!(records
        .iter()
        .any(|r| r["status"] == "skipped" && r["skip_reason"] == "cos(πν)=0 degeneracy" && r["params"]["nu"] == 0.5));
    assert!(records.iter().filter(|r| r["status"] == "skipped").all(|r| r["lhs"][0].is_null()));
}

#[test]
fn verify_failures_exit_1() {
    let out = appell(&["verify", "routes", "--trials", "3", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    assert_eq!(appell(&["verify", "nope"]).status.code(), Some(64));
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        appell(&["verify", "bessel", "--trials", "15", "--seed", "9", "--report", path.to_str().unwrap()]);
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn golden_writes_and_rechecks() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = appell(&["golden", path.to_str().unwrap(), "--check"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# oracle: ") && header.ends_with("nodes=4000, date-free"));
    assert_eq!(lines.next().unwrap(), "p,nu,b1,b2,b3,c1,x,y,value_re,value_im,oracle");
    assert!(lines.count() >= 50);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("suite=golden pass=60/60"));
}

#[test]
fn golden_bad_path_exits_2() {
    let out = appell(&["golden", "/nonexistent-dir/g.csv"]);
    assert_eq!(out.status.code(), Some(2));
}
