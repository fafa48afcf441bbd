use std::process::{Command, Output};

use serde_json::Value;

const PARAMS: [&str; 10] = ["--eta", "1/4", "--theta", "1/2", "--tau", "1/5", "--q", "1/3", "--t", "1"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qharness"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    });
    (v, out.status.code().unwrap())
}

fn with_params<'a>(cmd: &'a str, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend(PARAMS);
    v.extend(rest);
    v
}

#[test]
fn verify_reports_exact_residuals() {
    let (v, code) = run_json(&with_params("verify", &["--beta", "-1/2"]));
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 14);
    assert!(checks.iter().all(|c| c["exact_zero"] == true && c["pass"] == true));
}

#[test]
fn verify_notes_dirac_collapse_at_q_minus_one() {
    let (v, code) = run_json(&["verify", "--q", "-1", "--eta", "1", "--theta", "1/2"]);
    assert_eq!(code, 0);
    assert!(v["note"].as_str().unwrap().contains("point mass"));
}

#[test]
fn generator_routes_agree_exactly() {
    let (v, code) = run_json(&with_params("generator", &["--x", "1/2", "--poly", "0,0,0,1"]));
    assert_eq!(code, 0);
    assert_eq!(v["agreement"], true);
    let routes = v["routes"].as_array().unwrap();
    assert_eq!(routes.len(), 4);
    assert_eq!(routes[0]["value"], routes[1]["value"]);
    assert_eq!(v["reference"], "147/80");
}

#[test]
fn generator_y_squared_is_one_plus_eta_x() {
    let (v, _) = run_json(&with_params("generator", &["--x", "-2/3", "--poly", "0,0,1"]));
    assert_eq!(v["reference"], "5/6");
}

#[test]
fn generator_at_q_one_offers_only_the_algebraic_route() {
    let (v, code) = run_json(&["generator", "--q", "1", "--eta", "1/2", "--x", "1", "--poly", "0,0,0,1"]);
    assert_eq!(code, 0);
    let routes = v["routes"].as_array().unwrap();
    assert!(routes[0].get("value").is_some());
    assert!(routes[1]["error"].as_str().unwrap().contains("q = 1"));
}

#[test]
fn measure_csv_is_a_probability_rule() {
    let out = run(&with_params("measure", &["--x", "1/2", "--format", "csv"]));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("node,weight"));
    let mass: f64 = lines
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((mass - 1.0).abs() < 1e-8, "mass {mass}");
}

#[test]
fn measure_density_samples() {
    let (v, code) = run_json(&with_params("measure", &["--x", "1/2", "--samples", "5"]));
    assert_eq!(code, 0);
    assert_eq!(v["measure"]["family"], "AskeyWilson");
    assert_eq!(v["density_samples"].as_array().unwrap().len(), 5);
}

#[test]
fn transition_reports_bipoisson_time_change() {
    let (v, code) = run_json(&with_params("transition", &["--s", "1/2", "--x", "1/2"]));
    assert_eq!(code, 0);
    assert_eq!(v["bipoisson"]["theta"], "23/40");
    assert_eq!(v["bipoisson"]["s"], "4/5");
    assert_eq!(v["bipoisson"]["t"], "13/10");
    assert!((v["measure"]["mass"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn fdcheck_observes_first_order() {
    let (v, code) = run_json(&with_params("fdcheck", &["--x", "1/2", "--poly", "0,0,0,1"]));
    assert_eq!(code, 0);
    let order = v["ladder"]["observed_order"].as_f64().unwrap();
    assert!((0.8..=1.2).contains(&order), "order {order}");
}

#[test]
fn float_mode_accepts_decimals() {
    let (v, code) = run_json(&["generator", "--float", "--eta", "0.25", "--q", "-0.5", "--x", "0.5", "--poly", "0,0,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["domain"], "f64");
    assert!((v["reference"].as_f64().unwrap() - 1.125).abs() < 1e-15);
}

#[test]
fn out_writes_file() {
    let path = std::env::temp_dir().join(format!("qharness-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = run(&with_params("solve", &["--window", "6", "--out", p]));
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["equation"]["exact_zero"], true);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["measure", "--x", "abc"],
        vec!["measure", "--x", "0", "--window", "3"],
        vec!["measure", "--x", "0", "--tol", "0.1"],
        vec!["measure", "--x", "0", "--q", "2"],
        vec!["solve", "--format", "csv"],
        vec!["transition", "--s", "2", "--t", "1", "--x", "0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn inadmissible_state_is_reported_per_route() {
    let out = run(&["generator", "--eta", "1", "--theta", "-3", "--q", "1/2", "--x", "-5", "--poly", "0,0,0,1"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let mf = &v["routes"][1];
    assert!(mf.get("error").is_some(), "{mf}");
}
