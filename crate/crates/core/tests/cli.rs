use std::process::{Command, Output};

use coherence_lab::qcore::StateVector;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coherence-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn state_at(v: &Value, key: &str) -> StateVector {
    serde_json::from_value(v[key].clone()).expect("state reloads")
}

#[test]
fn scan_is_byte_identical_for_a_seed() {
    let args = ["scan", "--system", "spin", "--jA", "1", "--jB", "0.5", "--jC", "0.5", "--samples", "40", "--seed", "11"];
    let a = run(&args);
    let b = bin().args(args).env("COHERENCE_LAB_THREADS", "1").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["seed"], 11);
}

#[test]
fn random_chsh_state_is_reproducible() {
    let args = ["chsh", "--state", "random-two-qubit", "--seed", "5", "--n-starts", "8"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    let max = v["max_value"].as_f64().unwrap();
    let horo = v["horodecki_max"].as_f64().unwrap();
    assert!((max - horo).abs() < 1e-6, "{max} vs {horo}");
}

#[test]
fn split_states_round_trip() {
    let out = run(&["split", "--system", "spin", "--jA", "1", "--jB", "0.5", "--jC", "0.5", "--zeta", "0.3-0.8i"]);
    let v = stdout_json(&out);
    for key in ["input_state", "split_state", "factor_b", "factor_c"] {
        let s = state_at(&v, key);
        let again: StateVector = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, again, "{key}");
    }
    assert_eq!(v["is_product"], true);
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn state_file_feeds_chsh() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["split", "--system", "spin", "--jA", "1", "--jB", "0.5", "--jC", "0.5", "--m", "0"]);
    let v = stdout_json(&out);
    let path = dir.path().join("state.json");
    std::fs::write(&path, serde_json::to_string(&v["split_state"]).unwrap()).unwrap();
    let from_file = stdout_json(&run(&["chsh", "--state-file", path.to_str().unwrap(), "--strategy", "analytic-qubit"]));
    let named = stdout_json(&run(&["chsh", "--state", "split-spin1-m0", "--strategy", "analytic-qubit"]));
    assert_eq!(from_file["max_value"], named["max_value"]);
    assert!((named["max_value"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-10);
    assert_eq!(named["violation_found"], true);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"command": "series", "case": "heisenberg", "order": 5, "tau": [0.5, 0.0], "f0_b": "2"}"#,
    )
    .unwrap();
    let v = stdout_json(&run(&["series", "--config", cfg.to_str().unwrap(), "--order", "7"]));
    assert_eq!(v["order"], 7);
    assert_eq!(v["equation"]["case"], "heisenberg");
    assert_eq!(v["f0_b"], serde_json::json!([2.0, 0.0]));
    assert_eq!(v["a"].as_array().unwrap().len(), 8);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn config_for_another_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "scan"}"#).unwrap();
    assert_eq!(run(&["series", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, r#"{"not_a_key": 1}"#).unwrap();
    assert_eq!(run(&["series", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let args = ["evolve", "--drive", "constant", "--lambda", "0.2", "--tmax", "3", "--N", "20", "--points", "7"];
    let direct = run(&args);
    let mut with_out: Vec<&str> = args.to_vec();
    with_out.extend(["--output", path.to_str().unwrap()]);
    let quiet = run(&with_out);
    assert!(quiet.status.success() && quiet.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    let text = String::from_utf8(direct.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t,re_alpha,im_alpha,eta,fidelity"));
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn evolve_json_reports_closed_form_alongside_numerics() {
    let v = stdout_json(&run(&[
        "evolve", "--drive", "sinusoid", "--lambda", "0.1+0.1i", "--drive-frequency", "0.7",
        "--tmax", "4", "--N", "25", "--points", "5", "--dt", "0.004", "--format", "json",
    ]));
    let num = v["alpha"].as_array().unwrap();
    let exact = v["alpha_closed_form"].as_array().unwrap();
    for (a, b) in num.iter().zip(exact) {
        let d = (a[0].as_f64().unwrap() - b[0].as_f64().unwrap()).hypot(a[1].as_f64().unwrap() - b[1].as_f64().unwrap());
        assert!(d < 1e-6, "{d}");
    }
    let final_state: StateVector = serde_json::from_value(v["final_state"].clone()).unwrap();
    assert_eq!(final_state.dim(), 26);
}

#[test]
fn spin_evolve_csv_header() {
    let out = run(&["evolve", "--system", "spin", "--j", "1.5", "--beta0", "1", "--beta-plus", "0.2i", "--theta0", "0.4", "--tmax", "2", "--points", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,re_zeta,im_zeta,theta,phi,fidelity\n"));
    for line in text.lines().skip(1) {
        let fid: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((fid - 1.0).abs() < 1e-8);
    }
}

#[test]
fn exit_codes() {
    // usage and validation problems
    assert_eq!(run(&["scan", "--system", "spin", "--jA", "1", "--jB", "0.5", "--jC", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["split", "--system", "spin", "--jA", "1", "--jB", "0.5", "--jC", "0.5", "--zeta", "1+"]).status.code(), Some(2));
    assert_eq!(run(&["split", "--system", "fock", "--N", "5", "--alpha", "3"]).status.code(), Some(2));
    assert_eq!(run(&["split", "--system", "spin", "--jA", "1", "--jB", "1", "--jC", "0.5", "--m", "0"]).status.code(), Some(2));
    assert_eq!(run(&["chsh", "--state", "split-spin1-m0"]).status.code(), Some(2));
    assert_eq!(run(&["scan", "--system", "spin", "--jA", "1", "--jB", "0.5", "--jC", "0.5", "--seed", "1", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // numerical failure
    let out = run(&["series", "--tau", "1e300"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerical failure"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_thread_setting_is_a_config_error() {
    let out = bin()
        .args(["series"])
        .env("COHERENCE_LAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
