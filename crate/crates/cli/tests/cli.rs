use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn mpolar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpolar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = mpolar(args);
    let code = out.status.code().expect("exited");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json)
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn analyze_svu() {
    let (code, r) = run(&["analyze", &path("svu.json"), "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["analysis"]["omega_star"], serde_json::json!([]));
    assert_eq!(r["feasibility"]["feasible"], false);
    assert_eq!(r["verdicts"]["MI"]["verdict"], "Arbitrage");
    assert_eq!(r["oracle"]["agrees"], true);
}

#[test]
fn check_exit_codes() {
    let (code, r) = run(&["check", &path("svu.json"), "--class", "MI"]);
    assert_eq!((code, r["verdict"].as_str()), (1, Some("Arbitrage")));
    let (code, r) = run(&["check", &path("constant.json"), "--class", "1p", "--verify"]);
    assert_eq!((code, r["verdict"].as_str()), (0, Some("NoArbitrage")));
    assert_eq!(r["oracle"]["agrees"], true);
    let (code, r) = run(&[
        "check",
        &path("multi.json"),
        "--class",
        "openish",
        "--filtration",
        "natural",
    ]);
    assert_eq!((code, r["verdict"].as_str()), (1, Some("Arbitrage")));
}

#[test]
fn defrag_multi() {
    let (code, r) = run(&[
        "defrag",
        &path("multi.json"),
        "--strategy",
        &path("multi_H.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["U"], serde_json::json!({ "1": ["A1"], "2": ["A2"] }));
}

#[test]
fn measure_on_count_na() {
    let (code, r) = run(&["measure", &path("countna.json"), "--support", "q1"]);
    assert_eq!(code, 0);
    assert_eq!(r["weights"], serde_json::json!({ "q1": "1" }));
}

#[test]
fn measure_on_polar_scenario_fails() {
    let (code, _) = run(&["measure", &path("svu.json"), "--support", "w1"]);
    assert_eq!(code, 1);
}

#[test]
fn extract_ex3d() {
    let (code, r) = run(&["extract", &path("ex3d.json"), "--prob", "P_I"]);
    assert_eq!(code, 0);
    assert_eq!(
        r["decomposition"]["carrier"],
        serde_json::json!(["I_a2", "I_a5"])
    );
    let e = &r["extraction"];
    assert!(e.is_object());
    assert_eq!(e["t"], 1);
    assert_ne!(e["gain_probability"], "0");
}

#[test]
fn oracle_agrees_on_fixtures() {
    for name in [
        "svu.json",
        "multi.json",
        "ex3d.json",
        "countna.json",
        "constant.json",
        "ex1000.json",
        "ex1001.json",
    ] {
        let (code, r) = run(&["oracle", &path(name)]);
        assert_eq!(code, 0, "{name}");
        assert_eq!(r["agrees"], true, "{name}");
    }
}

#[test]
fn output_is_deterministic() {
    let a = mpolar(&["analyze", &path("ex3d.json")]);
    let b = mpolar(&["analyze", &path("ex3d.json")]);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn aggregator_round_trips_as_strategy_file() {
    let dir = tempfile::tempdir().unwrap();
    let (_, r) = run(&["analyze", &path("svu.json")]);
    let file = dir.path().join("agg.json");
    std::fs::write(&file, serde_json::to_string(&r["aggregator"]).unwrap()).unwrap();
    let (code, d) = run(&[
        "defrag",
        &path("svu.json"),
        "--strategy",
        file.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    // Every scenario of the market gains at exactly one period.
    let mut gained: Vec<String> = d["U"]
        .as_object()
        .unwrap()
        .values()
        .flat_map(|v| {
            v.as_array()
                .unwrap()
                .iter()
                .map(|s| s.as_str().unwrap().to_string())
        })
        .collect();
    gained.sort();
    assert_eq!(gained, ["w1", "w2", "w3", "w4"]);
    assert_eq!(d["masked"], r["aggregator"]);
}

#[test]
fn out_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    let out = mpolar(&[
        "analyze",
        &path("svu.json"),
        "--out",
        file.to_str().unwrap(),
        "--summary",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("feasible: false"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(r["market"]["scenarios"], 4);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["analyze", bad.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["analyze", "/nonexistent/market.json"]).0, 2);
    assert_eq!(run(&["check", &path("svu.json"), "--class", "nope"]).0, 2);
    assert_eq!(run(&["measure", &path("svu.json"), "--support", "zz"]).0, 2);
    assert_eq!(run(&["extract", &path("svu.json"), "--prob", "nope"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
}
