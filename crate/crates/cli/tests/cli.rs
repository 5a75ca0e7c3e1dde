use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mdist(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdist"))
        .args(args)
        .current_dir(dir)
        .env_remove("MDIST_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn constants_at_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = mdist(&["constants", "--theta", "2"], dir.path());
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["gamma_mid"].as_f64().unwrap() - 1.2071).abs() < 1e-4);
    assert!((v["x_star_out"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-6);
}

#[test]
fn sweep_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = mdist(&["sweep", "--theta", "1.5:64:log", "--m", "5,10,20"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,m,rule,bound_kind,value"));
    assert_eq!(lines.count(), 24 * 3 * 6);
    let file = dir.path().join("sweep.csv");
    let out = mdist(&["sweep", "--theta", "2", "--m", "5", "--out", file.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    assert!(std::fs::read_to_string(file).unwrap().starts_with("theta,"));
}

#[test]
fn oracle_and_simulate_agree() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("inst.json"),
        r#"{"kind":"euclidean","dim":1,"voters":[[0.25],[0.6]],"candidates":[[0.0],[1.0],[0.5]]}"#,
    )
    .unwrap();
    std::fs::write(dir.path().join("model.json"), r#"{"model":"pl","theta":2.0}"#).unwrap();
    for rule in ["plurality", "copeland", "borda", "random_dictator"] {
        let common = ["--instance", "inst.json", "--model", "model.json", "--rule", rule];
        let exact = json(&mdist(&[&["oracle"][..], &common].concat(), dir.path()));
        let est = json(&mdist(&[&["simulate", "--trials", "20000"][..], &common].concat(), dir.path()));
        let d = exact["distortion"].as_f64().unwrap();
        let (mean, se) = (est["mean_ratio"].as_f64().unwrap(), est["stderr"].as_f64().unwrap());
        assert!((mean - d).abs() <= 3.0 * se + 1e-12, "{rule}: {mean} +- {se} vs {d}");
    }
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("inst.json"),
        r#"{"kind":"euclidean","dim":1,"voters":[[0.25],[0.6],[0.9]],"candidates":[[0.0],[1.0]]}"#,
    )
    .unwrap();
    std::fs::write(dir.path().join("model.json"), r#"{"model":"pl","theta":2.0}"#).unwrap();
    let args = ["simulate", "--instance", "inst.json", "--model", "model.json", "--rule", "plurality", "--trials", "50"];
    let run = |seed: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_mdist"))
            .args(args)
            .current_dir(dir.path())
            .env("MDIST_SEED", seed)
            .output()
            .unwrap();
        json(&out)
    };
    assert_eq!(run("99")["seed"], 99);
    assert_eq!(run("99"), run("99"));
}

#[test]
fn gen_instance_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = mdist(&["gen-instance", "--theorem", "rd-lb", "--params", "m=3,n=100,theta=2", "--out", "rd"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out);
    assert!((summary["predicted_distortion"].as_f64().unwrap() - 2.98).abs() < 1e-12);
    let sim = mdist(
        &["simulate", "--instance", "rd.instance.json", "--model", "rd.model.json", "--rule", "random_dictator", "--trials", "200"],
        dir.path(),
    );
    assert!(sim.status.success());
    assert!((json(&sim)["mean_ratio"].as_f64().unwrap() - 2.98).abs() < 1e-9);

    let out = mdist(&["gen-instance", "--theorem", "generic-lb", "--params", "n=50", "--out", "pair"], dir.path());
    assert!(out.status.success());
    assert_eq!(json(&out).as_array().unwrap().len(), 2);
    assert!(dir.path().join("pair.mirror.model.json").exists());
}

#[test]
fn verify_dual_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = mdist(&["verify-dual", "--theta", "2", "--alpha", "0.5"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["pass"], true);
    let mu = json(&ok)["mu_star"].as_f64().unwrap();
    let bad = mdist(&["verify-dual", "--theta", "2", "--alpha", "0.5", "--mu", &(2.0 * mu).to_string()], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["pass"], false);
}

#[test]
fn usage_and_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| mdist(args, dir.path()).status.code();
    assert_eq!(code(&["bogus"]), Some(2));
    assert_eq!(code(&["constants"]), Some(2));
    assert_eq!(code(&["constants", "--theta", "0.5"]), Some(2));
    assert_eq!(code(&["sweep", "--theta", "1:x", "--m", "5"]), Some(2));
    assert_eq!(code(&["gen-instance", "--theorem", "rd-lb", "--params", "m=3", "--out", "x"]), Some(2));
    assert_eq!(code(&["gen-instance", "--theorem", "nope", "--params", "n=3", "--out", "x"]), Some(2));
    std::fs::write(dir.path().join("bad.json"), r#"{"kind":"matrix","n_voters":1,"dist":[[0,1,5],[1,0,1],[5,1,0]]}"#).unwrap();
    std::fs::write(dir.path().join("model.json"), r#"{"model":"pl","theta":2.0}"#).unwrap();
    assert_eq!(code(&["oracle", "--instance", "bad.json", "--model", "model.json", "--rule", "borda"]), Some(1));
    assert_eq!(code(&["oracle", "--instance", "missing.json", "--model", "model.json", "--rule", "borda"]), Some(1));
    assert_eq!(code(&["gen-instance", "--theorem", "borda-lb", "--params", "m=5,n=10,theta=4", "--out", "x"]), Some(1));
}
