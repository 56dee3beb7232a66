use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intertwine")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

#[test]
fn construct_degree_two_has_six_monomials() {
    let (code, v) = json(&["construct", "--j", "2", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "v1");
    let e = v["result"]["E"].as_array().unwrap();
    assert_eq!(e.len(), 6);
    for t in e {
        let deg = ["powA", "powB", "powC"].iter().map(|k| t[k].as_u64().unwrap()).sum::<u64>();
        assert_eq!(deg, 2);
    }
}

#[test]
fn construct_zero_is_identity() {
    let (_, v) = json(&["construct", "--j", "0"]);
    let e = v["result"]["E"].as_array().unwrap();
    assert_eq!(e.len(), 1);
    assert_eq!(e[0]["coeff"]["num"], "1");
    assert!(e[0]["coeff"]["den"].as_array().unwrap().is_empty());
}

#[test]
fn construct_latex_and_dimension() {
    let out = run(&["construct", "--j", "1", "--format", "latex"]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("E_{\\alpha,\\beta,1}") && s.contains("\\mathcal{L}_x"));
    let (code, v) = json(&["construct", "--j", "1", "--dim", "3"]);
    assert_eq!(code, 0);
    let dens: Vec<String> = v["result"]["E"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|t| t["coeff"]["den"].as_array().unwrap().iter().map(|f| f.as_str().unwrap().to_string()))
        .collect();
    assert!(dens.contains(&"alpha - 1/2".to_string()), "{dens:?}");
    assert!(dens.iter().all(|f| !f.contains('d')));
}

#[test]
fn symbolic_exit_codes() {
    assert_eq!(run(&["verify-symbolic", "--m-max", "4"]).status.code(), Some(0));
    assert_eq!(run(&["verify-symbolic", "--m-max", "0"]).status.code(), Some(0));
    let (code, v) = json(&["verify-symbolic", "--recursion-sign", "paper-proof"]);
    assert_eq!(code, 1);
    let first = v["result"]["identities"][1]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["passed"] == false)
        .unwrap()
        .clone();
    assert_eq!(first["label"], "m=2");
    assert!(first["difference"].is_string());
    assert_eq!(run(&["verify-symbolic", "--m-max", "7"]).status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["construct"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--field", "Q", "--n", "3", "--alpha", "1", "--beta", "1"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--field", "R", "--n", "2", "--alpha", "1", "--beta", "0.2"]).status.code(), Some(2));
    assert_eq!(run(&["verify-numeric", "--suite", "bound", "--alpha", "0.4"]).status.code(), Some(2));
    assert_eq!(run(&["poles", "--j", "1", "--format", "latex"]).status.code(), Some(2));
}

#[test]
fn spectrum_examples() {
    let (code, v) = json(&["spectrum", "--field", "R", "--n", "11", "--alpha", "0.1", "--beta", "0.1"]);
    assert_eq!(code, 0);
    let comps = v["result"]["components"].as_array().unwrap();
    let params: Vec<f64> = comps.iter().map(|c| c["param"].as_f64().unwrap()).collect();
    assert_eq!(params.len(), 3);
    for (got, want) in params.iter().zip([0.2, 2.2, 4.2]) {
        assert!((got - want).abs() < 1e-12);
    }
    let (code, v) = json(&["spectrum", "--field", "H", "--n", "2", "--alpha", "3", "--beta", "3"]);
    assert_eq!(code, 0);
    assert!(v["result"]["components"].as_array().unwrap().is_empty());
}

#[test]
fn poles_zero_is_empty() {
    let (code, v) = json(&["poles", "--j", "0"]);
    assert_eq!(code, 0);
    assert!(v["result"]["computed_alpha"].as_array().unwrap().is_empty());
    assert!(v["result"]["computed_beta"].as_array().unwrap().is_empty());
    let (_, v) = json(&["poles", "--j", "3"]);
    assert_eq!(v["result"]["contained_in_family"], true);
}

#[test]
fn reports_are_byte_identical_and_replayable() {
    let args = ["verify-numeric", "--suite", "mc", "--d", "1", "--samples", "20000", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let threaded = run(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.stdout, threaded.stdout);

    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["config"]["samples"], 20000);
    assert_eq!(v["config"]["N"], 256);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, v["config"].to_string()).unwrap();
    let replay = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(replay.stdout, a.stdout);
}

#[test]
fn output_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&["spectrum", "--field", "C", "--n", "3", "--alpha", "1", "--beta", "1.5", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "param,j,source\n2.5,0,overgroup-restriction\n");
}

#[test]
fn numeric_suites_small() {
    let (code, v) = json(&["verify-numeric", "--suite", "norms"]);
    assert_eq!(code, 0);
    assert_eq!(v["config"]["tolerance"], 1e-6);
    let (code, v) = json(&["verify-numeric", "--suite", "bound", "--trials", "4", "--grid-n", "64"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["ratios"].as_array().unwrap().len(), 4);
    let (code, _) = json(&["verify-numeric", "--suite", "equivariance", "--trials", "1"]);
    assert_eq!(code, 0);
    let (code, v) = json(&["verify-numeric", "--suite", "equivariance", "--trials", "1", "--tolerance", "1e-20"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
}
