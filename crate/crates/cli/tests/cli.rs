use std::process::{Command, Output};

use serde_json::Value;

fn geocomb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geocomb")).args(args).env_remove("GEOCOMB_WORKERS").output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = geocomb(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_free_group() {
    let r = json(&["analyze"]);
    assert_eq!(r["command"], "analyze");
    let res = &r["result"];
    assert!((res["lambda"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(res["class"], "semisimple");
    assert_eq!(res["classification"]["semisimple"], true);
    assert_eq!(res["classification"]["p_star"], 1);
    assert_eq!(res["geodesic_check"]["injective"], true);
    assert!((res["growth"]["per_residue"][0].as_f64().unwrap() - 16.0 / 3.0).abs() < 1e-9);
}

#[test]
fn constant_function_averages_to_one() {
    let out = geocomb(&["equidist", "--term", "0,0", "--n-max", "8", "--csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next().unwrap(), "n,path_count,spherical_re,spherical_im,cesaro_re,cesaro_im,mode,stderr");
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[2].parse::<f64>().unwrap(), 1.0, "{row}");
        assert_eq!(cols[4].parse::<f64>().unwrap(), 1.0, "{row}");
    }
}

#[test]
fn tv_vanishes_on_free_group() {
    let r = json(&["tv", "--n-max", "10"]);
    let rows = r["result"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|row| row["tv"].as_f64() == Some(0.0)));
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["equidist", "--preset", "free2_symbolic", "--n-max", "9", "--mode", "mc", "--samples", "5000", "--seed", "3"];
    let a = geocomb(&args);
    let b = geocomb(&[&args[..], &["--workers", "1"]].concat());
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for _ in 0..2 {
        assert!(geocomb(&["sample-geodesic", "--rays", "5", "--n-max", "20", "--out-dir", out]).status.success());
    }
    let first = std::fs::read(dir.path().join("sample-geodesic.json")).unwrap();
    assert!(geocomb(&["sample-geodesic", "--rays", "5", "--n-max", "20", "--out-dir", out]).status.success());
    assert_eq!(std::fs::read(dir.path().join("sample-geodesic.json")).unwrap(), first);
    assert!(dir.path().join("sample-geodesic.csv").exists());
}

#[test]
fn echoed_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = json(&["kappa", "--n-max", "6", "--source", "1", "--term", "1,-1:0.5:0.25", "--basepoint", "sqrt(5)-2,1/7"]);
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, serde_json::to_string(&first["config"]).unwrap()).unwrap();
    let second = json(&["kappa", "--config", cfg.to_str().unwrap()]);
    assert_eq!(first, second);
    let overridden = json(&["kappa", "--config", cfg.to_str().unwrap(), "--n-max", "3"]);
    assert_eq!(overridden["config"]["n_max"], 3);
    assert_eq!(overridden["config"]["source"], 1);
}

#[test]
fn build_combing_writes_a_loadable_automaton() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f2.json");
    let built = json(&["build-combing", "--radius", "6", "--output", path.to_str().unwrap()]);
    assert_eq!(built["result"]["geodesic_check"]["injective"], true);
    let user = format!("user:{}", path.display());
    let r = json(&["analyze", "--preset", &user]);
    assert!((r["result"]["lambda"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn errors_exit_nonzero() {
    let cases: &[&[&str]] = &[
        &["analyze", "--preset", "nope"],
        &["markov-cesaro"],
        &["equidist", "--term", "1,0,0"],
        &["equidist", "--basepoint", "abc,0"],
        &["equidist", "--mode", "fast"],
        &["analyze", "--config", "/nonexistent/cfg.json"],
        &["equidist", "--mode", "exact", "--n-max", "20", "--budget", "1000"],
    ];
    for args in cases {
        let out = geocomb(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty(), "{args:?} printed no error");
    }
}
