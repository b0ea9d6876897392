use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde_json::Value;
use tipping::cli::main_with;

fn scratch(tag: &str) -> PathBuf {
    static N: AtomicUsize = AtomicUsize::new(0);
    let dir = std::env::temp_dir().join(format!("tipping-cli-{}-{tag}-{}", std::process::id(), N.fetch_add(1, Ordering::SeqCst)));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> i32 {
    main_with(std::iter::once("tipping").chain(args.iter().copied()))
}

fn run_in(dir: &Path, args: &[&str]) -> i32 {
    let out = dir.to_str().unwrap();
    let mut all = args.to_vec();
    all.extend(["--out", out]);
    run(&all)
}

fn read_json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn configuration_errors_exit_2() {
    let dir = scratch("cfg");
    let cfg = write_config(&dir, r#"{"tol": 1e-3, "colour": "red"}"#);
    assert_eq!(run(&["classify", "--config", &cfg]), 2);
    assert_eq!(run(&["classify", "--config", "/nonexistent/file.json"]), 2);
    assert_eq!(run(&["classify", "--emit-plot-data"]), 2);
    assert_eq!(run(&["classify", "--model", "nope"]), 2);
    assert_eq!(run(&["classify", "--tol=-1"]), 2);
    assert_eq!(run(&["frobnicate"]), 2);
}

#[test]
fn numerical_failures_exit_3() {
    // x' = -x^2 - 1 has no bounded solutions, so there is no pair to certify from
    assert_eq!(run(&["certify", "--model", "polygonal", "--p0=-1", "--c", "1", "--d", "0.5"]), 3);
}

#[test]
fn classify_verdicts() {
    let dir = scratch("classify");
    assert_eq!(run_in(&dir, &["classify", "--model", "polygonal", "--transition", "zero"]), 0);
    assert_eq!(read_json(&dir, "classify.json")["verdict"]["case"], "A_tracking");
    assert_eq!(run_in(&dir, &["classify", "--model", "polygonal", "--transition", "step", "--d", "2"]), 0);
    assert_eq!(read_json(&dir, "classify.json")["verdict"]["case"], "C_tipping");
    assert_eq!(run_in(&dir, &["classify", "--c", "0.05", "--h", "1"]), 0);
    assert_eq!(read_json(&dir, "classify.json")["verdict"]["case"], "A_tracking");
}

#[test]
fn lambda_star_of_pure_square() {
    let dir = scratch("lambda");
    let cfg = write_config(
        &dir,
        r#"{"model": {"id": "polygonal", "p0": 0, "transition": "zero"}, "classify": {"half_span": 200, "burn_in": 200}}"#,
    );
    assert_eq!(run_in(&dir, &["lambda-star", "--config", &cfg, "--tol", "1e-4"]), 0);
    let v = read_json(&dir, "lambda_star.json");
    assert!(v["lambda_star"]["value"].as_f64().unwrap().abs() <= 1e-4);
    let csv = std::fs::read_to_string(dir.join("lambda_star.csv")).unwrap();
    assert!(csv.starts_with("lambda_star,bracket_lo,bracket_hi,tol,iterations\n"));
}

#[test]
fn scan_output_is_reproducible() {
    let (a, b) = (scratch("scan-a"), scratch("scan-b"));
    let cfg = write_config(&a, r#"{"scan": {"kind": "rate-step", "c_grid": [0.5, 3], "grid": [0, 1, 2.5]}}"#);
    assert_eq!(run_in(&a, &["scan", "--config", &cfg, "--workers", "3", "--emit-plot-data"]), 0);
    assert_eq!(run_in(&b, &["scan", "--config", &cfg, "--workers", "1", "--emit-plot-data"]), 0);
    let csv = std::fs::read(a.join("scan.csv")).unwrap();
    assert_eq!(csv, std::fs::read(b.join("scan.csv")).unwrap());
    assert_eq!(std::fs::read(a.join("plot_scan.dat")).unwrap(), std::fs::read(b.join("plot_scan.dat")).unwrap());
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "c,h,lambda_star,bracket_lo,bracket_hi,verdict");
    assert_eq!(lines.count(), 6);
}

#[test]
fn certify_nonincreasing_transition() {
    let dir = scratch("cor55");
    let args = ["certify", "--transition", "neg-arctan", "--c", "2", "--h", "1", "--cross-check"];
    assert_eq!(run_in(&dir, &args), 0);
    let v = read_json(&dir, "certify.json");
    assert_eq!(v["verdict"], "tracking");
    let certs = v["certificates"].as_array().unwrap();
    assert_eq!(certs[0]["criterion"], "Cor5.5");
    assert_eq!(certs.len(), 1);
    assert_eq!(v["lambda_sign"], "tracking");
}

#[test]
fn certify_large_polygonal_size() {
    let dir = scratch("prop613");
    assert_eq!(run_in(&dir, &["certify", "--model", "polygonal", "--c", "1", "--d", "2.5"]), 0);
    let v = read_json(&dir, "certify.json");
    let last = v["certificates"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["criterion"], "Prop6.13");
    assert_eq!(v["verdict"], "tipping_no_bounded");
}

#[test]
fn certify_grid_bundles_are_unmixed() {
    let dir = scratch("grid");
    let cfg = write_config(&dir, r#"{"cross_check": true, "certify": {"c_grid": [0.5, 4], "grid": [0.5, 3]}}"#);
    assert_eq!(run_in(&dir, &["certify", "--config", &cfg]), 0);
    let bundles = read_json(&dir, "certify.json");
    for b in bundles.as_array().unwrap() {
        let fired: Vec<&str> = b["certificates"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|c| c["verdict"] != "not_applicable" && c["margin"].as_f64().unwrap_or(f64::NEG_INFINITY) > c["error_budget"].as_f64().unwrap())
            .map(|c| c["verdict"].as_str().unwrap())
            .collect();
        assert!(fired.iter().all(|v| *v == "tracking") || fired.iter().all(|v| *v != "tracking"), "{fired:?}");
        assert_ne!(b["agrees"], Value::Bool(false));
    }
    let csv = std::fs::read_to_string(dir.join("certify.csv")).unwrap();
    assert!(csv.starts_with("c,h,verdict,criterion,margin,error_budget,lambda_star,lambda_sign,agrees\n"));
}

#[test]
fn hopfield_alpha_scan_flags_the_flip() {
    let dir = scratch("hopfield");
    let cfg = write_config(
        &dir,
        r#"{"model": {"id": "hopfield"}, "scan": {"kind": "param", "param": "alpha", "grid": [0, 0.02, 0.05, 0.1], "flip": true}}"#,
    );
    assert_eq!(run_in(&dir, &["scan", "--config", &cfg]), 0);
    let s = read_json(&dir, "scan_summary.json");
    let (lo, hi) = (s["flip"]["tracking"].as_f64().unwrap(), s["flip"]["tipping"].as_f64().unwrap());
    assert!(0.02 <= lo && lo < hi && hi <= 0.05 && hi - lo <= 1e-4);
    let csv = std::fs::read_to_string(dir.join("scan.csv")).unwrap();
    let verdicts: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(verdicts, ["A_tracking", "A_tracking", "C_tipping", "C_tipping"]);
}

#[test]
fn models_lists_every_id() {
    let dir = scratch("models");
    assert_eq!(run_in(&dir, &["models"]), 0);
    let v = read_json(&dir, "models.json");
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|m| m["id"].as_str().unwrap()).collect();
    for id in ["quadratic:bench53", "quadratic:phase", "polygonal", "climate", "hopfield"] {
        assert!(ids.contains(&id), "{id}");
    }
}
