use std::process::{Command, Output};

use serde_json::Value;

fn nlm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlm")).args(args).output().expect("spawn nlm")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn formula_and_oracle_agree() {
    let f = json(&nlm(&["nlm-formula", "--lambda", "0.7,0.5,0.4,0.3,0.1"]));
    let o = json(&nlm(&["nlm-oracle", "--lambda", "0.7,0.5,0.4,0.3,0.1"]));
    let (a, b) = (f["value"].as_f64().unwrap(), o["value"].as_f64().unwrap());
    assert!((a - b).abs() < 1e-10);
    assert_eq!(f["method"], "closedForm");
    assert_eq!(o["method"], "oracle");
}

#[test]
fn unnormalised_input_is_rescaled_with_warning() {
    let out = nlm(&["nlm-formula", "--lambda", "1,1,0"]);
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
    assert!(String::from_utf8_lossy(&out.stderr).contains("rescaling"));
}

#[test]
fn formula_rejects_dimension_six() {
    let out = nlm(&["nlm-formula", "--lambda", "1,1,1,1,1,1"]);
    assert!(!out.status.success());
    let v = json(&nlm(&["nlm-oracle", "--lambda", "1,1,1,1,1,1"]));
    assert!(v["note"].is_string());
}

#[test]
fn invariants_from_spectrum_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    std::fs::write(&path, r#"{"dim": 2, "lambdas": [0.8, 0.6]}"#).unwrap();
    let v = json(&nlm(&["invariants", path.to_str().unwrap()]));
    assert!((v["p2"].as_f64().unwrap() - 0.5392).abs() < 1e-12);
    assert!((v["eN"].as_f64().unwrap() - 0.2304).abs() < 1e-12);
    assert!(v["antiFlatness"].is_number() && v["pHalf"].is_number());
}

#[test]
fn optimize_from_state_file_reports_residual() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    std::fs::write(
        &path,
        format!(r#"{{"dim": 2, "amplitudes": [[[{h}, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, {h}]]]}}"#),
    )
    .unwrap();
    let v = json(&nlm(&["nlm-optimize", "--state", path.to_str().unwrap(), "--starts", "4", "--scramble-seed", "1"]));
    assert!(v["residual"].as_f64().unwrap().abs() < 1e-8);
    assert_eq!(v["result"]["perStartValues"].as_array().unwrap().len(), 4);
}

#[test]
fn optimize_with_finite_differences() {
    let v = json(&nlm(&[
        "nlm-optimize", "--lambda", "0.8,0.6", "--starts", "2", "--maxiter", "60", "--grad", "fd", "--grad-tol", "1e-7",
    ]));
    assert!(v["residual"].as_f64().unwrap().abs() < 1e-7);
}

#[test]
fn scan_stats_and_slices() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let csv_s = csv.to_str().unwrap();
    let args = ["scan", "--dim", "4", "--samples", "6", "--starts", "3", "--maxiter", "40", "--seed", "5", "--out", csv_s];
    let summary = json(&nlm(&args));
    assert_eq!(summary["count"], 6);
    let first = std::fs::read(&csv).unwrap();
    json(&nlm(&args));
    assert_eq!(first, std::fs::read(&csv).unwrap());

    let stats = json(&nlm(&["stats", "--in", csv_s, "--threshold", "0.01"]));
    assert_eq!(stats["count"], 6);

    let prefix = dir.path().join("band");
    let out = json(&nlm(&["slice4", "--in", csv_s, "--halfwidth", "1", "--out-prefix", prefix.to_str().unwrap()]));
    let bands = out.as_array().unwrap();
    assert_eq!(bands.len(), 4);
    for b in bands {
        assert_eq!(b["points"], 6);
        let text = std::fs::read_to_string(b["file"].as_str().unwrap()).unwrap();
        assert!(text.starts_with("x,y,p0,p1,p2,lambda3_sq,m_formula,m_numerical,residual\n"));
    }
}

#[test]
fn grids_to_stdout() {
    let out = nlm(&["grid3", "--resolution", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,y,p0,p1,p2,m\n"));
    assert_eq!(text.lines().count(), 1 + 15);

    let out = nlm(&["grid5-slice", "--resolution", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,y,p0,p1,p2,p3,p4,m\n"));
    let centroid = text.lines().find(|l| l.contains("3.3333333333333331e-1,3.3333333333333331e-1")).unwrap();
    let m: f64 = centroid.rsplit(',').next().unwrap().parse().unwrap();
    assert!((m - (27f64 / 11.0).ln()).abs() < 1e-12);
}

#[test]
fn tampered_scan_is_an_invariant_violation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let status = nlm(&["scan", "--dim", "2", "--samples", "2", "--starts", "2", "--out", csv.to_str().unwrap()]);
    assert!(status.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut fields: Vec<String> = lines[1].split(',').map(String::from).collect();
    fields[5] = "5.0e-1".into();
    lines[1] = fields.join(",");
    std::fs::write(&csv, lines.join("\n") + "\n").unwrap();
    let out = nlm(&["stats", "--in", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_arguments_fail() {
    assert!(!nlm(&["scan", "--dim", "7", "--samples", "1"]).status.success());
    assert!(!nlm(&["grid3", "--resolution", "1"]).status.success());
    assert!(!nlm(&["nlm-formula", "--lambda", "0.5,-0.5"]).status.success());
}
