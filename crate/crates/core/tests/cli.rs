use std::path::Path;

use serde_json::Value;
use switchstab::cli::{run, EXIT_NO_INPUT, EXIT_OK, EXIT_PRECONDITION, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("switchstab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const ROTATIONS: &str = r#"{"family": "rotations", "a": 1, "b": 3, "beta": 2}"#;
const MATRICES: &str = r#"{"A0": [[-1, 3], [-0.3333333333333333, -1]], "A1": [[-1, -0.3333333333333333], [3, -1]], "lambda": 0.5, "beta": 2}"#;

#[test]
fn check_reports_criterion_and_window() {
    let d = tempfile::tempdir().unwrap();
    let spec = write_spec(d.path(), "m.json", MATRICES);
    let (code, out, _) = call(&["check", "--spec", &spec]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["holds"], true);
    let w = v["lambda_window"].as_array().unwrap();
    assert!(w[0].as_f64().unwrap() < 0.5 && w[1].as_f64().unwrap() > 0.5);
}

#[test]
fn failing_criterion_still_exits_zero() {
    let d = tempfile::tempdir().unwrap();
    let spec = write_spec(
        d.path(),
        "m.json",
        r#"{"A0": [[-1, 0], [0, -2]], "A1": [[-2, 0], [0, -1]]}"#,
    );
    let (code, out, _) = call(&["check", "--spec", &spec]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["holds"], false);
}

#[test]
fn chi_mc_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let spec = write_spec(d.path(), "m.json", MATRICES);
    let args = [
        "chi-mc",
        "--spec",
        &spec,
        "--horizon",
        "500",
        "--replicas",
        "4",
        "--seed",
        "11",
    ];
    let (c1, o1, _) = call(&args);
    let (c2, o2, _) = call(&args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(o1, o2);
    let (_, o3, _) = call(&[
        "chi-mc",
        "--spec",
        &spec,
        "--horizon",
        "500",
        "--replicas",
        "4",
        "--seed",
        "12",
    ]);
    assert_ne!(o1, o3);
}

#[test]
fn chi_exact_grid_writes_csv() {
    let d = tempfile::tempdir().unwrap();
    let spec = write_spec(d.path(), "r.json", ROTATIONS);
    let out = d.path().join("chi.csv");
    let (code, _, _) = call(&[
        "chi-exact",
        "--spec",
        &spec,
        "--beta-grid",
        "0.1:10:4:log",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "beta,chi_exact,abs_error,method");
    assert_eq!(rows.len(), 5);
    let chis: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(chis.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn beta_c_value() {
    let d = tempfile::tempdir().unwrap();
    let spec = write_spec(d.path(), "r.json", ROTATIONS);
    let (code, out, _) = call(&["beta-c", "--spec", &spec]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["beta_c"].as_f64().unwrap() - 7.177385516293443).abs() < 1e-9);
}

#[test]
fn beta_c_without_transition_is_precondition_error() {
    let d = tempfile::tempdir().unwrap();
    let spec = write_spec(
        d.path(),
        "r.json",
        r#"{"family": "rotations", "a": 1, "b": 1.5}"#,
    );
    let (code, _, err) = call(&["beta-c", "--spec", &spec]);
    assert_eq!(code, EXIT_PRECONDITION);
    assert!(err.contains("no transition"), "{err}");
}

#[test]
fn certificate_encodes_infinite_beta1() {
    let d = tempfile::tempdir().unwrap();
    let spec = write_spec(
        d.path(),
        "m.json",
        r#"{"A0": [[-1, 0], [0, -1]], "A1": [[-1, 0], [0, -1]]}"#,
    );
    let (code, out, _) = call(&["certificate", "--spec", &spec]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["beta1_finite"], false);
    assert!(v["beta1"].is_null());
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let bad = write_spec(
        d.path(),
        "bad.json",
        r#"{"A0": [[1, 0], [0, -1]], "A1": [[-1, 0], [0, -1]]}"#,
    );
    let (code, _, err) = call(&["classify", "--spec", &bad]);
    assert_eq!(code, EXIT_PRECONDITION);
    assert_eq!(err.trim(), "switchstab: A0 not Hurwitz");

    let garbage = write_spec(d.path(), "g.json", "{ not json");
    assert_eq!(call(&["check", "--spec", &garbage]).0, EXIT_NO_INPUT);
    assert_eq!(
        call(&["check", "--spec", "/definitely/missing.json"]).0,
        EXIT_NO_INPUT
    );
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["check"]).0, EXIT_USAGE);

    let spec = write_spec(d.path(), "m.json", MATRICES);
    assert_eq!(call(&["beta-c", "--spec", &spec]).0, EXIT_USAGE);
    assert_eq!(
        call(&["sweep", "--spec", &spec, "--beta-grid", "1:2"]).0,
        EXIT_USAGE
    );

    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("chi-mc"));
}

#[test]
fn sweep_matrix_spec_has_no_exact_column() {
    let d = tempfile::tempdir().unwrap();
    let spec = write_spec(d.path(), "m.json", MATRICES);
    let (code, out, _) = call(&[
        "sweep",
        "--spec",
        &spec,
        "--beta-grid",
        "1:3:2",
        "--horizon",
        "200",
        "--replicas",
        "2",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l == "beta,chi_mc,chi_mc_stderr"));
    assert!(out.lines().next().unwrap().starts_with("# command=sweep"));
}

#[test]
fn products_writes_running_estimate() {
    let d = tempfile::tempdir().unwrap();
    let spec = write_spec(d.path(), "r.json", ROTATIONS);
    let out = d.path().join("run.csv");
    let (code, json, _) = call(&[
        "products",
        "--spec",
        &spec,
        "--steps",
        "3000",
        "--replicas",
        "2",
        "--variant",
        "alternating",
        "--every",
        "1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["estimates"][0]["variant"], "alternating");
    assert!(v["estimates"][0]["predicted"].is_f64());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("alternating,"))
            .count(),
        3
    );
}

#[test]
fn expm_at_zero_is_identity() {
    let d = tempfile::tempdir().unwrap();
    let spec = write_spec(d.path(), "m.json", MATRICES);
    let (code, out, _) = call(&["expm", "--spec", &spec, "--time", "0"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["exp_A0"], serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));
}

#[test]
fn density_csv_header() {
    let d = tempfile::tempdir().unwrap();
    let spec = write_spec(
        d.path(),
        "j.json",
        r#"{"family": "jordan", "b": 2, "beta": 1}"#,
    );
    let (code, out, _) = call(&["density", "--spec", &spec, "--grid", "16"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l == "theta,weight_i0,weight_i1"));
}
