use std::process::{Command, Output};

use skewinfo::linalg;
use skewinfo::matfile::{MatrixFile, MatrixKind};

fn skewinfo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewinfo")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_row(o: &Output) -> Vec<String> {
    stdout(o).lines().last().unwrap().split(',').map(str::to_string).collect()
}

#[test]
fn eval_prints_kernel_values() {
    let o = skewinfo(&["eval", "--metric", "wy", "--x", "1", "--y", "1"]);
    assert!(o.status.success());
    let row = last_row(&o);
    assert_eq!(row[0], "wy");
    assert_eq!(row[3].parse::<f64>().unwrap(), 1.0);
    let o = skewinfo(&["eval", "--metric", "kubo", "--x", "2", "--y", "1"]);
    assert_eq!(last_row(&o)[5], "non-regular");
}

#[test]
fn skew_from_inline_and_file_agree() {
    let dir = tempfile::tempdir().unwrap();
    let rho_path = dir.path().join("rho.toml");
    let obs_path = dir.path().join("a.toml");
    MatrixFile::from_matrix(MatrixKind::Density, &linalg::diag(&[0.9, 0.1])).write(&rho_path).unwrap();
    MatrixFile::from_matrix(MatrixKind::Observable, &linalg::pauli_x()).write(&obs_path).unwrap();
    let inline = skewinfo(&["skew", "--metric", "wy", "--rho", "diag(0.9,0.1)", "--obs", "sigmax"]);
    let files = skewinfo(&[
        "skew",
        "--metric",
        "wy",
        "--rho",
        rho_path.to_str().unwrap(),
        "--obs",
        obs_path.to_str().unwrap(),
    ]);
    assert!(inline.status.success() && files.status.success());
    assert_eq!(last_row(&inline), last_row(&files));
    let i: f64 = last_row(&inline)[1].parse().unwrap();
    assert!((i - 0.4).abs() < 1e-12);
}

#[test]
fn malformed_matrix_file_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "kind = \"density\"\ndim = 2\nentries = [[0.5, 0], [0, 0], [0, 0]]\n").unwrap();
    let o = skewinfo(&["skew", "--metric", "wy", "--rho", path.to_str().unwrap(), "--obs", "sigmaz"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.toml") && err.contains("dim² = 4"), "{err}");
}

#[test]
fn verify_exit_codes() {
    let ok = skewinfo(&["verify", "--suite", "sandwich", "--trials", "20", "--metric", "wyd", "--p", "0.3"]);
    assert_eq!(ok.status.code(), Some(0));
    let faulty = skewinfo(&["verify", "--suite", "sandwich", "--trials", "20", "--metric", "wy", "--fault", "1e-3"]);
    assert_eq!(faulty.status.code(), Some(1));
    assert!(stdout(&faulty).contains("FAIL"));
    let bad = skewinfo(&["verify", "--suite", "sandwich", "--dims", "2,x"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = skewinfo(&["verify", "--suite", "correlation", "--trials", "8", "--dims", "2,3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "correlation");
    assert_eq!(v["failures"], 0);
}

#[test]
fn verify_is_deterministic_in_seed() {
    let run = |seed: &str| stdout(&skewinfo(&["verify", "--suite", "convexity", "--trials", "10", "--seed", seed]));
    assert_eq!(run("7"), run("7"));
}

#[test]
fn reconstruct_and_constant() {
    let o = skewinfo(&["reconstruct", "--metric", "bridge", "--gamma", "0.5", "--route", "h"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(last_row(&o)[5], "pass");
    let o = skewinfo(&["reconstruct", "--metric", "variant-bridge", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = skewinfo(&["constant", "--metric", "extreme", "--lambda", "1"]);
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), 0.5);
}

#[test]
fn corr_imaginary_part() {
    let o = skewinfo(&["corr", "--metric", "bures", "--rho", "diag(0.7,0.3)", "--obs", "sigmax", "--obs2", "sigmay"]);
    let row = last_row(&o);
    assert!(row[1].parse::<f64>().unwrap().abs() < 1e-12);
    assert!((row[2].parse::<f64>().unwrap() - 0.4).abs() < 1e-12);
}
