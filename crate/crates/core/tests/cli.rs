use std::path::Path;
use std::process::{Command, Output};

fn conicond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conicond")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read_csv(prefix: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn bounds_print_six_significant_digits() {
    let out = conicond(&["bounds", "tail", "--p", "3", "--d", "1", "--sigma", "1", "--t", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "3.50740\n");
    let out = conicond(&["bounds", "expectation", "--problem", "matrix-inversion", "--n", "2", "--sigma", "1"]);
    assert_eq!(stdout(&out), "9.65888\n");
}

#[test]
fn linear_bound_outside_its_range() {
    let out = conicond(&["bounds", "linear", "--p", "2", "--d", "1", "--sigma", "1", "--eps", "0.9"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("not applicable"));
}

#[test]
fn invalid_parameters_exit_2() {
    assert_eq!(conicond(&["bounds", "tube", "--p", "3", "--d", "1", "--sigma", "0", "--eps", "0.1"]).status.code(), Some(2));
    assert_eq!(conicond(&["bounds", "tail", "--p", "3", "--d", "1", "--sigma", "1", "--t", "0.5"]).status.code(), Some(2));
    assert_eq!(conicond(&["estimate", "tail", "--problem", "poly-sys", "--degrees", "2", "--sigma", "1", "--out", "x"]).status.code(), Some(2));
    assert_eq!(conicond(&["verify", "bogus"]).status.code(), Some(2));
}

#[test]
fn estimate_tail_is_dominated() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("tail");
    let out = conicond(&[
        "estimate", "tail", "--problem", "matrix-inversion", "--n", "2", "--sigma", "1", "--samples", "100000",
        "--seed", "1", "--t-grid", "logspace:2:1000:5", "--out", prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let rows = read_csv(&prefix);
    assert_eq!(rows[0].join(","), "t,empirical,ci_low,ci_high,bound,dominated");
    assert_eq!(rows.len(), 6);
    assert!(rows[1..].iter().all(|r| r[5] == "true"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("tail.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["sample_count"], 100_000);
    assert!(manifest["command_line"].as_str().unwrap().contains("--t-grid"));
}

#[test]
fn estimate_logmean_below_bound() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("logmean");
    let out = conicond(&[
        "estimate", "logmean", "--problem", "matrix-inversion", "--n", "2", "--sigma", "1", "--samples", "50000",
        "--seed", "2", "--out", prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv(&prefix);
    assert_eq!(rows[0].join(","), "empirical_mean_ln,ci_low,ci_high,bound,dominated");
    let mean: f64 = rows[1][0].parse().unwrap();
    assert!(mean <= 9.65888);
}

#[test]
fn estimate_subsphere_tube_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("tube");
    let out = conicond(&[
        "estimate", "tube", "--variety", "subsphere", "--p", "3", "--sigma", "1", "--eps-grid", "0.3",
        "--samples", "100000", "--seed", "3", "--out", prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv(&prefix);
    assert_eq!(rows[0].join(","), "eps,empirical_ratio,ci_low,ci_high,bound,dominated");
    let v: Vec<f64> = rows[1][..5].iter().map(|s| s.parse().unwrap()).collect();
    // O_2 O_0 J_{3,1}(θ) / O_3 with J_{3,1}(θ) = θ/2 + sin 2θ / 4.
    let theta = 0.3f64.asin();
    let exact = 4.0 * std::f64::consts::PI * 2.0 * (theta / 2.0 + (2.0 * theta).sin() / 4.0)
        / (2.0 * std::f64::consts::PI.powi(2));
    let half = 0.5 * (v[3] - v[2]);
    assert!((v[1] - exact).abs() <= 3.0 * half, "{} vs {exact}", v[1]);
}

#[test]
fn center_file_is_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let center = dir.path().join("center.json");
    std::fs::write(&center, "[2.0, 0.0, 0.0, 0.0]").unwrap();
    let prefix = dir.path().join("det");
    let out = conicond(&[
        "estimate", "tube", "--variety", "determinant", "--n", "2", "--sigma", "0.5", "--samples", "5000",
        "--center", "file", "--center-file", center.to_str().unwrap(), "--out", prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr).unwrap().contains("normalizing"));
}

#[test]
fn verify_subcommands() {
    let out = conicond(&["verify", "jintegrals"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = conicond(&["verify", "kinematic", "--p", "3", "--i", "1", "--alpha", "0.6", "--samples", "1000000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = conicond(&["verify", "wilkinson", "--n", "2", "--trials", "1000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(conicond(&["verify", "weyltube"]).status.code(), Some(0));
}
