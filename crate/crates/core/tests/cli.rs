use std::fs;
use std::process::Command;

use sdcomb::cli::{run, EXIT_CAPABILITY, EXIT_DATA, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sdcomb").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn value<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
}

#[test]
fn test_subcommand_on_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("x.txt");
    fs::write(&data, "# two atoms\n0\n1\n").unwrap();
    let path = data.to_str().unwrap();
    let (code, out, _) = call(&["test", "--data", path, "--theta", "1/2,1/2", "--eta", "1", "--reps", "200"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(value(&out, "statistic"), "0.25");
    assert_eq!(value(&out, "witness"), "0.5");
    assert_eq!(value(&out, "evaluator"), "exact");
}

#[test]
fn same_seed_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("x.txt");
    let text: String = (1..=40).map(|i| format!("{}\n", 1.0 / (i as f64 / 41.0))).collect();
    fs::write(&data, text).unwrap();
    let path = data.to_str().unwrap();
    let args = ["test", "--data", path, "--theta", "0.5,0.5", "--eta", "1", "--reps", "150", "--seed", "8"];
    let a = call(&args);
    let b = call(&args);
    assert_eq!(a, b);
    let c = call(&[&args[..], &["--method", "cauchy"]].concat());
    assert_eq!(c.0, 0);
    assert_eq!(value(&c.1, "method"), "cauchy");
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.txt");
    fs::write(&data, "1\nfoo\n").unwrap();
    let path = data.to_str().unwrap();
    let (code, _, err) = call(&["test", "--data", path, "--theta", "1", "--eta", "1"]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("line 2"), "{err}");

    fs::write(&data, "1\n2\n3\n").unwrap();
    let (code, _, _) = call(&["test", "--data", path, "--theta", "1,1", "--eta", "1", "--method", "cauchy"]);
    assert_eq!(code, EXIT_CAPABILITY);
    let (code, _, _) = call(&["test", "--data", path, "--theta", "1", "--eta", "1", "--alpha", "1.5"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = call(&["test", "--data", path, "--theta", "1", "--eta", "1", "--grid-range", "5:9", "--evaluator", "grid"]);
    assert_eq!(code, EXIT_DATA);
}

#[test]
fn simulate_from_config_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.toml");
    fs::write(
        &cfg,
        "families = [\"pareto(sh=1)\"]\nn = [30]\nmethods = [\"cauchy\"]\nreplications = 50\nreps = 100\ngrid_points = 256\n\n[[pairs]]\ntheta = \"1/2,1/2\"\neta = \"1\"\n",
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let (code, _, err) = call(&["simulate", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.contains("family,param,theta,eta,n,method,rate,se,seconds"), "{text}");
    assert!(text.contains("pareto,sh=1,0.5;0.5,1,30,cauchy,"), "{text}");

    fs::write(&cfg, "families = [\"pareto(sh=1)\"]\nbogus = 3\n").unwrap();
    assert_eq!(call(&["simulate", "--config", cfg.to_str().unwrap()]).0, EXIT_DATA);
}

#[test]
fn check_class_reports_every_property() {
    let (code, out, _) = call(&["check-class", "--family", "piecewise"]);
    assert_eq!(code, 0, "{out}");
    let holds: Vec<&str> = out.lines().filter_map(|l| l.strip_prefix("holds=")).collect();
    assert_eq!(holds, ["false", "false", "true", "true"]);
}

#[test]
fn covariance_forms_agree() {
    let (code, out, _) = call(&["covariance", "--family", "cauchy", "--theta", "1/2,1/2", "--x", "0", "--y", "0"]);
    assert_eq!(code, 0);
    let a: f64 = value(&out, "covariance").parse().unwrap();
    let b: f64 = value(&out, "cauchy_form").parse().unwrap();
    assert!((a - 1.0 / 3.0).abs() < 1e-6 && (a - b).abs() < 1e-9, "{out}");
}

#[test]
fn binary_runs() {
    let bin = env!("CARGO_BIN_EXE_sdcomb");
    let out = Command::new(bin).args(["majorize", "0.2,0.3,0.5", "0.1,0.1,0.8"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("relation="), "{text}");
    let out = Command::new(bin).arg("nonsense").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}
