mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::fixture;
use loglap::io::sha256_hex;
use tempfile::TempDir;

fn loglap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loglap"))
        .args(args)
        .output()
        .unwrap()
}

fn run_in(dir: &Path, cmd: &str, problem: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        cmd,
        problem.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    loglap(&args)
}

fn reference() -> PathBuf {
    fixture("refproblem_n2.toml")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Copy of the reference problem with both kernel strengths replaced.
fn with_epsilon(dir: &Path, eps: f64) -> PathBuf {
    let text = fs::read_to_string(reference()).unwrap();
    let text = text
        .lines()
        .map(|l| {
            if l.starts_with("epsilon") {
                format!("epsilon = {eps:e}")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let path = dir.join("problem.toml");
    fs::write(&path, text).unwrap();
    path
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn constants_prints_everything_and_passes() {
    let out = TempDir::new().unwrap();
    let o = run_in(out.path(), "constants", &reference(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    for key in [
        "C =",
        "K =",
        "M =",
        "epsilon =",
        "sigma =",
        "threshold =",
        "admissible = true",
    ] {
        assert!(stdout.contains(key), "{key} missing from\n{stdout}");
    }
    let m = manifest(out.path());
    assert_eq!(m["command"], "constants");
    let bytes = fs::read(reference()).unwrap();
    assert_eq!(m["input_sha256"], sha256_hex(&bytes));
    assert_eq!(m["seed"], 7);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    let k = &m["constants"];
    let ratio = k["epsilon"].as_f64().unwrap() / k["threshold"].as_f64().unwrap();
    assert!((ratio - 0.5).abs() < 1e-15, "{ratio}");
}

#[test]
fn solve_writes_bundle_and_passes() {
    let out = TempDir::new().unwrap();
    let o = run_in(out.path(), "solve", &reference(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let iters = fs::read_to_string(out.path().join("iterations.csv")).unwrap();
    assert!(iters.starts_with("iter,diff_norm,rate\n"));
    let sol = fs::read_to_string(out.path().join("solution.csv")).unwrap();
    assert!(sol.starts_with("x,u0_1,up_1,u_1,u0_2,up_2,u_2\n"));
    assert_eq!(sol.lines().count(), 4097);
    assert_eq!(manifest(out.path())["pass"], true);
}

#[test]
fn every_subcommand_writes_a_manifest_and_passes() {
    for cmd in [
        "constants",
        "solve-linear",
        "solve",
        "contraction-probe",
        "sweep-eps",
        "continuity",
        "residual",
    ] {
        let out = TempDir::new().unwrap();
        let o = run_in(out.path(), cmd, &reference(), &[]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stderr(&o));
        assert_eq!(manifest(out.path())["command"], cmd);
    }
}

#[test]
fn csv_numbers_round_trip_and_use_lf() {
    let out = TempDir::new().unwrap();
    run_in(out.path(), "sweep-eps", &reference(), &[]);
    let text = fs::read_to_string(out.path().join("sweep.csv")).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.starts_with("eps,up_norm,bound\n"));
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(format!("{v:.16e}"), field);
        }
    }
    let text = fs::read_to_string(out.path().join("constants.csv")).unwrap();
    assert!(text.starts_with("name,value\n"));
}

#[test]
fn continuity_table_layout() {
    let out = TempDir::new().unwrap();
    let o = run_in(
        out.path(),
        "continuity",
        &reference(),
        &["--alpha-offsets", "0.04,0.02"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(out.path().join("continuity.csv")).unwrap();
    assert!(text.starts_with("grad_distance,solution_distance,bound\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn identical_runs_give_identical_csv() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [&a, &b] {
        let o = run_in(d.path(), "solve", &reference(), &["--seed", "7"]);
        assert_eq!(o.status.code(), Some(0));
    }
    for name in [
        "iterations.csv",
        "solution.csv",
        "residual.csv",
        "constants.csv",
    ] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs");
    }
}

#[test]
fn probe_is_reproducible_from_seed() {
    let (a, b, c) = (
        TempDir::new().unwrap(),
        TempDir::new().unwrap(),
        TempDir::new().unwrap(),
    );
    run_in(
        a.path(),
        "contraction-probe",
        &reference(),
        &["--seed", "3", "--pairs", "10"],
    );
    run_in(
        b.path(),
        "contraction-probe",
        &reference(),
        &["--seed", "3", "--pairs", "10"],
    );
    run_in(
        c.path(),
        "contraction-probe",
        &reference(),
        &["--seed", "4", "--pairs", "10"],
    );
    let read = |d: &TempDir| fs::read(d.path().join("contraction.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(manifest(a.path())["seed"], 3);
}

#[test]
fn sweep_above_threshold_is_refused() {
    let out = TempDir::new().unwrap();
    let o = run_in(out.path(), "sweep-eps", &reference(), &["--eps", "0.3,0.1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("threshold") && err.contains("2.528878320420"),
        "{err}"
    );
    assert!(!out.path().join("sweep.csv").exists());
}

#[test]
fn inadmissible_solve_needs_override() {
    let dir = TempDir::new().unwrap();
    let problem = with_epsilon(dir.path(), 0.3);
    let out = dir.path().join("out");
    let o = run_in(&out, "solve", &problem, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("threshold"));
    let o = run_in(&out, "solve", &problem, &["--override-eps"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = manifest(&out);
    assert_eq!(m["override_eps"], true);
    assert_eq!(m["constants"]["admissible"], false);
}

#[test]
fn unconverged_solve_fails_certification() {
    let out = TempDir::new().unwrap();
    let o = run_in(out.path(), "solve", &reference(), &["--max-iter", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(manifest(out.path())["pass"], false);
    let o = run_in(out.path(), "residual", &reference(), &["--max-iter", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn parse_and_usage_errors_exit_two() {
    let out = TempDir::new().unwrap();
    let o = run_in(out.path(), "solve", &fixture("zero_drift.toml"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("drift required"));
    let o = run_in(out.path(), "constants", &fixture("unknown_key.toml"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dampening"));
    assert_eq!(loglap(&["frobnicate", "x.toml"]).status.code(), Some(2));
    assert_eq!(loglap(&["solve"]).status.code(), Some(2));
    assert_eq!(
        loglap(&["solve", "/nonexistent.toml"]).status.code(),
        Some(2)
    );
    let o = run_in(out.path(), "solve", &reference(), &["--tol", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}
