use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn trfds(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trfds"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn key(o: &Output, name: &str) -> String {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{name}=")).map(str::to_string))
        .unwrap_or_else(|| panic!("no `{name}` in output:\n{}", stdout(o)))
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn solve_rosenbrock_writes_history() {
    let dir = tempfile::tempdir().unwrap();
    let o = trfds(&["solve", "--problem", "rosenbrock", "--budget", "100"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let history = fs::read_to_string(dir.path().join("history.csv")).unwrap();
    let mut lines = history.lines();
    assert_eq!(lines.next(), Some("eval,best_f"));
    assert!(lines.count() <= 300);
    assert!(key(&o, "f_best").parse::<f64>().unwrap() <= 1e-6);
    assert!(dir.path().join("iterations.csv").exists());
}

#[test]
fn invalid_alpha_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = trfds(&["solve", "--alpha", "1.5"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(!dir.path().join("history.csv").exists());
}

#[test]
fn calibrate_writes_dataset_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let o = trfds(&["calibrate", "--seed", "7", "--budget", "350"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let data = fs::read_to_string(dir.path().join("dataset.csv")).unwrap();
    assert_eq!(data.lines().next(), Some("t,Y,Z"));
    assert_eq!(data.lines().count(), 72);
    let fit = fs::read_to_string(dir.path().join("fit.csv")).unwrap();
    assert_eq!(fit.lines().next(), Some("t,Y_fit,Z_fit,Y_obs,Z_obs"));
    assert!(key(&o, "evaluations").parse::<usize>().unwrap() <= 350);
    let f0: f64 = key(&o, "f0").parse().unwrap();
    let f: f64 = key(&o, "f_best").parse().unwrap();
    assert!(f < f0);
}

#[test]
fn outputs_are_bitwise_reproducible() {
    for args in [
        vec!["bench", "--problems", "rosenbrock,bard,quadratic:4", "--budget", "20", "--seed", "5"],
        vec!["calibrate", "--seed", "3", "--budget", "60"],
        vec!["solve", "--problem", "quadratic:6", "--seed", "2", "--budget", "30"],
    ] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert_eq!(code(&trfds(&args, a.path())), 0);
        assert_eq!(code(&trfds(&args, b.path())), 0);
        assert_eq!(dir_contents(a.path()), dir_contents(b.path()), "{args:?}");
    }
}

#[test]
fn bench_writes_profiles_per_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let o = trfds(
        &[
            "bench",
            "--problems",
            "rosenbrock,bard",
            "--mode",
            "unrelaxable",
            "--bounds",
            "0.1,20",
            "--tolerances",
            "0.1,0.001",
            "--budget",
            "30",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["suite.csv", "profile_tol1e-1.csv", "profile_tol1e-1.svg", "profile_tol1e-3.csv", "profile_tol1e-3.svg"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let profile = fs::read_to_string(dir.path().join("profile_tol1e-1.csv")).unwrap();
    assert_eq!(profile.lines().next(), Some("alpha,solver,fraction"));
}

#[test]
fn bench_rejects_bad_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let o = trfds(&["bench", "--problems", "rosenbrock", "--tolerances", "1.5"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn diagnose_prints_key_value_lines() {
    let dir = tempfile::tempdir().unwrap();
    let o = trfds(&["diagnose", "--problem", "nonconvex:3", "--bounds", "0.2,3"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.contains('=')), "{text}");
    assert_eq!(key(&o, "gap_violations"), "0");
    assert_eq!(key(&o, "radius_violations"), "0");
    assert!(text.lines().any(|l| l.starts_with("eta=")));
    assert!(text.lines().any(|l| l.starts_with("psi=")));
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# overrides\nalpha = 1.5\nproblem = sphere:3\nbudget = 10\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = trfds(&["solve", "--config", cfg], dir.path());
    assert_eq!(code(&o), 1);
    let o = trfds(&["solve", "--config", cfg, "--alpha", "0.1"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(key(&o, "problem"), "sphere:3");
    assert!(key(&o, "evaluations").parse::<usize>().unwrap() <= 40);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "colour = blue\n").unwrap();
    let o = trfds(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn external_objective_is_minimized() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = r#"while read -r line; do echo "$line" | awk '{ s = 0; for (i = 1; i <= NF; i++) s += ($i - 2) ^ 2; printf "%.17g\n", s }'; done"#;
    let o = trfds(&["solve", "--command", cmd, "--x0", "0,0", "--budget", "40"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(key(&o, "f_best").parse::<f64>().unwrap() < 1e-6);
}

#[test]
fn oracle_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = trfds(&["solve", "--command", "read l; echo 1; exit 0", "--x0", "0,0"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(dir.path().join("history.csv").exists());
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["solve", "--bogus"],
        vec!["solve", "--problem", "no_such_problem"],
        vec!["solve", "--mode", "unrelaxable"],
        vec!["solve", "--mode", "sideways"],
        vec!["solve", "--problem", "rosenbrock", "--x0", "1,2,3"],
        vec!["solve", "--delta0", "1e-20"],
        vec!["calibrate", "--noise-scale", "-1"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&trfds(&args, dir.path())), 1, "{args:?}");
    }
}

#[test]
fn help_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let o = trfds(&["--help"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("calibrate"));
}
