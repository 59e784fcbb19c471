use std::path::Path;
use std::process::{Command, Output};

use lpvort_cli::output::Table;
use lpvort_cli::ExperimentReport;

fn lpvort(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lpvort"));
    cmd.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("LPVORT_")) {
        cmd.env_remove(k);
    }
    cmd.envs(envs.iter().copied());
    cmd.output().expect("binary runs")
}

fn report(dir: &Path) -> ExperimentReport {
    ExperimentReport::read(&dir.join("report.json")).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["run", "--n", "twelve"],
        vec!["run", "--n", "24"],
        vec!["run", "--suite", "nope"],
        vec!["run", "--T", "1", "--dt", "0.3"],
        vec!["launch"],
    ] {
        let out = lpvort(&args, &[]);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let bad_env = lpvort(&["run", "--suite", "hardy-young"], &[("LPVORT_SEED", "-1")]);
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn missing_or_malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "n = 16\nwhatever = 3\n").unwrap();
    let out = lpvort(&["run", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = lpvort(&["run", "--config", "/nonexistent/x.toml"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn passing_run_writes_report_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = lpvort(&["run", "--suite", "hardy-young", "--trials", "200", "--out-dir", d], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ALL PASS"));
    let r = report(dir.path());
    assert!(r.all_pass);
    assert_eq!(r.series_files, vec!["hardy_young.csv".to_string()]);
    let t = Table::read(&dir.path().join("hardy_young.csv")).unwrap();
    assert_eq!(t.len(), 200);
    assert!(dir.path().join("timing.json").exists());

    let shown = lpvort(&["report", d], &[]);
    assert_eq!(shown.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&shown.stdout).contains("max ratio"));
}

#[test]
fn reports_are_deterministic_and_parallel_seeds_agree() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let common = ["run", "--suite", "apriori", "--n", "8", "--T", "0.1", "--seeds", "3", "--sweep-points", "2", "--calib-seeds", "2"];
    let mut args_a = common.to_vec();
    args_a.extend(["--out-dir", a.path().to_str().unwrap()]);
    let mut args_b = common.to_vec();
    args_b.extend(["--out-dir", b.path().to_str().unwrap(), "--parallel-seeds"]);
    assert_eq!(lpvort(&args_a, &[]).status.code(), Some(0));
    assert_eq!(lpvort(&args_b, &[]).status.code(), Some(0));
    let (ra, rb) = (report(a.path()), report(b.path()));
    assert_eq!(ra.checks, rb.checks);
    assert_eq!(ra.constants, rb.constants);
    for f in &ra.series_files {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
    // a second serial run reproduces the report byte for byte
    let mut args_c = common.to_vec();
    args_c.extend(["--out-dir", a.path().to_str().unwrap()]);
    let first = std::fs::read(a.path().join("report.json")).unwrap();
    assert_eq!(lpvort(&args_c, &[]).status.code(), Some(0));
    assert_eq!(first, std::fs::read(a.path().join("report.json")).unwrap());
}

#[test]
fn flags_beat_environment_beats_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        format!("n = 64\nseed = 5\ntrials = 20\nsuite = \"hardy-young\"\nout-dir = {:?}\n", out_dir.to_str().unwrap()),
    )
    .unwrap();
    let out = lpvort(
        &["run", "--config", cfg.to_str().unwrap(), "--n", "16"],
        &[("LPVORT_N", "32"), ("LPVORT_SEED", "9")],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out_dir);
    assert_eq!(r.config.n, 16, "flag wins over env and file");
    assert_eq!(r.config.seed, 9, "env wins over file");
    assert_eq!(r.config.trials, Some(20), "file wins over defaults");
}

#[test]
fn cfl_breakdown_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = lpvort(
        &["run", "--suite", "solver", "--n", "16", "--amplitude", "10", "--dt", "0.01", "--T", "0.02", "--out-dir", d],
        &[],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(dir.path());
    assert!(r.blowup.as_deref().unwrap().contains("CFL"));
    assert!(!r.all_pass);
    assert_eq!(lpvort(&["report", d], &[]).status.code(), Some(3));
}

#[test]
fn calibrate_epsilon_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = lpvort(
        &["calibrate-epsilon", "--n", "8", "--T", "0.1", "--sweep-points", "3", "--calib-seeds", "2", "--out-dir", d],
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert_eq!(r.command, "calibrate-epsilon");
    assert!(r.constants.eps_emp.unwrap() > 0.0);
    let t = Table::read(&dir.path().join("calibration.csv")).unwrap();
    assert_eq!(t.len(), 6);
}
