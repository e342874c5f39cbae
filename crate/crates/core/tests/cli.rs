//! End-to-end checks of the binary: exit codes, error records, artifact
//! layout, and stdout summaries.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn plmpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plmpc"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn error_record(dir: &Path) -> String {
    std::fs::read_to_string(dir.join("error.txt")).expect("error.txt should exist")
}

#[test]
fn missing_config_exits_2_and_writes_an_error_record() {
    let out = tempfile::tempdir().unwrap();
    let res = plmpc(&[
        "run",
        "--config",
        "/nonexistent/nowhere.toml",
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2), "stderr: {}", stderr(&res));
    assert!(stderr(&res).starts_with("error: "));
    let record = error_record(out.path());
    assert!(record.starts_with("error = "));
    assert!(record.contains("exit_code = 2"));
}

#[test]
fn invalid_config_value_exits_2() {
    let cfg = config_dir().join("hammerstein_case1.toml");
    let out = tempfile::tempdir().unwrap();
    let res = plmpc(&[
        "tune",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--set",
        "ts=-1.0",
    ]);
    assert_eq!(res.status.code(), Some(2), "stderr: {}", stderr(&res));
    assert!(error_record(out.path()).contains("exit_code = 2"));
}

#[test]
fn malformed_theta_override_exits_2() {
    let cfg = config_dir().join("hammerstein_case1.toml");
    let out = tempfile::tempdir().unwrap();
    let res = plmpc(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--theta-override",
        "1.0,2.0,3.0",
    ]);
    assert_eq!(res.status.code(), Some(2), "stderr: {}", stderr(&res));
    assert!(stderr(&res).contains("theta-override"));
}

#[test]
fn unusable_theta_override_exits_3() {
    // Zero gains are well-formed but cannot be scored: the controller has
    // no inverse, a numeric failure rather than a config one.
    let cfg = config_dir().join("hammerstein_case1.toml");
    let out = tempfile::tempdir().unwrap();
    let res = plmpc(&[
        "tune",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--theta-override",
        "0,0,0,0.81",
    ]);
    assert_eq!(res.status.code(), Some(3), "stderr: {}", stderr(&res));
    assert!(error_record(out.path()).contains("exit_code = 3"));
}

#[test]
fn tune_prints_the_result_and_writes_artifacts() {
    let cfg = config_dir().join("hammerstein_case1.toml");
    let out = tempfile::tempdir().unwrap();
    let res = plmpc(&[
        "tune",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--set",
        "efrit.starts=2",
        "--set",
        "efrit.max_iter=200",
    ]);
    assert_eq!(res.status.code(), Some(0), "stderr: {}", stderr(&res));
    let text = stdout(&res);
    for key in ["kp = ", "ki = ", "kd = ", "tc = ", "cost = "] {
        assert!(text.contains(key), "stdout missing {key:?}:\n{text}");
    }
    assert!(out.path().join("record.csv").exists());
    assert!(out.path().join("tuning.txt").exists());
}

#[test]
fn same_seed_tunes_are_byte_identical_from_the_cli() {
    let cfg = config_dir().join("hammerstein_case1.toml");
    let mut results = Vec::new();
    for _ in 0..2 {
        let out = tempfile::tempdir().unwrap();
        let res = plmpc(&[
            "tune",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.path().to_str().unwrap(),
            "--seed",
            "7",
            "--set",
            "efrit.starts=2",
            "--set",
            "efrit.max_iter=200",
        ]);
        assert_eq!(res.status.code(), Some(0), "stderr: {}", stderr(&res));
        results.push(std::fs::read(out.path().join("tuning.txt")).unwrap());
    }
    assert_eq!(results[0], results[1]);
}

#[test]
fn run_with_a_fixed_theta_writes_the_full_artifact_set() {
    let cfg = config_dir().join("hammerstein_case1.toml");
    let out = tempfile::tempdir().unwrap();
    let res = plmpc(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--theta-override",
        "4.71e-9,9.09e-1,3.68e-11,0.81",
    ]);
    assert_eq!(res.status.code(), Some(0), "stderr: {}", stderr(&res));
    let text = stdout(&res);
    for key in [
        "rmse_proposed",
        "rmse_conventional",
        "sd_proposed",
        "sd_conventional",
        "theta_star",
        "j_star",
    ] {
        assert!(text.contains(key), "stdout missing {key:?}:\n{text}");
    }
    for name in [
        "record.csv",
        "tuning.txt",
        "conventional.csv",
        "proposed.csv",
        "metrics.txt",
    ] {
        assert!(out.path().join(name).exists(), "{name} missing");
    }
}

#[test]
fn sweep_aggregates_variants_into_a_table() {
    let cfg = config_dir().join("hammerstein_case1.toml");
    let out = tempfile::tempdir().unwrap();
    let res = plmpc(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--theta-override",
        "4.71e-9,9.09e-1,3.68e-11,0.81",
        "--variant",
        "mpc.q=1000.0,mpc.v=1.0",
        "--variant",
        "mpc.q=1.0,mpc.v=100.0",
    ]);
    assert_eq!(res.status.code(), Some(0), "stderr: {}", stderr(&res));
    let text = stdout(&res);
    assert!(text.contains("run_000"));
    assert!(text.contains("run_001"));
    let table = std::fs::read_to_string(out.path().join("sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(out.path().join("run_000/metrics.txt").exists());
    assert!(out.path().join("run_001/metrics.txt").exists());
}
