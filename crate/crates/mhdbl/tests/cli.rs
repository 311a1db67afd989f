//! End-to-end checks of the binary: exit-code contract, output files, and
//! config validation.

use std::path::Path;
use std::process::{Command, Output};

fn mhdbl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhdbl")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_rejects_bad_ell_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"ell": 0.4, "ny": 32}"#);
    let out = mhdbl(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ell"), "stderr: {err}");
}

#[test]
fn run_rejects_unknown_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"nz": 8}"#);
    let out = mhdbl(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_verify_suite_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = mhdbl(&[
        "verify",
        "frobnicate",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn zero_perturbation_run_keeps_u_frozen() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"nx": 8, "ny": 64, "ymax": 12.0, "amp_u": 0.0, "amp_f": 0.0,
            "dt": 1e-3, "tend": 0.01, "f_floor": 1e-4}"#,
    );
    let out_dir = dir.path().join("out");
    let out = mhdbl(&["run", "--config", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let snap = mhdbl::snapshot::read_snapshot(&out_dir.join("final.bin")).unwrap();
    assert!(snap.u.iter().all(|&v| v.abs() <= 1e-12));
}

#[test]
fn default_run_writes_well_formed_timeseries() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"nx": 8, "ny": 64, "ymax": 12.0, "dt": 1e-3, "tend": 0.02,
            "f_floor": 1e-4, "output_every": 4}"#,
    );
    let out_dir = dir.path().join("out");
    let out = mhdbl(&["run", "--config", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let csv = std::fs::read_to_string(out_dir.join("timeseries.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,E,D,Cstar,cancel_res,b3_res,b5_res,div_u_res,div_f_res,g_eq_res,min_env_ratio,tail_mass"
    );
    let mut rows = 0;
    let mut last_t = -1.0;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 12);
        let t: f64 = cells[0].parse().unwrap();
        assert!(t > last_t);
        last_t = t;
        for c in &cells {
            assert!(c.parse::<f64>().unwrap().is_finite(), "cell {c}");
        }
        rows += 1;
    }
    assert!(rows >= 4, "only {rows} rows");
}

#[test]
fn identical_run_configs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"nx": 8, "ny": 64, "ymax": 12.0, "dt": 1e-3, "tend": 0.01, "f_floor": 1e-4}"#,
    );
    let (d1, d2) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&d1, &d2] {
        let out = mhdbl(&["run", "--config", &cfg, "--output-dir", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(
        std::fs::read(d1.join("timeseries.csv")).unwrap(),
        std::fs::read(d2.join("timeseries.csv")).unwrap()
    );
    assert_eq!(
        std::fs::read(d1.join("final.bin")).unwrap(),
        std::fs::read(d2.join("final.bin")).unwrap()
    );
}

#[test]
fn coarse_grid_verify_fails_with_exit_3() {
    // Ny=16 puts the cross-scheme heat comparison far above its tolerance
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"ny": 16, "ymax": 20.0}"#);
    let out = mhdbl(&[
        "verify",
        "oracle-heat",
        "--config",
        &cfg,
        "--output-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    let txt = String::from_utf8_lossy(&out.stdout);
    assert!(txt.contains("FAIL"), "stdout: {txt}");
}

#[test]
fn oracle_heat_suite_passes_at_default_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = mhdbl(&[
        "verify",
        "oracle-heat",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(out_dir.join("oracle_heat_report.txt").exists());
    assert!(out_dir.join("oracle_heat_report.csv").exists());
}

#[test]
fn run_reports_positivity_loss_with_exit_2() {
    // amp_f close to 1 drives min f <y>^delta under the floor quickly
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"nx": 8, "ny": 64, "ymax": 12.0, "amp_f": 0.6, "amp_u": 0.3,
            "dt": 1e-3, "tend": 2.0, "f_floor": 0.7}"#,
    );
    let out = mhdbl(&[
        "run",
        "--config",
        &cfg,
        "--output-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
