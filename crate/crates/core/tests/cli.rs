use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dephase::analytic::bath_driven_negativity;
use dephase::experiments::{builtin, read_records, ScenarioName};

fn dephase(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dephase"))
        .args(args)
        .env_remove("DEPHASE_OUT_DIR")
        .current_dir(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_names_every_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = dephase(&["list"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 11);
    for name in ScenarioName::ALL {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name} "))), "{name}");
    }
}

#[test]
fn run_writes_csv_matching_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = dephase(
        &["run", "--scenario", "BathOnlyG", "--k", "6", "--set", "samples=50", "--out-dir", "res"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = dir.path().join("res/BathOnlyG_k6.csv");
    let recs = read_records(&csv).unwrap();
    assert_eq!(recs.len(), 50);
    let cfg = builtin(ScenarioName::BathOnlyG);
    for r in &recs {
        let exact = bath_driven_negativity(r.t, 6, &cfg.osc, &cfg.bath.unwrap()).unwrap();
        assert!((r.negativity - exact).abs() < 1e-8);
    }
    assert!(dir.path().join("res/BathOnlyG_k6.json").exists());
}

#[test]
fn sidecar_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "--scenario", "BG1", "--k", "4", "--set", "samples=40", "--out-dir", "a"];
    assert_eq!(dephase(&args, dir.path()).status.code(), Some(0));
    let o = dephase(&["run", "--config", "a/BG1_k4.json", "--out-dir", "b"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let a = fs::read(dir.path().join("a/BG1_k4.csv")).unwrap();
    let b = fs::read(dir.path().join("b/BG1_k4.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dephase"))
        .args(["analytic", "--scenario", "AG", "--k", "8"])
        .env("DEPHASE_OUT_DIR", dir.path().join("env"))
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("env/AG_k8_width.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["k"], 8);
}

#[test]
fn sweep_and_scaling_write_their_files() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--scenario", "BG1", "--k", "4..10:2", "--set", "samples=120"];
    let o = dephase(&[&["sweep"][..], &common].concat(), dir.path());
    assert_eq!(o.status.code(), Some(0));
    for k in [4, 6, 8, 10] {
        assert!(dir.path().join(format!("out/BG1_k{k}.csv")).exists());
    }
    let summary = fs::read_to_string(dir.path().join("out/BG1_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);

    let o =
        dephase(&[&["scaling"][..], &common, &["--quantity", "negativity"]].concat(), dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("BG1 negativity: exponent"));
    let fits: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/BG1_scaling.json")).unwrap())
            .unwrap();
    assert_eq!(fits[0]["amplitudes"].as_array().unwrap().len(), 4);
}

#[test]
fn oracle_check_passes_at_small_k() {
    let dir = tempfile::tempdir().unwrap();
    let o = dephase(&["oracle-check", "--scenario", "BP2", "--k", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("ok"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "--scenario", "Nope", "--k", "4"][..],
        &["run", "--scenario", "AG", "--config", "x.json", "--k", "4"],
        &["run", "--scenario", "AG", "--k", "4..2"],
        &["run", "--scenario", "AG", "--k", "4,6"],
        &["run", "--scenario", "AG", "--k", "4", "--set", "phi=1"],
        &["analytic", "--scenario", "BG2", "--k", "4", "--set", "gamma=0"],
        &["frobnicate"],
    ] {
        let o = dephase(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn numeric_failure_exits_two_and_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = dephase(&["run", "--scenario", "AG", "--k", "4", "--set", "gamma=1e200"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("underflow"));
    assert!(!dir.path().join("out/AG_k4.csv").exists());
}
