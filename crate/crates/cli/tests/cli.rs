use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_plurizero"));
    c.env_remove("PLURIZERO_WORKERS");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_to(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(cfg).arg("--out").arg(out).args(extra).output().unwrap()
}

fn manifest(out: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn every_shipped_config_validates() {
    for e in fs::read_dir(configs()).unwrap() {
        let p = e.unwrap().path();
        let o = bin().arg("validate").arg(&p).output().unwrap();
        assert!(o.status.success(), "{}: {}", p.display(), String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn validate_reports_all_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    fs::write(
        &p,
        "experiment = \"variance\"\nseed = 1\ndegrees = [10, 20, 40, 80]\ntrials = 10\n[ensemble]\nlaw = \"heavy_tail\"\nalpha = 1.0\ngamma = 2.0\n[compact]\nkind = \"unit_disk\"\n[[test_forms]]\ncenter = [[1.0, 0.0]]\nradius = 0.5\n",
    )
    .unwrap();
    let o = bin().arg("validate").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("gamma must exceed 2m"), "{err}");
    assert!(err.contains("ensemble.alpha"), "{err}");
}

#[test]
fn reruns_and_worker_counts_give_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("exact.toml");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    assert!(run_to(&cfg, &a, &["--seed", "7", "--workers", "1"]).status.success());
    assert!(run_to(&cfg, &b, &["--seed", "7", "--workers", "1"]).status.success());
    assert!(run_to(&cfg, &c, &["--seed", "7", "--workers", "8"]).status.success());
    let (ma, mb, mc) = (manifest(&a), manifest(&b), manifest(&c));
    assert_eq!(ma["outputs"], mb["outputs"]);
    assert_eq!(ma["outputs"], mc["outputs"]);
    assert_eq!(fs::read(a.join("report.json")).unwrap(), fs::read(c.join("report.json")).unwrap());
    assert_eq!(mc["workers"], 8);
}

#[test]
fn seed_flag_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("exact.toml");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_to(&cfg, &a, &["--seed", "7"]).status.success());
    assert!(run_to(&cfg, &b, &["--seed", "8"]).status.success());
    assert_ne!(manifest(&a)["outputs"], manifest(&b)["outputs"]);
    assert_eq!(manifest(&b)["seed"], 8);
}

#[test]
fn env_sets_default_workers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = bin().env("PLURIZERO_WORKERS", "3").arg("run").arg(configs().join("bm.toml")).arg("--out").arg(&out).output().unwrap();
    assert!(o.status.success());
    assert_eq!(manifest(&out)["workers"], 3);
    assert!(out.join("tables/bm.csv").exists());
    assert!(out.join("tables/audits.csv").exists());
}

#[test]
fn failing_audit_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("strict.toml");
    let text =
        fs::read_to_string(configs().join("expected.toml")).unwrap().replace("deviation_tolerance = 0.02", "deviation_tolerance = 1e-9");
    fs::write(&p, text).unwrap();
    let o = run_to(&p, &dir.path().join("o"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn infrastructure_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_to(&dir.path().join("missing.toml"), &dir.path().join("o"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(o.stderr.trim_ascii()).unwrap();
    assert!(err["error"].as_str().unwrap().contains("missing.toml"));
}
