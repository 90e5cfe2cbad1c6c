//! Config in, artifacts out: `report.json`, `tables/*.csv`, `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{check, validate_config, ConfigError, ExperimentConfig};
use crate::experiments::run_experiment;
use crate::parallel::default_workers;
use crate::report::ExperimentReport;
use crate::{Error, Result};

/// Flags overriding the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    /// Output directory; defaults to `runs/<config stem>-<seed>`.
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

/// Provenance of a run. Re-running the config at `seed` reproduces every
/// file listed under `outputs` byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_path: String,
    pub config_sha256: String,
    pub experiment: String,
    pub seed: u64,
    pub workers: usize,
    /// Milliseconds since the Unix epoch.
    pub started_ms: u128,
    pub finished_ms: u128,
    pub versions: Vec<(String, String)>,
    pub outputs: Vec<OutputFile>,
    pub all_audits_passed: bool,
}

pub struct RunOutcome {
    pub manifest: RunManifest,
    pub report: ExperimentReport,
    pub out_dir: PathBuf,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

fn format_errors(errors: &[ConfigError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Parse and validate a config file, applying a seed override.
pub fn prepare(path: &Path, seed: Option<u64>) -> Result<(ExperimentConfig, String)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut cfg = validate_config(&text).map_err(|e| Error::Config(format_errors(&e)))?;
    if let Some(s) = seed {
        cfg.seed = s;
        let errs = check(&cfg);
        if !errs.is_empty() {
            return Err(Error::Config(format_errors(&errs)));
        }
    }
    Ok((cfg, text))
}

/// Worker count: flag, then config, then `PLURIZERO_WORKERS`.
pub fn resolve_workers(flag: Option<usize>, cfg: &ExperimentConfig) -> usize {
    flag.or(cfg.workers).filter(|&w| w > 0).unwrap_or_else(default_workers)
}

fn write(dir: &Path, rel: &str, bytes: &[u8], outputs: &mut Vec<OutputFile>) -> Result<()> {
    let p = dir.join(rel);
    if let Some(parent) = p.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&p, bytes)?;
    outputs.push(OutputFile { path: rel.to_string(), sha256: sha256_hex(bytes) });
    Ok(())
}

/// Execute the experiment named in the config and write its artifacts.
pub fn run(config_path: &Path, opts: &RunOptions) -> Result<RunOutcome> {
    let started_ms = now_ms();
    let (cfg, text) = prepare(config_path, opts.seed)?;
    let workers = resolve_workers(opts.workers, &cfg);
    let report = run_experiment(&cfg, workers)?;
    let out_dir = opts.out.clone().unwrap_or_else(|| {
        let stem = config_path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
        PathBuf::from("runs").join(format!("{stem}-{}", cfg.seed))
    });
    fs::create_dir_all(&out_dir)?;
    let mut outputs = Vec::new();
    write(&out_dir, "report.json", report.to_json()?.as_bytes(), &mut outputs)?;
    for (name, csv) in report.tables() {
        write(&out_dir, &format!("tables/{name}.csv"), csv.as_bytes(), &mut outputs)?;
    }
    let manifest = RunManifest {
        config_path: config_path.display().to_string(),
        config_sha256: sha256_hex(text.as_bytes()),
        experiment: cfg.experiment.name().to_string(),
        seed: cfg.seed,
        workers,
        started_ms,
        finished_ms: now_ms(),
        versions: vec![("plurizero".to_string(), crate::VERSION.to_string())],
        outputs,
        all_audits_passed: report.all_passed(),
    };
    let mut mj = serde_json::to_string_pretty(&manifest)?;
    mj.push('\n');
    fs::write(out_dir.join("manifest.json"), mj)?;
    Ok(RunOutcome { manifest, report, out_dir })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BM: &str = "experiment = \"bm\"\nseed = 3\ndegrees = [4, 8]\ntrials = 2\n[ensemble]\nlaw = \"gaussian\"\n[compact]\nkind = \"circle\"\n[bm]\nmeasure = \"boundary\"\n";

    #[test]
    fn writes_artifacts_with_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bm.toml");
        fs::write(&cfg, BM).unwrap();
        let out = dir.path().join("out");
        let r = run(&cfg, &RunOptions { out: Some(out.clone()), ..Default::default() }).unwrap();
        assert!(r.manifest.all_audits_passed);
        for f in &r.manifest.outputs {
            let bytes = fs::read(out.join(&f.path)).unwrap();
            assert_eq!(sha256_hex(&bytes), f.sha256);
        }
        assert!(out.join("manifest.json").exists());
        assert!(out.join("tables/bm.csv").exists());
    }

    #[test]
    fn seed_override_applies() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bm.toml");
        fs::write(&cfg, BM).unwrap();
        let (c, _) = prepare(&cfg, Some(99)).unwrap();
        assert_eq!(c.seed, 99);
        assert!(matches!(prepare(&cfg, Some(u64::MAX)), Err(Error::Config(_))));
    }

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
