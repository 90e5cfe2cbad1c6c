//! `plurizero run` and `plurizero validate`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use plurizero::config::validate_config;
use plurizero::runner::{run, RunOptions};

#[derive(Parser)]
#[command(name = "plurizero", version, about = "Monte Carlo experiments on zeros of random polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (results do not depend on this).
        #[arg(long, env = "PLURIZERO_WORKERS")]
        workers: Option<usize>,
        /// Output directory [default: runs/<config>-<seed>].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config file and print its normalized form.
    Validate { config: PathBuf },
}

const AUDIT_FAILED: u8 = 1;
const INFRA_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    return ExitCode::from(INFRA_ERROR);
                }
            };
            match validate_config(&text) {
                Ok(cfg) => match cfg.to_toml() {
                    Ok(s) => {
                        print!("{s}");
                        ExitCode::SUCCESS
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        ExitCode::from(INFRA_ERROR)
                    }
                },
                Err(errors) => {
                    for e in &errors {
                        eprintln!("error: {e}");
                    }
                    eprintln!("{} error(s) in {}", errors.len(), config.display());
                    ExitCode::from(INFRA_ERROR)
                }
            }
        }
        Command::Run { config, seed, workers, out } => match run(&config, &RunOptions { seed, workers, out }) {
            Ok(o) => {
                let total = o.report.audits.len();
                let failed: Vec<_> = o.report.failed_audits().collect();
                println!(
                    "{} [{}] seed {}: {}/{} audits passed, artifacts in {}",
                    o.report.experiment.name(),
                    o.report.probes,
                    o.report.seed,
                    total - failed.len(),
                    total,
                    o.out_dir.display()
                );
                for a in &failed {
                    println!("FAIL {}: value {:e}, threshold {:e}", a.name, a.value, a.threshold);
                }
                if failed.is_empty() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(AUDIT_FAILED)
                }
            }
            Err(e) => {
                let msg = serde_json::json!({ "error": e.to_string(), "config": config.display().to_string() });
                eprintln!("{msg}");
                ExitCode::from(INFRA_ERROR)
            }
        },
    }
}
