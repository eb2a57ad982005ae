use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use darkjump::acceptance::run_all;
use darkjump::{cmd_analytic, cmd_ensemble, ExperimentConfig};

#[derive(Parser)]
#[command(name = "darkjump", version, about = "Frequency-jump state expansion sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config in SI units; paper operating point when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides `base_seed` from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simplified and full model curves over the sweep.
    Analytic,
    /// Monte Carlo through the detection pipeline, with model columns.
    Ensemble,
    /// Run the acceptance suite; nonzero exit on any failure.
    Verify,
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.base_seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("setting up the thread pool")?;
    }
    match cli.command {
        Command::Analytic => {
            let path = cmd_analytic(&load(&cli)?, &cli.out)?;
            println!("{}", path.display());
        }
        Command::Ensemble => {
            let out = cmd_ensemble(&load(&cli)?, &cli.out)?;
            println!("{} ({} point files)", out.files[0].display(), out.files.len() - 1);
        }
        Command::Verify => {
            let checks = run_all();
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.pass()).count();
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            return Ok(failed == 0);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
