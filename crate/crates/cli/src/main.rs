// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use hchain::ChainError;

use config::RunConfig;

/// Experiments on the forced harmonic chain.
#[derive(Debug, Parser)]
#[command(name = "hchain", version, about)]
struct Cli {
    /// JSON file with default values for any flag; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the merged configuration as JSON to this path.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,

    #[command(flatten)]
    flags: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Mode frequencies as CSV `m,omega_m`.
    Spectrum,
    /// Trajectory of the pinned chain from the closed form or the integrator.
    Simulate,
    /// Sampled sup/inf of the extension deviation over a ladder of chains.
    SupScan,
    /// Relative extension along a scaling family sigma(N).
    PhaseSweep,
    /// Mie potential fit, critical force and static fixed points.
    Static,
    /// Self-check suites, reported as TAP.
    Verify,
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?.overlay(cli.flags),
        None => cli.flags,
    };
    if let Some(path) = &cli.save_config {
        std::fs::write(path, cfg.to_json() + "\n")?;
    }
    if let Some(workers) = cfg.workers {
        if workers == 0 {
            anyhow::bail!(ChainError::Domain("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(workers).build_global()?;
    }
    match cli.command {
        Command::Spectrum => commands::spectrum(&cfg)?,
        Command::Simulate => commands::simulate(&cfg)?,
        Command::SupScan => commands::sup_scan(&cfg)?,
        Command::PhaseSweep => commands::phase(&cfg)?,
        Command::Static => commands::statics(&cfg)?,
        Command::Verify => return commands::verify(&cfg),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let numerical = e
                .chain()
                .any(|c| c.downcast_ref::<ChainError>().is_some_and(ChainError::is_numerical));
            ExitCode::from(if numerical { 2 } else { 1 })
        }
    }
}
