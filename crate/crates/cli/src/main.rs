//! `hierdecay` command-line front end.
//!
//! Every subcommand reads a TOML [`config::RunConfig`] and writes CSV/JSON
//! artifacts into the output directory. Exit codes: 0 ok, 2 configuration,
//! 3 numerical failure, 4 cross-method validation mismatch.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{MethodChoice, RunConfig};
use error::CliError;

/// Worker-count override for the ensemble subcommand.
pub const WORKERS_ENV: &str = "HIERDECAY_WORKERS";

#[derive(Parser)]
#[command(
    name = "hierdecay",
    version,
    about = "Decay of a single state through a pseudo continuum"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Replaces `model.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Replaces `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces `solver.method`.
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and expansion coefficients.
    Spectrum(Common),
    /// Survival amplitude on the configured time grid.
    Evolve(Common),
    /// Mean and variance of p₀(t) over coupling realizations.
    Ensemble(Common),
    /// Disorder regime of the configured parameters.
    Classify(Common),
    /// Fits a decay law to a trajectory CSV.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trajectory: PathBuf,
    },
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.model.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output.directory = out.clone();
    }
    if let Some(method) = common.method {
        cfg.solver.method = method;
    }
    cfg.check()?;
    Ok(cfg)
}

fn workers() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|w| *w > 0)
            .map(Some)
            .ok_or_else(|| {
                CliError::Config(format!("{WORKERS_ENV}={v} is not a positive integer"))
            }),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, trajectory) = match &cli.command {
        Command::Spectrum(c) | Command::Evolve(c) | Command::Ensemble(c) | Command::Classify(c) => {
            (c, None)
        }
        Command::Fit { common, trajectory } => (common, Some(trajectory)),
    };
    let cfg = load(common)?;
    std::fs::create_dir_all(&cfg.output.directory)?;
    let ctx = commands::Context {
        cfg: &cfg,
        quiet: common.quiet,
    };
    match cli.command {
        Command::Spectrum(_) => commands::spectrum(&ctx),
        Command::Evolve(_) => commands::evolve(&ctx),
        Command::Ensemble(_) => commands::ensemble(&ctx, workers()?),
        Command::Classify(_) => commands::classify(&ctx),
        Command::Fit { .. } => commands::fit(&ctx, trajectory.expect("fit has a trajectory")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hierdecay: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
