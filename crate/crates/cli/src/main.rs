//! `qthermo`: thermometry simulations from the command line.

mod commands;
mod config;
mod error;
mod output;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliResult;

#[derive(Parser)]
#[command(name = "qthermo", version, about = "Transmon thermometry simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; all sections are optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Device preset (R2-I, R4-I, R4-I-sim, R3-II, Q2-III); replaces any device in the config.
    #[arg(long, global = true)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Quasiparticle relaxation and dephasing rates over the temperature grid.
    Rates,
    /// Simulated measurement sweep with all nine estimators.
    Sweep,
    /// Fisher-information error floors and NET over the temperature grid.
    Fisher,
    /// Thermalization fits of a sweep output or external CSV.
    Fit { input: PathBuf },
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = cli.preset {
        cfg.preset = Some(p);
        cfg.device = None;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(o) = &cli.out {
        cfg.output.path = Some(o.display().to_string());
    }
    let resolved = cfg.resolve()?;
    let seed = resolved.config.seed;
    let table = match &cli.command {
        Command::Rates => commands::rates(&resolved, seed)?,
        Command::Sweep => commands::sweep_table(&resolved, seed)?,
        Command::Fisher => commands::fisher(&resolved, seed)?,
        Command::Fit { input } => commands::fit(input, &resolved, seed)?,
    };
    let out = resolved.config.output.path.as_ref().map(PathBuf::from);
    table.emit(resolved.config.output.format, out.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qthermo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
