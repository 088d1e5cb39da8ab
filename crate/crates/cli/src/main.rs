mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use jfilter::projection::MeasurementMode;

use config::{BackendChoice, DeformationSource, LoadedConfig};

#[derive(Parser)]
#[command(name = "jfilter", version, about = "Angular-momentum filtering of shell-model trial states")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the optimizer, the deformation generator and sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    backend: Option<BackendChoice>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeFlag>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeFlag {
    Postselect,
    Sample,
}

#[derive(Subcommand)]
enum Command {
    /// Run the projection and write record, weights, ansatz and summary.
    Project,
    /// Gate counts and the Trotter comparison.
    Resources,
    /// Pauli term counts and complexity histograms of J~x, J~y, J~z, J~^2.
    Analyze,
    /// Fit and store the Givens networks.
    Decompose,
}

/// Exit status of `project` when the run finished but did not converge.
const NOT_CONVERGED: u8 = 2;

fn load(cli: &Cli) -> Result<LoadedConfig> {
    let mut loaded = match &cli.config {
        Some(path) => {
            let mut loaded = LoadedConfig::read(path)?;
            loaded.anchor_output();
            loaded
        }
        None => LoadedConfig::defaults(),
    };
    let c = &mut loaded.config;
    if let Some(out) = &cli.out {
        c.output_dir = out.clone();
    }
    if let Some(b) = cli.backend {
        c.backend = b;
    }
    if let Some(seed) = cli.seed {
        c.seed = seed;
        if let DeformationSource::Generate { seed: s, .. } = &mut c.deformation {
            *s = seed;
        }
        if let MeasurementMode::Sample { seed: s } = &mut c.mode {
            *s = seed;
        }
    }
    match cli.mode {
        Some(ModeFlag::Postselect) => c.mode = MeasurementMode::Postselect,
        Some(ModeFlag::Sample) => {
            if !matches!(c.mode, MeasurementMode::Sample { .. }) {
                c.mode = MeasurementMode::Sample { seed: cli.seed.unwrap_or(c.seed) };
            }
        }
        None => {}
    }
    Ok(loaded)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let loaded = load(cli)?;
    match cli.command {
        Command::Project => {
            if commands::project(&loaded)? {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(NOT_CONVERGED))
            }
        }
        Command::Resources => commands::resources(&loaded).map(|_| ExitCode::SUCCESS),
        Command::Analyze => commands::analyze(&loaded).map(|_| ExitCode::SUCCESS),
        Command::Decompose => commands::decompose(&loaded).map(|_| ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
