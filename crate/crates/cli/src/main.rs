//! `vacfluct` command-line front end.
//!
//! Exit codes: 0 ok, 2 configuration, 3 convergence, 4 physics domain.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vacfluct::error::ErrorCategory;

use config::{FileConfig, FlagValues, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Lib(vacfluct::Error),
}

pub fn exit_code(e: &vacfluct::Error) -> u8 {
    match e.category() {
        ErrorCategory::Input => 2,
        ErrorCategory::Convergence => 3,
        ErrorCategory::Physics => 4,
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Lib(e) => exit_code(e),
        }
    }
}

#[derive(Parser)]
#[command(name = "vacfluct", version, about = "Vacuum fluctuation forces on 1D mirrors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean Casimir force between two mirrors, one row per separation
    Casimir(Common),
    /// Force noise C_FF, commutator xi_FF and anticommutator sigma_FF
    Noise(Common),
    /// Motional susceptibility chi_FF with a local dispersion-relation defect
    Susceptibility(Common),
    /// Mass ledger and upper-half-plane pole count (JSON)
    Stability(Common),
    /// Position noise and admittance, plus a decomposition sidecar
    PositionNoise(Common),
    /// Nonzero components of the stress-tensor correlation at momentum k (JSON)
    Stress4d {
        /// k0 k1 k2 k3 (lower indices)
        #[arg(num_args = 4, allow_negative_numbers = true, required = true)]
        k: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Flat TOML file with the same keys as the flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    hbar: Option<f64>,
    /// kind=perfect|transparent|single-pole,omega=W|tabulated,path=FILE (repeatable)
    #[arg(long)]
    mirror: Vec<String>,
    /// Mirror separation(s), comma separated
    #[arg(long, value_delimiter = ',')]
    q: Vec<f64>,
    #[arg(long)]
    m0: Option<f64>,
    #[arg(long)]
    omega0: Option<f64>,
    /// min,max,points,log|lin
    #[arg(long)]
    grid: Option<String>,
    /// Relative tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Output file (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Use the perfect-mirror closed forms
    #[arg(long)]
    closed_form: bool,
    #[arg(long)]
    temperature: Option<f64>,
}

impl Common {
    fn resolve(self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let flags = FlagValues {
            hbar: self.hbar,
            mirror: self.mirror,
            q: self.q,
            m0: self.m0,
            omega0: self.omega0,
            grid: self.grid,
            tol: self.tol,
            out: self.out,
            format: self.format,
            closed_form: self.closed_form,
            temperature: self.temperature,
        };
        RunConfig::resolve(flags, file)
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Casimir(c) => commands::casimir(&c.resolve()?),
        Command::Noise(c) => commands::noise(&c.resolve()?),
        Command::Susceptibility(c) => commands::susceptibility(&c.resolve()?),
        Command::Stability(c) => commands::stability(&c.resolve()?),
        Command::PositionNoise(c) => commands::position_noise_cmd(&c.resolve()?),
        Command::Stress4d { k, common } => commands::stress4d(&common.resolve()?, &k),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => {
            eprintln!("error: some results could not be computed (exit {code})");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
