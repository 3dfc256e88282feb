//! `mhd1d` command-line driver.

mod artifacts;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Failure categories, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse { line: usize, column: usize, message: String },
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    Boundary(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("verification failed: {}", .0.join(", "))]
    Verify(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify(_) => 1,
            CliError::ConfigParse { .. } | CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Boundary(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<mhd1d::Error> for CliError {
    fn from(e: mhd1d::Error) -> Self {
        use mhd1d::Error as E;
        match e {
            E::Invalid(v) => CliError::Config(v),
            E::Parse { line, message } => CliError::ConfigParse { line, column: 0, message },
            E::BoundaryTrip { .. } => CliError::Boundary(e.to_string()),
            E::Io(m) => CliError::Io(m),
            E::Domain(_) | E::NonFinite { .. } | E::Degenerate(_) => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "mhd1d", version, about = "1D isentropic MHD solver and resistivity-limit studies")]
struct Cli {
    /// Output directory; overrides the config's `output_dir`.
    #[arg(long, global = true, env = "MHD1D_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write diagnostics, final state and manifest.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run matched resistive/non-resistive pairs over `nu_list`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Concurrent pairs (defaults to the number of cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the built-in verification battery.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config } => commands::simulate(&config, cli.output_dir),
        Command::Sweep { config, jobs } => commands::sweep(&config, cli.output_dir, jobs),
        Command::Verify => commands::verify(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
