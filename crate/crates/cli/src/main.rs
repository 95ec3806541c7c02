//! `quasilin`: configuration-driven experiment runner.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::load_config;

pub const EXIT_PRECONDITION: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("output: {0}")]
    Output(String),
    #[error(transparent)]
    Core(#[from] quasilin::Error),
    #[error("{0}")]
    Status(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => EXIT_PRECONDITION,
            CliError::Core(e) if e.is_precondition() => EXIT_PRECONDITION,
            CliError::Core(_) | CliError::Status(_) => EXIT_SOLVER,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "quasilin", version, about = "Radial p-Laplacian experiments: gradient-source and zero-order-source problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config and QUASILIN_OUT.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Grid size override.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Catalog round-trip report.
    Transform,
    /// Minimal solution, or Dirac solve when `dirac > 0`.
    Solve,
    /// First eigenvalue λ₁(f).
    Eigen,
    /// Critical parameter λ* and the extremal branch.
    Branch,
    /// Mountain-pass second solution.
    Mpass,
    /// Regularity exponents and growth predicates.
    Exponents,
}

fn output_dir(cli: &Cli, config: &config::ExperimentConfig) -> PathBuf {
    if let Some(dir) = &cli.out {
        return dir.clone();
    }
    if let Some(dir) = &config.output.dir {
        return config.base_dir.join(dir);
    }
    match std::env::var_os("QUASILIN_OUT") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from("out"),
    }
}

fn run(cli: &Cli) -> Result<commands::Run, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let config = load_config(path)?;
    let out = output_dir(cli, &config);
    match cli.command {
        Command::Transform => commands::transform(&config, &out),
        Command::Solve => commands::solve(&config, &out, cli.n),
        Command::Eigen => commands::eigen(&config, &out, cli.n),
        Command::Branch => commands::branch(&config, &out, cli.n),
        Command::Mpass => commands::mpass(&config, &out, cli.n),
        Command::Exponents => commands::exponents(&config, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(done) => {
            if !cli.quiet {
                println!("{}", done.summary);
                for f in &done.files {
                    println!("wrote {}", f.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
