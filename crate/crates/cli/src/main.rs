//! `isoscatter`: Gassmann checks, cover spectra, zeta zero scans and curve
//! criteria driven by JSON configs.
//!
//! Exit codes: 0 success, 1 failed check, 2 config error, 3 contour error.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Overrides;
use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "isoscatter",
    version,
    about = "Isoscattering Schottky manifolds from Sunada triples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gassmann check, conjugacy in G and G', discrete transplantation.
    Sunada(Common),
    /// Lift the length spectrum to both covers and compare.
    Isoscatter(Common),
    /// Locate zeros of the truncated zeta function in a rectangle.
    ZetaScan(Common),
    /// Check disjointness and pairing of the Schottky circles.
    SchottkyValidate(Common),
    /// Check a curve system against the distinct-structure criteria.
    CurvesCheck(Common),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, hide = true)]
    corrupt_weight: Option<usize>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (Command::Sunada(c)
    | Command::Isoscatter(c)
    | Command::ZetaScan(c)
    | Command::SchottkyValidate(c)
    | Command::CurvesCheck(c)) = &cli.command;
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let cfg = ExperimentConfig::load(&c.config)?;
    let ov = Overrides {
        n_max: c.n_max,
        k_max: c.k_max,
        tol: c.tol,
        corrupt_weight: c.corrupt_weight,
    };
    match &cli.command {
        Command::Sunada(_) => commands::sunada(&cfg, &c.out),
        Command::Isoscatter(_) => commands::isoscatter(&cfg, &c.out, &ov),
        Command::ZetaScan(_) => commands::zeta_scan(&cfg, &c.out, &ov),
        Command::SchottkyValidate(_) => commands::schottky_validate(&cfg, &c.out, &ov),
        Command::CurvesCheck(_) => commands::curves_check(&cfg, &c.out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
