//! `treepolymer`: command-line driver for tree polymer simulations.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numeric
//! failure, 4 regime mismatch.

mod commands;
mod config;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use treepolymer::Error;

use config::Flags;

#[derive(Parser, Debug)]
#[command(name = "treepolymer", version, about = "Tree polymers in random cascade environments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Print E[X ln X], ln 2, sigma^2, beta_c and the disorder regime.
    Classify,
    /// Ensemble of Z_k, D_k and sqrt(k) Z_k / D_k for k = 1..depth.
    Simulate,
    /// prob_n and prob_inf rectangle probabilities and character expectations.
    Measure,
    /// Strong-disorder Laplace rate F(r) of a lognormal spec: CSV and SVG.
    Laplace,
    /// F(r) for several beta values on one SVG.
    Plot,
    /// Kolmogorov-Smirnov distance of (s)_n / sqrt(n) to the normal law.
    Clt,
    /// Var((s)_n)/n under prob_n against sigma^2(beta).
    Variance,
    /// Ratio sqrt(k) Z_k / D_k at critical disorder.
    Ratio,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Simulate => "simulate",
            Command::Measure => "measure",
            Command::Laplace => "laplace",
            Command::Plot => "plot",
            Command::Clt => "clt",
            Command::Variance => "variance",
            Command::Ratio => "ratio",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const IO: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const NUMERIC: u8 = 3;
    pub const REGIME: u8 = 4;

    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: Self::CONFIG,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: Self::NUMERIC,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonPositiveNormalizer { .. } | Error::NoConvergence { .. } => Self::NUMERIC,
            Error::RegimeMismatch { .. } | Error::InvalidBeta { .. } => Self::REGIME,
            _ => Self::CONFIG,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: Self::IO,
            message: e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (config, runtime) = config::resolve(cli.command.name(), &cli.flags)?;
    if runtime.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(runtime.jobs)
            .build_global()
            .map_err(|e| CliError::config(format!("cannot start {} workers: {e}", runtime.jobs)))?;
    }
    match cli.command {
        Command::Classify => commands::classify(&config, &runtime),
        Command::Simulate => commands::simulate(&config, &runtime),
        Command::Measure => commands::measure(&config, &runtime),
        Command::Laplace => commands::laplace(&config, &runtime),
        Command::Plot => commands::plot(&config, &runtime),
        Command::Clt => commands::clt(&config, &runtime),
        Command::Variance => commands::variance(&config, &runtime),
        Command::Ratio => commands::ratio(&config, &runtime),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("treepolymer: {e}");
            ExitCode::from(e.code)
        }
    }
}
