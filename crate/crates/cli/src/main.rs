//! Command-line front end for the logitpath calculus.
//!
//! Reads a JSON model specification, runs the requested decomposition,
//! reduction, sensitivity sweep or audit, and prints a deterministic report:
//! a tab-separated table by default, the full JSON document behind `--json`.
//! With `--verify`, every reported closed form is cross-checked against the
//! brute-force enumeration oracle and a residual above tolerance makes the
//! process fail.
//!
//! Exit codes: 0 success; 2 file/flag parse errors; 3 requests the
//! specification cannot serve (wrong treatment kind, wrong mediator count,
//! dimension mismatches); 4 verification or audit failure; 5 non-ancestral
//! `--keep` set; 6 Taylor reduction on a chain that is not two mediators
//! long; 7 empty sensitivity sweep.

mod commands;
mod report;
mod specfile;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "logitpath",
    version,
    about = "Exact marginal vs conditional effect calculus for logistic models over binary mediators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose the marginal treatment effect of a single-mediator system
    Decompose(CommonArgs),
    /// Marginalize mediators out of a chain, optionally keeping some fixed
    Reduce(ReduceArgs),
    /// Sweep partially known coefficients and report effects with bounds
    Sensitivity(CommonArgs),
    /// Run the reversed-view and interaction-identity audits
    Check(CheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON model specification
    #[arg(long, value_name = "PATH")]
    spec: PathBuf,

    /// Comma-separated evaluation grid for the treatment (continuous only)
    #[arg(
        long,
        value_name = "GRID",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    x: Option<Vec<f64>>,

    /// Cross-check every closed form against the enumeration oracle
    #[arg(long)]
    verify: bool,

    /// Emit the full JSON report instead of the table
    #[arg(long)]
    json: bool,

    /// Residual tolerance for --verify (default 1e-6)
    #[arg(long, value_name = "REAL", allow_hyphen_values = true)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Mediators to keep fixed, as comma-separated INDEX=VALUE pairs
    /// (for example 2=1,3=0); the kept set must be an upper range
    #[arg(long, value_name = "ASSIGNMENTS")]
    keep: Option<String>,

    /// Expansion point for the continuous-treatment linearization (k=2)
    #[arg(long = "taylor-x0", value_name = "REAL", allow_hyphen_values = true)]
    taylor_x0: Option<f64>,
}

#[derive(Args)]
struct CheckArgs {
    /// Path to the JSON model specification
    #[arg(long, value_name = "PATH")]
    spec: PathBuf,

    /// Emit the full JSON report instead of the table
    #[arg(long)]
    json: bool,
}

/// Failures mapped onto the documented exit codes.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Request(String),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
    #[error("{0}")]
    NonAncestral(String),
    #[error("Taylor reduction is only supported for two-mediator chains, got k={0}")]
    TaylorShape(usize),
    #[error("empty sweep: {0}")]
    EmptySweep(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Request(_) => 3,
            CliError::VerifyFailed(_) => 4,
            CliError::NonAncestral(_) => 5,
            CliError::TaylorShape(_) => 6,
            CliError::EmptySweep(_) => 7,
        }
    }
}

impl From<specfile::LoadError> for CliError {
    fn from(err: specfile::LoadError) -> Self {
        CliError::Parse(err.to_string())
    }
}

impl From<logitpath::Error> for CliError {
    fn from(err: logitpath::Error) -> Self {
        match err {
            logitpath::Error::NonAncestralKeep { .. } => CliError::NonAncestral(err.to_string()),
            logitpath::Error::TaylorNeedsTwoMediators { k } => CliError::TaylorShape(k),
            _ => CliError::Request(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Decompose(args) => commands::decompose(args),
        Command::Reduce(args) => commands::reduce(args),
        Command::Sensitivity(args) => commands::sensitivity(args),
        Command::Check(args) => commands::check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
