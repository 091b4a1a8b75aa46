//! `haavail`: steady-state availability of a two-node active/standby cluster.
//!
//! Exit codes: 0 success, 1 input error, 2 solver error, 3 validation failure.

mod commands;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use haavail_core::metrics::{ModelKind, DEFAULT_SWEEP_MAX, DEFAULT_SWEEP_MIN, DEFAULT_SWEEP_POINTS};
use haavail_core::model::DEFAULT_DIAG_INTERVAL_HOURS;
use haavail_core::montecarlo::SimMode;
use haavail_core::ModelError;

use crate::params::ParamArgs;

#[derive(Debug, Parser)]
#[command(name = "haavail", version, about = "Availability and downtime of an active/standby HA cluster")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one model and report state probabilities, availability and downtime
    Solve(SolveArgs),
    /// Downtime of both models over a grid of mu/lambda ratios
    Sweep(SweepArgs),
    /// Monte Carlo simulation of the cluster
    Simulate(SimulateArgs),
    /// Cross-check closed forms, numeric solvers and simulation
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Ctmc,
    Smp,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ctmc => ModelKind::Ctmc,
            ModelArg::Smp => ModelKind::Smp,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Default)]
enum MethodArg {
    #[default]
    Numeric,
    Closed,
}

#[derive(Debug, Clone, Copy, ValueEnum, Default)]
enum ModeArg {
    #[default]
    Smp,
    Periodic,
}

impl From<ModeArg> for SimMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Smp => SimMode::SmpSemantics,
            ModeArg::Periodic => SimMode::PeriodicClock,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct CommonOut {
    /// Write CSV to this path instead of printing a table
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Record the wall-clock time in the output manifest
    #[arg(long)]
    stamp: bool,
}

#[derive(Debug, Clone, Args)]
struct SolveArgs {
    #[arg(value_enum)]
    model: ModelArg,

    /// Numeric solve or closed-form evaluation
    #[arg(long, value_enum, default_value_t)]
    method: MethodArg,

    #[command(flatten)]
    params: ParamArgs,

    #[command(flatten)]
    out: CommonOut,
}

#[derive(Debug, Clone, Args)]
struct SweepArgs {
    /// Explicit comma-separated mu/lambda ratios (overrides the log grid)
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,

    #[arg(long, default_value_t = DEFAULT_SWEEP_MIN)]
    ratio_min: f64,

    #[arg(long, default_value_t = DEFAULT_SWEEP_MAX)]
    ratio_max: f64,

    /// Number of log-spaced grid points
    #[arg(long, default_value_t = DEFAULT_SWEEP_POINTS)]
    points: usize,

    /// Diagnostic interval (hours)
    #[arg(long = "T", value_name = "HOURS", default_value_t = DEFAULT_DIAG_INTERVAL_HOURS)]
    t: f64,

    #[arg(long, default_value_t = 0.9)]
    c: f64,

    #[arg(long = "cs", alias = "c-s", default_value_t = 0.9)]
    c_s: f64,

    #[arg(long, default_value_t = 1.0)]
    mu: f64,

    #[arg(long, default_value_t = 12.0)]
    beta: f64,

    #[command(flatten)]
    out: CommonOut,
}

#[derive(Debug, Clone, Args)]
struct SimArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Observed hours per replication
    #[arg(long, default_value_t = 1e7)]
    horizon: f64,

    #[arg(long, default_value_t = 10)]
    reps: u32,

    /// Stop a replication after this many transitions
    #[arg(long)]
    max_transitions: Option<u64>,
}

#[derive(Debug, Clone, Args)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,

    #[command(flatten)]
    sim: SimArgs,

    /// Diagnostic semantics: uniform wait (smp) or absolute clock (periodic)
    #[arg(long, value_enum, default_value_t)]
    mode: ModeArg,

    #[command(flatten)]
    out: CommonOut,
}

#[derive(Debug, Clone, Args)]
struct ValidateArgs {
    #[command(flatten)]
    params: ParamArgs,

    #[command(flatten)]
    sim: SimArgs,

    /// Perturb the semi-Markov closed form by this relative amount
    #[arg(long, hide = true)]
    perturb_closed_form: Option<f64>,

    #[command(flatten)]
    out: CommonOut,
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Input(anyhow::Error),
    Solver(anyhow::Error),
    ValidationFailed,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Solver(_) => 2,
            CliError::ValidationFailed => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidParam(_) | ModelError::InvalidSimConfig(_) => {
                CliError::Input(e.into())
            }
            _ => CliError::Solver(e.into()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

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
    let result = match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Validate(a) => commands::validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Input(err) | CliError::Solver(err) => eprintln!("error: {err:#}"),
                CliError::ValidationFailed => eprintln!("validation failed"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
