//! `ctmat` — tabulator for the off-shell two-body Coulomb transition matrix
//! at negative energy.
//!
//! Subcommands: `eval` (single point), `scan` (momentum-grid tables),
//! `validate` (cross-representation agreement report), `partial-wave`
//! (Legendre projections). Exit codes: 0 success/pass, 1 usage or
//! configuration error, 2 evaluation/accuracy failure, 3 validation
//! threshold exceeded.

mod commands;
mod config;
mod output;
mod resolve;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration (exit 1).
    Usage(String),
    /// Filesystem/encoding trouble (exit 1).
    Io(String),
    /// An evaluation or accuracy failure (exit 2).
    Eval(String),
    /// Validation report exceeded its threshold (exit 3).
    ValidationFailed(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Eval(_) => 2,
            CliError::ValidationFailed(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Eval(m) => m,
            CliError::ValidationFailed(m) => m,
        }
    }
}

impl From<ctmat::Error> for CliError {
    fn from(e: ctmat::Error) -> Self {
        match e {
            // asking for a route the context does not admit is an argument
            // problem, caught before any numerics run
            ctmat::Error::InvalidRepresentation { .. } | ctmat::Error::Unsupported(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Eval(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ctmat",
    version,
    about = "Off-shell Coulomb transition matrix at negative energy",
    long_about = "Evaluates the three-dimensional two-body Coulomb transition matrix off the \
                  energy shell at negative energy, through mutually validating series, \
                  integral, separated-singularity and closed-form representations, plus the \
                  generalized (ground-state-subtracted) T-matrix and partial-wave projections. \
                  All internal math uses hbar = 1 units."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single matrix element and print its decomposition
    Eval(EvalArgs),
    /// Tabulate matrix elements over a (k, k', cos theta) grid
    Scan(ScanArgs),
    /// Evaluate all admissible representations over a grid and report
    /// pairwise deviations against a threshold
    Validate(ValidateArgs),
    /// Project matrix elements onto partial waves
    #[command(name = "partial-wave")]
    PartialWave(PartialWaveArgs),
}

/// Energy context: either a physical system plus level index, or a direct
/// dimensionless (gamma, kappa) pair. The two input modes are mutually
/// exclusive.
#[derive(Args, Clone, Default)]
pub struct ContextArgs {
    /// Reduced mass (hbar = 1 units)
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Charge product q1*q2; the sign selects repulsive (+) or attractive (-)
    #[arg(long, allow_negative_numbers = true)]
    q1q2: Option<f64>,
    /// Bound-state level index (>= 1)
    #[arg(long)]
    n: Option<u32>,
    /// Coulomb parameter, dimensionless input mode (mu = 1 convention)
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Wave number, dimensionless input mode
    #[arg(long)]
    kappa: Option<f64>,
}

/// Quadrature tolerances shared by all evaluation routes.
#[derive(Args, Clone, Default)]
pub struct TolArgs {
    /// Relative tolerance (>= 1e-14)
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Absolute tolerance (>= 0)
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Subdivision budget per integral
    #[arg(long)]
    max_subdivisions: Option<usize>,
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    context: ContextArgs,
    #[command(flatten)]
    tols: TolArgs,
    /// Momentum magnitude k
    #[arg(long)]
    k: Option<f64>,
    /// Momentum magnitude k'
    #[arg(long)]
    kp: Option<f64>,
    /// Cosine of the angle between k and k'
    #[arg(long, allow_negative_numbers = true)]
    cos: Option<f64>,
    /// Representation to evaluate through
    #[arg(long)]
    rep: Option<String>,
    /// Key-value file supplying defaults for any flag
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
pub struct GridArgs {
    /// Smallest k
    #[arg(long)]
    k_min: Option<f64>,
    /// Largest k
    #[arg(long)]
    k_max: Option<f64>,
    /// Number of k points
    #[arg(long)]
    k_count: Option<usize>,
    /// k spacing: lin | log
    #[arg(long)]
    k_scale: Option<String>,
    /// Smallest k'
    #[arg(long)]
    kp_min: Option<f64>,
    /// Largest k'
    #[arg(long)]
    kp_max: Option<f64>,
    /// Number of k' points
    #[arg(long)]
    kp_count: Option<usize>,
    /// k' spacing: lin | log
    #[arg(long)]
    kp_scale: Option<String>,
    /// Comma-separated cos(theta) values
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    cos: Option<Vec<f64>>,
}

#[derive(Args)]
pub struct ScanArgs {
    #[command(flatten)]
    context: ContextArgs,
    #[command(flatten)]
    tols: TolArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated representations (default: all admissible)
    #[arg(long, value_delimiter = ',')]
    reps: Option<Vec<String>>,
    /// Output format: csv | json
    #[arg(long)]
    format: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Key-value file supplying defaults for any flag
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    context: ContextArgs,
    #[command(flatten)]
    tols: TolArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated representations (default: all admissible)
    #[arg(long, value_delimiter = ',')]
    reps: Option<Vec<String>>,
    /// Pass/fail threshold on the maximum pairwise relative deviation
    #[arg(long)]
    threshold: Option<f64>,
    /// Path for the JSON report (the human-readable report goes to stdout)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Key-value file supplying defaults for any flag
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
pub struct PartialWaveArgs {
    #[command(flatten)]
    context: ContextArgs,
    #[command(flatten)]
    tols: TolArgs,
    /// Comma-separated k values
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<f64>>,
    /// Comma-separated k' values
    #[arg(long, value_delimiter = ',')]
    kp: Option<Vec<f64>>,
    /// Smallest partial wave
    #[arg(long)]
    l_min: Option<u32>,
    /// Largest partial wave
    #[arg(long)]
    l_max: Option<u32>,
    /// Representation to project
    #[arg(long)]
    rep: Option<String>,
    /// Output format: csv | json
    #[arg(long)]
    format: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Key-value file supplying defaults for any flag
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version print to stdout and exit 0; real parse errors are
            // usage errors (exit 1)
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            std::process::exit(if is_help { 0 } else { 1 });
        }
    };
    let result = match cli.command {
        Command::Eval(args) => commands::eval(args),
        Command::Scan(args) => commands::scan(args),
        Command::Validate(args) => commands::validate(args),
        Command::PartialWave(args) => commands::partial_wave(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
