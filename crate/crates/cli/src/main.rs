//! `qcoh`: sweeps, formula verification, channel power and state diagnostics
//! for Bell-diagonal states under two-qubit memory channels.
//!
//! Exit codes: 0 success (including verification findings), 1 strict-mode
//! mismatch, 2 usage error, 3 I/O error, 4 numerical failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FloatList, Layers, TimeGrid};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<qcoh_core::Error> for CliError {
    fn from(e: qcoh_core::Error) -> Self {
        use qcoh_core::Error::*;
        match e {
            InvalidBellParams { .. }
            | OutOfRange { .. }
            | InvalidSweep(_)
            | UnknownName { .. }
            | InvalidState { .. }
            | BasisIndex(_) => CliError::Usage(e.to_string()),
            DimensionMismatch { .. }
            | NotHermitian { .. }
            | NoConvergence { .. }
            | NonFinite { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qcoh",
    version,
    about = "Coherence of Bell-diagonal states under correlated two-qubit noise",
    after_help = "Settings resolve as: flag > QCOH_<KEY> environment variable > --config file > default."
)]
struct Cli {
    /// key = value file supplying defaults for any long flag
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coherence of the channel output over a (mu, p) grid, as CSV
    Sweep(SweepArgs),
    /// Cross-check closed-form expressions against the Kraus machinery
    Verify(VerifyArgs),
    /// Cohering or decohering power of a single channel
    Power(PowerArgs),
    /// Eigenvalues and coherence of a Bell-diagonal input state
    State(StateArgs),
}

#[derive(Args, Debug, Default)]
struct StateFlags {
    #[arg(long, allow_negative_numbers = true)]
    c1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c3: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// ad | pd | dep
    #[arg(long)]
    channel: Option<String>,
    /// l1 | re | both
    #[arg(long)]
    measure: Option<String>,
    #[command(flatten)]
    state: StateFlags,
    /// Comma-separated memory coefficients
    #[arg(long, value_name = "MU,...")]
    mu_list: Option<FloatList>,
    #[arg(long)]
    p_start: Option<f64>,
    #[arg(long)]
    p_stop: Option<f64>,
    #[arg(long)]
    p_count: Option<usize>,
    /// Decay rate for time mode, p = 1 - exp(-gamma t)
    #[arg(long)]
    gamma: Option<f64>,
    /// Time grid for time mode
    #[arg(long, value_name = "START,STOP,COUNT")]
    t_grid: Option<TimeGrid>,
    /// Phase damping flips sigma3 with probability p instead of p/2
    #[arg(long)]
    literal_text_probs: bool,
    /// Worker threads (0 = one per core)
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// ad | pd | dep | all
    #[arg(long)]
    channel: Option<String>,
    /// Points per axis of the (p, mu) validation grid
    #[arg(long)]
    grid: Option<usize>,
    #[command(flatten)]
    state: StateFlags,
    #[arg(long)]
    literal_text_probs: bool,
    /// Exit 1 if the mismatch set differs from the documented errata
    #[arg(long)]
    strict: bool,
    /// CSV destination; the text report then goes to stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PowerArgs {
    /// ad | pd | dep
    #[arg(long)]
    channel: Option<String>,
    /// cohering | decohering
    #[arg(long)]
    kind: Option<String>,
    /// l1 | re | both
    #[arg(long)]
    measure: Option<String>,
    /// Single damping probability
    #[arg(long)]
    p: Option<f64>,
    /// Single memory coefficient
    #[arg(long)]
    mu: Option<f64>,
    /// Grid over p instead of a single --p
    #[arg(long)]
    p_start: Option<f64>,
    #[arg(long)]
    p_stop: Option<f64>,
    #[arg(long)]
    p_count: Option<usize>,
    /// Comma-separated memory coefficients instead of a single --mu
    #[arg(long, value_name = "MU,...")]
    mu_list: Option<FloatList>,
    /// Use the four Bell states as the cohering-power reference basis
    #[arg(long)]
    bell_basis: bool,
    #[arg(long)]
    literal_text_probs: bool,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StateArgs {
    #[command(flatten)]
    state: StateFlags,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let config = match cli.config {
        Some(path) => Some(path),
        None => std::env::var_os("QCOH_CONFIG").map(PathBuf::from),
    };
    let env = std::env::vars().filter(|(k, _)| k != "QCOH_CONFIG");
    let layers = Layers::load(env, config.as_deref())?;
    match cli.command {
        Command::Sweep(args) => commands::sweep(args, &layers),
        Command::Verify(args) => commands::verify(args, &layers),
        Command::Power(args) => commands::power(args, &layers),
        Command::State(args) => commands::state(args, &layers),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qcoh: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
