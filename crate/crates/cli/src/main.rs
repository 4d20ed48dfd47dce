//! Command-line interface for the Ramsey-interferometer estimation toolkit.
//!
//! Subcommands:
//!
//! - `ingest` — summary statistics of a time-series CSV column
//! - `train-qnn` — train an encoder/decoder Ramsey circuit against a prior
//! - `sweep-lr` — run a grid of learning rates and qubit counts
//! - `fisher` — Fisher information and Cramér–Rao bounds over a phase range
//! - `trotter` — first-order product-formula error versus step count
//! - `train-lstm` — train the recurrent baseline forecaster on a CSV column
//!
//! Every command accepts `--config <file>` (flat `key=value` lines; explicit
//! flags win) and `--out <dir>`, and writes a `manifest.txt` with the fully
//! resolved configuration next to its outputs so any run can be reproduced
//! with `--config <out>/manifest.txt`.
//!
//! Exit codes: 0 success, 1 runtime failure (missing file, bad data,
//! non-convergence), 2 usage error (bad flag or configuration value).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Failure modes that map onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// The invocation itself is wrong (exit code 2).
    Usage(String),
    /// The invocation is valid but the work failed (exit code 1).
    Runtime(anyhow::Error),
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self::Usage(message.into())
    }
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        Self::Runtime(err)
    }
}

#[derive(Debug, Parser)]
#[command(name = "qmetro", version, about = "Ramsey-interferometer estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print summary statistics of one CSV column.
    Ingest(IngestArgs),
    /// Train the encoder/decoder circuit against a normal prior.
    TrainQnn(TrainQnnArgs),
    /// Train across a grid of learning rates and qubit counts.
    SweepLr(SweepLrArgs),
    /// Tabulate Fisher information and Cramér–Rao bounds over a phase range.
    Fisher(FisherArgs),
    /// Tabulate product-formula error against exact evolution.
    Trotter(TrotterArgs),
    /// Train the recurrent baseline forecaster on a CSV column.
    TrainLstm(TrainLstmArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
struct CommonArgs {
    /// Flat key=value configuration file; explicit flags override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input CSV file.
    #[arg(long, value_name = "FILE")]
    csv: Option<String>,
    /// Column to summarize.
    #[arg(long, value_name = "NAME")]
    column: Option<String>,
    /// Emit the statistics as a JSON object instead of plain text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct TrainQnnArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of sensing qubits (1–6).
    #[arg(long)]
    qubits: Option<usize>,
    /// Encoder depth (layers before the phase imprint).
    #[arg(long)]
    ec_depth: Option<usize>,
    /// Decoder depth (layers after the phase imprint).
    #[arg(long)]
    dc_depth: Option<usize>,
    /// Number of prior-grid partitions.
    #[arg(long)]
    partitions: Option<usize>,
    /// Gradient-descent learning rate.
    #[arg(long)]
    lr: Option<f64>,
    /// Number of training iterations.
    #[arg(long)]
    iters: Option<usize>,
    /// Seed for the initial circuit angles.
    #[arg(long)]
    seed: Option<u64>,
    /// Scale of the random initial angles.
    #[arg(long)]
    init_scale: Option<f64>,
    /// Initial estimator slope (default: prior mean / qubits).
    #[arg(long)]
    a_init: Option<f64>,
    /// CSV file to derive the prior mean/variance from.
    #[arg(long, value_name = "FILE")]
    csv: Option<String>,
    /// Column of the CSV to use.
    #[arg(long, value_name = "NAME")]
    column: Option<String>,
    /// Prior mean (overrides the CSV-derived value; requires --variance).
    #[arg(long)]
    mean: Option<f64>,
    /// Prior variance (overrides the CSV-derived value; requires --mean).
    #[arg(long)]
    variance: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepLrArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated learning rates.
    #[arg(long, value_name = "LIST")]
    lrs: Option<String>,
    /// Comma-separated qubit counts.
    #[arg(long, value_name = "LIST")]
    qubits: Option<String>,
    /// Encoder depth.
    #[arg(long)]
    ec_depth: Option<usize>,
    /// Decoder depth.
    #[arg(long)]
    dc_depth: Option<usize>,
    /// Number of prior-grid partitions.
    #[arg(long)]
    partitions: Option<usize>,
    /// Number of training iterations per run.
    #[arg(long)]
    iters: Option<usize>,
    /// Base seed; run k uses seed base+k.
    #[arg(long)]
    seed: Option<u64>,
    /// Scale of the random initial angles.
    #[arg(long)]
    init_scale: Option<f64>,
    /// CSV file to derive the prior mean/variance from.
    #[arg(long, value_name = "FILE")]
    csv: Option<String>,
    /// Column of the CSV to use.
    #[arg(long, value_name = "NAME")]
    column: Option<String>,
    /// Prior mean (requires --variance).
    #[arg(long)]
    mean: Option<f64>,
    /// Prior variance (requires --mean).
    #[arg(long)]
    variance: Option<f64>,
}

#[derive(Debug, Args)]
struct FisherArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Circuit preset: `ramsey-1q` or `zero`.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Qubit count for the `zero` preset.
    #[arg(long)]
    qubits: Option<usize>,
    /// Lower end of the phase range.
    #[arg(long)]
    phi_min: Option<f64>,
    /// Upper end of the phase range.
    #[arg(long)]
    phi_max: Option<f64>,
    /// Number of phase samples.
    #[arg(long)]
    points: Option<usize>,
    /// Central-difference step for the probability derivatives.
    #[arg(long)]
    step: Option<f64>,
    /// Measurement count N in the Cramér–Rao bound 1/(N·F).
    #[arg(long)]
    measurements: Option<usize>,
    /// Per-row shot count for the sampled-estimator variance column.
    #[arg(long)]
    shots: Option<usize>,
    /// Seed for the sampled-estimator experiments.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct TrotterArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Hamiltonian as a sum of weighted Pauli strings, e.g. `X+Z` or
    /// `0.5*XX+1.5*ZI`.
    #[arg(long, value_name = "SUM")]
    hamiltonian: Option<String>,
    /// Total evolution time.
    #[arg(long)]
    time: Option<f64>,
    /// Comma-separated step counts.
    #[arg(long, value_name = "LIST")]
    steps: Option<String>,
    /// Product-formula order (only 1 is supported).
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Debug, Args)]
struct TrainLstmArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input CSV file.
    #[arg(long, value_name = "FILE")]
    csv: Option<String>,
    /// Column of the CSV to forecast.
    #[arg(long, value_name = "NAME")]
    column: Option<String>,
    /// Input window length.
    #[arg(long)]
    window: Option<usize>,
    /// Number of training epochs.
    #[arg(long)]
    epochs: Option<usize>,
    /// Mini-batch size.
    #[arg(long)]
    batch: Option<usize>,
    /// SGD learning rate.
    #[arg(long)]
    lr: Option<f64>,
    /// Seed for weight initialization and batch shuffling.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest(args) => commands::cmd_ingest(args),
        Command::TrainQnn(args) => commands::cmd_train_qnn(args),
        Command::SweepLr(args) => commands::cmd_sweep_lr(args),
        Command::Fisher(args) => commands::cmd_fisher(args),
        Command::Trotter(args) => commands::cmd_trotter(args),
        Command::TrainLstm(args) => commands::cmd_train_lstm(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(2)
        }
    }
}
