//! `qembed` command-line tool.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 I/O, data-format
//! or checkpoint error, 4 numerical failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qembed::Error;

use config::{DataArgs, ModelArgs};

#[derive(Debug, Parser)]
#[command(name = "qembed", version, about = "Complex word-embedding sentence classifiers")]
struct Cli {
    /// Worker threads for batch gradients, evaluation and experiment cells [default: 1].
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tokenize a labeled TSV, split it and build the vocabulary.
    Prepare {
        /// Single `label<TAB>text` file, split 8:1:1.
        #[arg(long, conflicts_with_all = ["train", "validation", "test"])]
        input: Option<PathBuf>,
        /// Pre-split training file (requires --validation and --test).
        #[arg(long, requires_all = ["validation", "test"])]
        train: Option<PathBuf>,
        #[arg(long)]
        validation: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = config::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = config::DEFAULT_MIN_FREQUENCY)]
        min_frequency: usize,
    },
    /// Train a model and write its checkpoint and epoch log.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// TOML file with defaults for any of the flags.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Checkpoint output path (default: model.ckpt).
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Epoch log path (default: checkpoint path with `.log` appended).
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Accuracy of a checkpoint on one split, plus per-example predictions.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// train, val or test.
        #[arg(long, default_value = "test")]
        split: String,
        /// CSV output `index,label,probability,prediction`.
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Score raw sentences.
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Prepared dataset whose vocabulary the checkpoint was trained with.
        #[command(flatten)]
        data: DataArgs,
        /// Sentence to score; may be repeated.
        #[arg(long)]
        text: Vec<String>,
        /// File with one sentence per line.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Show a word's amplitudes and phases, or the interference term of two words.
    Inspect {
        #[arg(long)]
        checkpoint: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Word to inspect.
        #[arg(long)]
        token: String,
        /// Second word: report the inner product of the two states.
        #[arg(long)]
        pair: Option<String>,
        /// Number of basis components to list.
        #[arg(long, default_value_t = 5)]
        top_k: usize,
    },
    /// Train and evaluate a dataset × model × seed grid with significance tests.
    Experiment {
        /// TOML file listing datasets, models, seeds and training settings.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the file's `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = config::DATA_DIR_ENV)]
        data_root: Option<PathBuf>,
    },
    /// Compare analytic gradients with central differences on one batch.
    Gradcheck {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Check this checkpoint instead of a fresh initialization.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Finite-difference step.
        #[arg(long, default_value_t = 1e-5)]
        step: f64,
        /// Coordinates to sample.
        #[arg(long, default_value_t = 200)]
        sample: usize,
        /// Largest acceptable relative error.
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("gradient check failed: max relative error {worst:.3e} exceeds {tolerance:e}")]
    GradientMismatch { worst: f64, tolerance: f64 },
    #[error("{count} experiment cell(s) failed; first: {first}")]
    FailedCells { count: usize, first: String, numeric: bool },
}

type CliResult<T> = std::result::Result<T, CliError>;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Sentence { source, .. } => exit_code(source),
        e if e.is_numeric() => 4,
        Error::Io { .. } | Error::Parse { .. } | Error::Checkpoint(_) => 3,
        _ => 2,
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => exit_code(e),
            CliError::GradientMismatch { .. } | CliError::FailedCells { numeric: true, .. } => 4,
            CliError::FailedCells { .. } => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match commands::run(cli.command, cli.jobs) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
