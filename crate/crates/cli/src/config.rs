//! Layered settings: command-line flag, then config file, then default.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use qembed::autodiff::{AdamConfig, TrainConfig};
use qembed::model::{ModelConfig, ModelKind};
use qembed::{Error, Result};
use serde::Deserialize;

pub const DATA_DIR_ENV: &str = "QEMBED_DATA_DIR";

pub const DEFAULT_N: usize = 100;
pub const DEFAULT_BATCH: usize = 16;
pub const SST_BATCH: usize = 32;
pub const DEFAULT_EPOCHS: usize = 50;
pub const DEFAULT_PATIENCE: usize = 10;
pub const DEFAULT_LEARNING_RATE: f64 = 0.001;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MIN_FREQUENCY: usize = 1;

/// Keys accepted in a `--config` TOML file. Unknown keys are rejected.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub data: Option<PathBuf>,
    pub dataset: Option<String>,
    pub model_kind: Option<String>,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub batch_size: Option<usize>,
    pub epochs: Option<usize>,
    pub patience: Option<usize>,
    pub learning_rate: Option<f64>,
    pub seed: Option<u64>,
    pub checkpoint: Option<PathBuf>,
    pub jobs: Option<usize>,
    // experiment grid
    pub datasets: Option<Vec<String>>,
    pub models: Option<Vec<String>>,
    pub seeds: Option<Vec<u64>>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Worker count: `--jobs`, then the file's `jobs`, then 1.
pub fn resolve_jobs(flag: Option<usize>, file: &FileConfig) -> usize {
    flag.or(file.jobs).unwrap_or(1)
}

/// Where a prepared dataset lives.
#[derive(Debug, Clone, Args, Default)]
pub struct DataArgs {
    /// Prepared dataset directory.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Dataset name, resolved under the data root.
    #[arg(long)]
    pub dataset: Option<String>,
    /// Root holding prepared datasets by name.
    #[arg(long, env = DATA_DIR_ENV)]
    pub data_root: Option<PathBuf>,
}

impl DataArgs {
    pub fn resolve(&self, file: &FileConfig) -> Result<PathBuf> {
        if let Some(dir) = self.data.as_ref().or(file.data.as_ref()) {
            return Ok(dir.clone());
        }
        match self.dataset.as_ref().or(file.dataset.as_ref()) {
            Some(name) => resolve_named(name, self.data_root.as_deref()),
            None => Err(Error::Config("no dataset given; pass --data <dir> or --dataset <name>".into())),
        }
    }
}

/// `name` under the data root, unless it already names a directory.
pub fn resolve_named(name: &str, root: Option<&Path>) -> Result<PathBuf> {
    match root {
        Some(root) => Ok(root.join(name)),
        None if Path::new(name).is_dir() => Ok(PathBuf::from(name)),
        None => Err(Error::Config(format!(
            "dataset `{name}` given by name but {DATA_DIR_ENV} is not set"
        ))),
    }
}

/// Dataset name used for per-dataset defaults.
pub fn dataset_name(dir: &Path) -> String {
    dir.file_name()
        .map(|s| s.to_string_lossy().to_lowercase())
        .unwrap_or_default()
}

/// Model and optimizer flags shared by `train`, `gradcheck` and `experiment`.
#[derive(Debug, Clone, Args, Default)]
pub struct ModelArgs {
    /// ce-sup, ce-mix or real.
    #[arg(long)]
    pub model_kind: Option<String>,
    /// Embedding dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Projector rank (default n/2).
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Epochs without validation improvement before stopping; 0 disables.
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub kind: ModelKind,
    pub n: usize,
    pub r: usize,
    pub seed: u64,
    pub train: TrainConfig,
}

fn check_range<T: PartialOrd + std::fmt::Display>(name: &str, value: T, min: T) -> Result<T> {
    if value < min {
        return Err(Error::Config(format!("{name} must be at least {min}, got {value}")));
    }
    Ok(value)
}

impl ModelArgs {
    /// Applies flag > file > default. `dataset` selects the batch-size default.
    pub fn resolve(&self, file: &FileConfig, dataset: &str, jobs: usize) -> Result<Resolved> {
        let kind: ModelKind = self
            .model_kind
            .as_ref()
            .or(file.model_kind.as_ref())
            .map_or("ce-mix", String::as_str)
            .parse()?;
        let n = check_range("n", self.n.or(file.n).unwrap_or(DEFAULT_N), 2)?;
        let r = self.r.or(file.r).unwrap_or(n / 2);
        if r == 0 || r >= n {
            return Err(Error::Config(format!("r must satisfy 1 <= r < n, got r={r} n={n}")));
        }
        let default_batch = if dataset == "sst" { SST_BATCH } else { DEFAULT_BATCH };
        let batch_size = check_range("batch-size", self.batch_size.or(file.batch_size).unwrap_or(default_batch), 1)?;
        let learning_rate = self.learning_rate.or(file.learning_rate).unwrap_or(DEFAULT_LEARNING_RATE);
        if !(learning_rate.is_finite() && learning_rate > 0.0) {
            return Err(Error::Config(format!("learning-rate must be positive, got {learning_rate}")));
        }
        Ok(Resolved {
            kind,
            n,
            r,
            seed: self.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            train: TrainConfig {
                epochs: self.epochs.or(file.epochs).unwrap_or(DEFAULT_EPOCHS),
                batch_size,
                patience: self.patience.or(file.patience).unwrap_or(DEFAULT_PATIENCE),
                adam: AdamConfig {
                    learning_rate,
                    ..AdamConfig::default()
                },
                jobs,
            },
        })
    }
}

impl Resolved {
    pub fn model_config(&self, vocab_size: usize) -> ModelConfig {
        ModelConfig::new(self.kind, self.n, vocab_size, self.seed).with_rank(self.r)
    }
}
