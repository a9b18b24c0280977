use std::fmt;
use std::time::Instant;

use crate::data::{batches, LabeledCorpus, Split};
use crate::error::{Error, Result};
use crate::eval::{accuracy, predict_split};
use crate::exec::Executor;
use crate::model::{Model, ModelConfig};
use crate::rng;

use super::adam::{AdamConfig, AdamState};
use super::backward::backward_with;
use super::params::ParameterSet;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// Epochs without a validation improvement before stopping; 0 disables early stopping.
    pub patience: usize,
    pub adam: AdamConfig,
    pub jobs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            batch_size: 16,
            patience: 10,
            adam: AdamConfig::default(),
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_acc: f64,
    pub seconds: f64,
}

impl fmt::Display for EpochRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "epoch={} train_loss={:.6} val_acc={:.6} seconds={:.3}",
            self.epoch, self.train_loss, self.val_acc, self.seconds
        )
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the epoch with the best validation accuracy.
    pub model: Model,
    pub log: Vec<EpochRecord>,
    pub best_epoch: Option<usize>,
    pub best_val_acc: Option<f64>,
}

/// Trains a freshly initialized model. See [`train_model`].
pub fn train(
    config: ModelConfig,
    corpus: &LabeledCorpus,
    settings: &TrainConfig,
    on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    train_model(Model::init(config)?, corpus, settings, on_epoch)
}

/// Mini-batch Adam over the training split, reshuffled every epoch from the
/// model seed. After each epoch the validation accuracy is measured and the
/// best parameters (earliest on ties) are retained.
pub fn train_model(
    mut model: Model,
    corpus: &LabeledCorpus,
    settings: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    if settings.batch_size == 0 {
        return Err(Error::Config("batch size must be at least 1".into()));
    }
    let n_train = corpus.split_len(Split::Train);
    if n_train == 0 || corpus.split_len(Split::Validation) == 0 {
        return Err(Error::Config(format!(
            "corpus `{}` needs non-empty train and validation splits",
            corpus.name
        )));
    }
    if model.config().vocab_size != corpus.vocab_size() {
        return Err(Error::Config(format!(
            "model vocabulary {} does not match corpus vocabulary {}",
            model.config().vocab_size,
            corpus.vocab_size()
        )));
    }

    let exec = Executor::new(settings.jobs)?;
    let seed = model.config().seed;
    let mut adam = AdamState::new(model.config().parameter_count(), settings.adam);
    let mut log = Vec::new();
    let mut best: Option<(usize, f64, ParameterSet)> = None;

    for epoch in 1..=settings.epochs {
        let started = Instant::now();
        let mut loss_sum = 0.0;
        for batch in batches(corpus, Split::Train, settings.batch_size, seed, epoch as u64) {
            let (loss, grads) = backward_with(&model, &batch, &exec)?;
            adam.step(&mut model, &grads)?;
            reinit_degenerate_rows(&mut model, seed, adam.t);
            loss_sum += loss * batch.len() as f64;
        }
        let predictions = predict_split(&model, corpus, Split::Validation, &exec)?;
        let labels: Vec<u8> = corpus
            .indices(Split::Validation)
            .iter()
            .map(|&i| corpus.examples[i].label)
            .collect();
        let preds: Vec<u8> = predictions.iter().map(|p| p.label).collect();
        let record = EpochRecord {
            epoch,
            train_loss: loss_sum / n_train as f64,
            val_acc: accuracy(&preds, &labels)?,
            seconds: started.elapsed().as_secs_f64(),
        };
        on_epoch(&record);

        let improved = best.as_ref().is_none_or(|(_, acc, _)| record.val_acc > *acc);
        if improved {
            best = Some((epoch, record.val_acc, ParameterSet::from_model(&model)));
        }
        log.push(record);

        let best_epoch = best.as_ref().map_or(0, |b| b.0);
        if settings.patience > 0 && epoch - best_epoch >= settings.patience {
            log::info!("early stop after epoch {epoch}; best epoch {best_epoch}");
            break;
        }
    }

    let (best_epoch, best_val_acc) = match best {
        Some((epoch, acc, params)) => {
            params.apply_to(&mut model)?;
            (Some(epoch), Some(acc))
        }
        None => (None, None),
    };
    Ok(TrainOutcome {
        model,
        log,
        best_epoch,
        best_val_acc,
    })
}

/// Rows whose norm collapsed below the normalization floor are redrawn from
/// the initialization distribution.
fn reinit_degenerate_rows(model: &mut Model, seed: u64, step: u64) {
    let Some(table) = model.complex_table_mut() else {
        return;
    };
    let mut rng = None;
    for id in 0..table.vocab_size() {
        if table.row_norm(id) < crate::clinalg::NORMALIZE_EPS {
            log::warn!("embedding row {id} collapsed at step {step}; re-initializing");
            let rng = rng.get_or_insert_with(|| rng::indexed_stream(seed, rng::STREAM_REINIT, step));
            table.reinit_row(id, rng);
        }
    }
}
