//! Metrics, significance tests, diagnostic corpora and the experiment grid.

mod experiment;
pub mod reference;
mod significance;
pub mod special;
mod toy;

pub use experiment::{
    results_csv, run_experiment, significance_csv, CellOutcome, ExperimentConfig, ExperimentReport,
    GridRow,
};
pub use significance::{
    discordant_counts, mcnemar_from_counts, mcnemar_test, welch_t_test_two_tailed, SignificanceReport,
    TestKind, MCNEMAR_EXACT_LIMIT, SIGNIFICANCE_LEVEL,
};
pub use toy::{make_pair_xor_toy, make_separable_toy, PAIR_HELDOUT_COPIES, PAIR_XOR_TYPES, SEPARABLE_SIZE};

use crate::data::{LabeledCorpus, Split};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::model::{Model, ModelKind, DECISION_THRESHOLD};

/// Fraction of exact matches.
pub fn accuracy(predictions: &[u8], labels: &[u8]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::Dimension {
            expected: labels.len(),
            got: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::Config("accuracy of an empty split".into()));
    }
    let correct = predictions.iter().zip(labels).filter(|(p, y)| p == y).count();
    Ok(correct as f64 / labels.len() as f64)
}

/// Model output for one example of a split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// Position of the example in the corpus.
    pub index: usize,
    pub probability: f64,
    pub label: u8,
}

/// Scores every example of `split`, in corpus order.
pub fn predict_split(model: &Model, corpus: &LabeledCorpus, split: Split, exec: &Executor) -> Result<Vec<Prediction>> {
    let scorer = model.scorer()?;
    let indices = corpus.indices(split);
    exec.map(indices.len(), |k| {
        let index = indices[k];
        let probability = scorer
            .probability(&corpus.examples[index].tokens)
            .map_err(|e| e.in_sentence(index))?;
        Ok(Prediction {
            index,
            probability,
            label: u8::from(probability >= DECISION_THRESHOLD),
        })
    })
    .into_iter()
    .collect()
}

/// Gold labels of `split`, in corpus order.
pub fn split_labels(corpus: &LabeledCorpus, split: Split) -> Vec<u8> {
    corpus
        .indices(split)
        .into_iter()
        .map(|i| corpus.examples[i].label)
        .collect()
}

/// Test-split outcome of one trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub dataset: String,
    pub kind: ModelKind,
    pub seed: u64,
    pub accuracy: f64,
    pub predictions: Vec<Prediction>,
}

impl RunResult {
    pub fn evaluate(model: &Model, corpus: &LabeledCorpus, split: Split, exec: &Executor) -> Result<Self> {
        let predictions = predict_split(model, corpus, split, exec)?;
        let labels: Vec<u8> = predictions.iter().map(|p| p.label).collect();
        Ok(Self {
            dataset: corpus.name.clone(),
            kind: model.kind(),
            seed: model.config().seed,
            accuracy: accuracy(&labels, &split_labels(corpus, split))?,
            predictions,
        })
    }

    pub fn labels(&self) -> Vec<u8> {
        self.predictions.iter().map(|p| p.label).collect()
    }
}
