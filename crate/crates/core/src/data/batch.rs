use rand::seq::SliceRandom;

use crate::rng;

use super::{Example, LabeledCorpus, Split, PAD_ID};

/// Mini-batch of sentences padded to the longest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batch {
    /// `len() × width` ids, PAD beyond each row's true length.
    pub ids: Vec<u32>,
    pub width: usize,
    pub lengths: Vec<usize>,
    pub labels: Vec<u8>,
    /// Corpus positions of the rows.
    pub indices: Vec<usize>,
}

impl Batch {
    pub fn from_examples<'a, I>(examples: I) -> Self
    where
        I: IntoIterator<Item = (usize, &'a Example)>,
    {
        let items: Vec<(usize, &Example)> = examples.into_iter().collect();
        let width = items.iter().map(|(_, e)| e.tokens.len()).max().unwrap_or(0);
        let mut ids = vec![PAD_ID; items.len() * width];
        for (row, (_, e)) in items.iter().enumerate() {
            ids[row * width..row * width + e.tokens.len()].copy_from_slice(&e.tokens);
        }
        Self {
            ids,
            width,
            lengths: items.iter().map(|(_, e)| e.tokens.len()).collect(),
            labels: items.iter().map(|(_, e)| e.label).collect(),
            indices: items.iter().map(|(i, _)| *i).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// The true-length token ids of row `i`, padding excluded.
    pub fn sentence(&self, i: usize) -> &[u32] {
        &self.ids[i * self.width..i * self.width + self.lengths[i]]
    }
}

pub struct BatchIter<'a> {
    corpus: &'a LabeledCorpus,
    order: Vec<usize>,
    batch_size: usize,
    pos: usize,
}

impl Iterator for BatchIter<'_> {
    type Item = Batch;

    fn next(&mut self) -> Option<Batch> {
        if self.pos >= self.order.len() {
            return None;
        }
        let end = (self.pos + self.batch_size).min(self.order.len());
        let chunk = &self.order[self.pos..end];
        self.pos = end;
        Some(Batch::from_examples(
            chunk.iter().map(|&i| (i, &self.corpus.examples[i])),
        ))
    }
}

/// Batches over one split, reshuffled per `epoch` from `shuffle_seed`. The
/// final partial batch is kept.
pub fn batches(
    corpus: &LabeledCorpus,
    split: Split,
    batch_size: usize,
    shuffle_seed: u64,
    epoch: u64,
) -> BatchIter<'_> {
    let mut order = corpus.indices(split);
    order.shuffle(&mut rng::indexed_stream(shuffle_seed, rng::STREAM_SHUFFLE, epoch));
    BatchIter {
        corpus,
        order,
        batch_size: batch_size.max(1),
        pos: 0,
    }
}
