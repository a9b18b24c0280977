//! Corpus ingestion: tokenization, vocabulary, 8:1:1 splits and padded batches.

mod batch;
pub mod prepared;
mod split;
mod tsv;
mod vocab;

pub use batch::{batches, Batch, BatchIter};
pub use prepared::{load_prepared, write_prepared, Sources};
pub use split::{read_split_tags, split_8_1_1, write_split_tags, Split};
pub use tsv::{load_tsv, parse_tsv, RawExample};
pub use vocab::{build_vocab, Vocabulary, PAD_ID, UNK_ID};

use crate::error::{Error, Result};

/// Lowercase, split on whitespace, and trim non-alphanumeric characters from
/// both ends of each piece. Pieces that are entirely punctuation vanish.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|piece| piece.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|t| !t.is_empty())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub tokens: Vec<u32>,
    pub label: u8,
}

/// Encoded sentences with labels and split tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCorpus {
    pub name: String,
    pub vocab: Vocabulary,
    pub examples: Vec<Example>,
    pub splits: Vec<Split>,
}

impl LabeledCorpus {
    /// Builds the vocabulary from the training split only and encodes every example.
    pub fn from_raw(
        name: impl Into<String>,
        raw: &[RawExample],
        splits: Vec<Split>,
        min_frequency: usize,
    ) -> Result<Self> {
        if raw.len() != splits.len() {
            return Err(Error::Dimension {
                expected: raw.len(),
                got: splits.len(),
            });
        }
        let train = raw
            .iter()
            .zip(&splits)
            .filter(|(_, s)| **s == Split::Train)
            .map(|(r, _)| r.tokens.as_slice());
        let vocab = build_vocab(train, min_frequency)?;
        Self::with_vocab(name, vocab, raw, splits)
    }

    /// Encodes `raw` against an existing vocabulary.
    pub fn with_vocab(
        name: impl Into<String>,
        vocab: Vocabulary,
        raw: &[RawExample],
        splits: Vec<Split>,
    ) -> Result<Self> {
        if raw.len() != splits.len() {
            return Err(Error::Dimension {
                expected: raw.len(),
                got: splits.len(),
            });
        }
        let examples = raw
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if r.tokens.is_empty() {
                    return Err(Error::EmptySentence.in_sentence(i));
                }
                Ok(Example {
                    tokens: vocab.encode(&r.tokens),
                    label: r.label,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: name.into(),
            vocab,
            examples,
            splits,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn indices(&self, split: Split) -> Vec<usize> {
        self.splits
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == split)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn split_len(&self, split: Split) -> usize {
        self.splits.iter().filter(|s| **s == split).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Penguins fly."), vec!["penguins", "fly"]);
        assert_eq!(tokenize("don't stop"), vec!["don't", "stop"]);
        assert!(tokenize("!!!").is_empty());
        assert_eq!(tokenize("  A -- b,  (C) "), vec!["a", "b", "c"]);
        assert_eq!(tokenize("Café 42!"), vec!["café", "42"]);
    }

    #[test]
    fn corpus_vocab_comes_from_train_only() {
        let raw = vec![
            RawExample::new(1, "good film"),
            RawExample::new(0, "bad film"),
            RawExample::new(1, "unseen words"),
        ];
        let splits = vec![Split::Train, Split::Train, Split::Test];
        let corpus = LabeledCorpus::from_raw("t", &raw, splits, 1).unwrap();
        assert_eq!(corpus.vocab_size(), 2 + 3);
        assert_eq!(corpus.examples[2].tokens, vec![UNK_ID, UNK_ID]);
        assert_eq!(corpus.indices(Split::Test), vec![2]);
    }
}
