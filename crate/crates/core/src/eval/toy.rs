//! Synthetic diagnostic corpora.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::data::{split_8_1_1, LabeledCorpus, RawExample, Split, Vocabulary};
use crate::error::{Error, Result};
use crate::rng;

pub const SEPARABLE_SIZE: usize = 2000;
const CLASS_WORDS: usize = 8;
const NOISE_WORDS: usize = 4;

/// Number of held-out copies of each pair in the validation and test splits.
pub const PAIR_HELDOUT_COPIES: usize = 25;

fn words(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|k| format!("{prefix}{k}")).collect()
}

/// Two classes with disjoint indicator words plus shared noise words.
/// Sentences have 3 to 6 tokens and always contain at least one indicator.
pub fn make_separable_toy(seed: u64) -> LabeledCorpus {
    let pos = words("p", CLASS_WORDS);
    let neg = words("n", CLASS_WORDS);
    let noise = words("x", NOISE_WORDS);
    let vocab = Vocabulary::from_tokens(pos.iter().chain(&neg).chain(&noise))
        .expect("toy vocabulary is well formed");

    let mut rng = rng::stream(seed, rng::STREAM_TOY);
    let mut raw = Vec::with_capacity(SEPARABLE_SIZE);
    for i in 0..SEPARABLE_SIZE {
        let label = (i % 2) as u8;
        let class = if label == 1 { &pos } else { &neg };
        let pool: Vec<&String> = class.iter().chain(&noise).collect();
        let len = rng.random_range(3..=6);
        let mut tokens: Vec<String> = (0..len)
            .map(|_| (*pool.choose(&mut rng).expect("non-empty pool")).clone())
            .collect();
        if !tokens.iter().any(|t| class.contains(t)) {
            let slot = rng.random_range(0..len);
            tokens[slot] = class.choose(&mut rng).expect("non-empty class").clone();
        }
        raw.push(RawExample { label, tokens });
    }
    let splits = split_8_1_1(SEPARABLE_SIZE, seed).expect("toy corpus is large enough");
    LabeledCorpus::with_vocab("separable", vocab, &raw, splits).expect("toy sentences are non-empty")
}

/// The four two-word sentences `a b → 1`, `a c → 0`, `d b → 0`, `d c → 1`.
pub const PAIR_XOR_TYPES: [(&str, u8); 4] = [("a b", 1), ("a c", 0), ("d b", 0), ("d c", 1)];

/// XOR over word pairs: each sentence type is repeated `replicas` times in the
/// training split and 25 times in each held-out split.
pub fn make_pair_xor_toy(replicas: usize) -> Result<LabeledCorpus> {
    if replicas < PAIR_HELDOUT_COPIES {
        return Err(Error::Config(format!(
            "pair-XOR corpus needs at least {PAIR_HELDOUT_COPIES} replicas, got {replicas}"
        )));
    }
    let vocab = Vocabulary::from_tokens(["a", "b", "c", "d"])?;
    let mut raw = Vec::new();
    let mut splits = Vec::new();
    for (split, copies) in [
        (Split::Train, replicas),
        (Split::Validation, PAIR_HELDOUT_COPIES),
        (Split::Test, PAIR_HELDOUT_COPIES),
    ] {
        for _ in 0..copies {
            for (text, label) in PAIR_XOR_TYPES {
                raw.push(RawExample::new(label, text));
                splits.push(split);
            }
        }
    }
    LabeledCorpus::with_vocab("pair-xor", vocab, &raw, splits)
}
