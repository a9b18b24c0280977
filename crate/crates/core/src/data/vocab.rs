use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;

const PAD_TOKEN: &str = "<pad>";
const UNK_TOKEN: &str = "<unk>";

/// Token ↔ id mapping. Ids 0 and 1 are reserved for padding and unknown tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    to_id: HashMap<String, u32>,
    tokens: Vec<String>,
    min_frequency: usize,
}

impl Vocabulary {
    /// Vocabulary holding only the reserved entries followed by `tokens` in order.
    pub fn from_tokens<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Self {
            to_id: HashMap::new(),
            tokens: vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()],
            min_frequency: 1,
        };
        for t in tokens {
            let t = t.into();
            if vocab.to_id.contains_key(&t) {
                return Err(Error::Config(format!("duplicate vocabulary token `{t}`")));
            }
            vocab.to_id.insert(t.clone(), vocab.tokens.len() as u32);
            vocab.tokens.push(t);
        }
        Ok(vocab)
    }

    /// Size including the reserved ids.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.len() <= 2
    }

    pub fn min_frequency(&self) -> usize {
        self.min_frequency
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.to_id.get(token).copied()
    }

    pub fn encode_token(&self, token: &str) -> u32 {
        self.id(token).unwrap_or(UNK_ID)
    }

    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<u32> {
        tokens.iter().map(|t| self.encode_token(t.as_ref())).collect()
    }

    pub fn decode(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    /// Non-reserved tokens in id order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens[2..]
    }

    /// One token per line; line `k` (0-based) holds id `k + 2`.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for t in self.tokens() {
            writeln!(out, "{t}").map_err(|e| Error::io("writing vocabulary", e))?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let tokens = input
            .lines()
            .collect::<std::io::Result<Vec<_>>>()
            .map_err(|e| Error::io("reading vocabulary", e))?;
        Self::from_tokens(tokens)
    }
}

/// Ids in descending frequency order, ties broken lexicographically; tokens
/// seen fewer than `min_frequency` times are left out (and encode as UNK).
pub fn build_vocab<'a, I>(train: I, min_frequency: usize) -> Result<Vocabulary>
where
    I: IntoIterator<Item = &'a [String]>,
{
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut sentences = 0usize;
    for sentence in train {
        sentences += 1;
        for t in sentence {
            *counts.entry(t.as_str()).or_default() += 1;
        }
    }
    if sentences == 0 {
        return Err(Error::Config("cannot build a vocabulary from an empty training split".into()));
    }
    let mut ranked: Vec<(&str, usize)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_frequency)
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut vocab = Vocabulary::from_tokens(ranked.into_iter().map(|(t, _)| t))?;
    vocab.min_frequency = min_frequency;
    Ok(vocab)
}
