use std::io::{BufRead, Write};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn tag(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "val",
            Split::Test => "test",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "train" => Some(Split::Train),
            "val" | "validation" | "dev" => Some(Split::Validation),
            "test" => Some(Split::Test),
            _ => None,
        }
    }
}

/// Seeded 8:1:1 partition. Validation and test each get `⌊N/10⌋` examples,
/// training gets the remainder.
pub fn split_8_1_1(n_examples: usize, seed: u64) -> Result<Vec<Split>> {
    if n_examples < 10 {
        return Err(Error::Config(format!(
            "need at least 10 examples for an 8:1:1 split, got {n_examples}"
        )));
    }
    let mut order: Vec<usize> = (0..n_examples).collect();
    order.shuffle(&mut rng::stream(seed, rng::STREAM_SPLIT));
    let held_out = n_examples / 10;
    let n_train = n_examples - 2 * held_out;
    let mut tags = vec![Split::Train; n_examples];
    for &i in &order[n_train..n_train + held_out] {
        tags[i] = Split::Validation;
    }
    for &i in &order[n_train + held_out..] {
        tags[i] = Split::Test;
    }
    Ok(tags)
}

/// `index<TAB>{train|val|test}` per line.
pub fn write_split_tags<W: Write>(tags: &[Split], mut out: W) -> Result<()> {
    for (i, s) in tags.iter().enumerate() {
        writeln!(out, "{i}\t{}", s.tag()).map_err(|e| Error::io("writing split tags", e))?;
    }
    Ok(())
}

pub fn read_split_tags<R: BufRead>(input: R, source: &str) -> Result<Vec<Split>> {
    let mut tags = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: source.to_string(),
            line: i + 1,
            message,
        };
        let (index, tag) = line
            .split_once('\t')
            .ok_or_else(|| err("expected `index<TAB>tag`".into()))?;
        let index: usize = index
            .parse()
            .map_err(|_| err(format!("bad index `{index}`")))?;
        if index != tags.len() {
            return Err(err(format!("expected index {}, found {index}", tags.len())));
        }
        tags.push(Split::from_tag(tag.trim()).ok_or_else(|| err(format!("unknown split `{tag}`")))?);
    }
    Ok(tags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(tags: &[Split]) -> (usize, usize, usize) {
        let c = |s| tags.iter().filter(|t| **t == s).count();
        (c(Split::Train), c(Split::Validation), c(Split::Test))
    }

    #[test]
    fn proportions() {
        assert_eq!(counts(&split_8_1_1(100, 1).unwrap()), (80, 10, 10));
        assert_eq!(counts(&split_8_1_1(105, 1).unwrap()), (85, 10, 10));
        assert_eq!(counts(&split_8_1_1(10, 1).unwrap()), (8, 1, 1));
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(split_8_1_1(500, 9).unwrap(), split_8_1_1(500, 9).unwrap());
        assert_ne!(split_8_1_1(500, 9).unwrap(), split_8_1_1(500, 10).unwrap());
    }

    #[test]
    fn too_few_examples() {
        assert!(split_8_1_1(9, 0).is_err());
    }

    #[test]
    fn tag_file_round_trip() {
        let tags = split_8_1_1(37, 4).unwrap();
        let mut buf = Vec::new();
        write_split_tags(&tags, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("0\t"));
        assert_eq!(read_split_tags(buf.as_slice(), "mem").unwrap(), tags);
    }
}
