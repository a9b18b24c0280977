//! On-disk layout of a prepared dataset directory:
//! `data.tsv` (tokenized examples), `splits.tsv`, `vocab.txt` and `stats.txt`.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::split::{read_split_tags, split_8_1_1, write_split_tags, Split};
use super::tsv::{load_tsv, parse_tsv, RawExample};
use super::vocab::Vocabulary;
use super::LabeledCorpus;

pub const DATA_FILE: &str = "data.tsv";
pub const SPLITS_FILE: &str = "splits.tsv";
pub const VOCAB_FILE: &str = "vocab.txt";
pub const STATS_FILE: &str = "stats.txt";

/// Where the examples of a dataset come from.
#[derive(Debug, Clone, Copy)]
pub enum Sources<'a> {
    /// One file, partitioned 8:1:1 with the given seed.
    Single(&'a Path),
    /// Pre-defined train, validation and test files.
    Predefined {
        train: &'a Path,
        validation: &'a Path,
        test: &'a Path,
    },
}

/// Loaded examples plus their split tags, ready for vocabulary construction.
pub fn gather(sources: Sources<'_>, seed: u64) -> Result<(Vec<RawExample>, Vec<Split>)> {
    match sources {
        Sources::Single(path) => {
            let raw = load_tsv(path)?;
            let splits = split_8_1_1(raw.len(), seed)?;
            Ok((raw, splits))
        }
        Sources::Predefined { train, validation, test } => {
            let mut raw = Vec::new();
            let mut splits = Vec::new();
            for (path, split) in [(train, Split::Train), (validation, Split::Validation), (test, Split::Test)] {
                let part = load_tsv(path)?;
                splits.extend(std::iter::repeat_n(split, part.len()));
                raw.extend(part);
            }
            Ok((raw, splits))
        }
    }
}

/// `train=<k> val=<k> test=<k> vocab=<k>`
pub fn stats_line(corpus: &LabeledCorpus) -> String {
    format!(
        "train={} val={} test={} vocab={}",
        corpus.split_len(Split::Train),
        corpus.split_len(Split::Validation),
        corpus.split_len(Split::Test),
        corpus.vocab_size()
    )
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(format!("creating {}", path.display()), e))
}

/// Writes the prepared layout for `corpus`, whose examples came from `raw`.
pub fn write_prepared(dir: &Path, raw: &[RawExample], corpus: &LabeledCorpus) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let mut data = create(dir, DATA_FILE)?;
    for r in raw {
        writeln!(data, "{}\t{}", r.label, r.tokens.join(" ")).map_err(|e| Error::io(DATA_FILE, e))?;
    }
    data.flush().map_err(|e| Error::io(DATA_FILE, e))?;

    let mut splits = create(dir, SPLITS_FILE)?;
    write_split_tags(&corpus.splits, &mut splits)?;
    splits.flush().map_err(|e| Error::io(SPLITS_FILE, e))?;

    let mut vocab = create(dir, VOCAB_FILE)?;
    corpus.vocab.write(&mut vocab)?;
    vocab.flush().map_err(|e| Error::io(VOCAB_FILE, e))?;

    let mut stats = create(dir, STATS_FILE)?;
    writeln!(stats, "{}", stats_line(corpus)).map_err(|e| Error::io(STATS_FILE, e))?;
    stats.flush().map_err(|e| Error::io(STATS_FILE, e))
}

fn open(dir: &Path, name: &str) -> Result<(BufReader<File>, String)> {
    let path = dir.join(name);
    let shown = path.display().to_string();
    let file = File::open(&path).map_err(|e| Error::io(format!("opening {shown}"), e))?;
    Ok((BufReader::new(file), shown))
}

/// Reads a prepared directory. The corpus is named after the directory.
pub fn load_prepared(dir: &Path) -> Result<LabeledCorpus> {
    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_owned());
    let (data, data_src) = open(dir, DATA_FILE)?;
    let raw = parse_tsv(data, &data_src)?;
    let (tags, tags_src) = open(dir, SPLITS_FILE)?;
    let splits = read_split_tags(tags, &tags_src)?;
    let (vocab, _) = open(dir, VOCAB_FILE)?;
    let vocab = Vocabulary::read(vocab)?;
    if splits.len() != raw.len() {
        return Err(Error::Config(format!(
            "{}: {} split tags for {} examples",
            dir.display(),
            splits.len(),
            raw.len()
        )));
    }
    LabeledCorpus::with_vocab(name, vocab, &raw, splits)
}
