use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

use super::tokenize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawExample {
    pub label: u8,
    pub tokens: Vec<String>,
}

impl RawExample {
    pub fn new(label: u8, text: &str) -> Self {
        Self {
            label,
            tokens: tokenize(text),
        }
    }
}

/// Parses `label<TAB>text` lines. Blank lines are skipped; lines whose text
/// has no tokens are dropped and counted in a log message.
pub fn parse_tsv<R: BufRead>(input: R, source: &str) -> Result<Vec<RawExample>> {
    let mut examples = Vec::new();
    let mut dropped = 0usize;
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(format!("{source}:{line_no}"), e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: source.to_string(),
            line: line_no,
            message,
        };
        let (label, text) = line
            .split_once('\t')
            .ok_or_else(|| parse_err("expected `label<TAB>text`".into()))?;
        let label = match label.trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(parse_err(format!("label must be 0 or 1, got `{other}`"))),
        };
        let example = RawExample::new(label, text);
        if example.tokens.is_empty() {
            dropped += 1;
            continue;
        }
        examples.push(example);
    }
    if dropped > 0 {
        log::info!("{source}: dropped {dropped} line(s) with no tokens");
    }
    Ok(examples)
}

pub fn load_tsv(path: &Path) -> Result<Vec<RawExample>> {
    let file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    parse_tsv(BufReader::new(file), &path.display().to_string())
}
