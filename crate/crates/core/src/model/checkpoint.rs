//! Checkpoint file: `key=value` header lines, one blank line, then the flat
//! parameters as little-endian f64 in layout order (complex entries as
//! interleaved re, im).

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::clinalg::{Complex, ComplexMatrix};
use crate::error::{Error, Result};

use super::{
    ComplexEmbeddingTable, LinearHead, Model, ModelConfig, ModelKind, RankRProjector,
    RealEmbeddingTable,
};

pub const FORMAT_VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(model: &Model, mut out: W) -> Result<()> {
    let c = model.config();
    let header = format!(
        "format_version={FORMAT_VERSION}\nmodel_kind={}\nn={}\nr={}\nvocab_size={}\nseed={}\n\n",
        c.kind.id(),
        c.n,
        c.r,
        c.vocab_size,
        c.seed
    );
    let mut bytes = header.into_bytes();
    bytes.reserve(c.parameter_count() * 8);
    for (_, seg) in model.segments() {
        for x in seg {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
    }
    out.write_all(&bytes)
        .map_err(|e| Error::io("writing checkpoint", e))
}

fn header_value<'a>(fields: &'a [(String, String)], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::Checkpoint(format!("missing header field `{key}`")))
}

fn parse_field<T: std::str::FromStr>(fields: &[(String, String)], key: &str) -> Result<T> {
    let raw = header_value(fields, key)?;
    raw.parse()
        .map_err(|_| Error::Checkpoint(format!("header field `{key}` has invalid value `{raw}`")))
}

pub fn read_checkpoint<R: Read>(input: R) -> Result<Model> {
    let mut reader = BufReader::new(input);
    let mut fields = Vec::new();
    loop {
        let mut line = String::new();
        let read = reader
            .read_line(&mut line)
            .map_err(|e| Error::io("reading checkpoint header", e))?;
        if read == 0 {
            return Err(Error::Checkpoint("header is not terminated by a blank line".into()));
        }
        let line = line.trim_end_matches(['\n', '\r']);
        if line.is_empty() {
            break;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Checkpoint(format!("malformed header line `{line}`")))?;
        fields.push((k.to_string(), v.to_string()));
    }

    let version: u32 = parse_field(&fields, "format_version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported format_version {version} (expected {FORMAT_VERSION})"
        )));
    }
    let kind: ModelKind = header_value(&fields, "model_kind")?
        .parse()
        .map_err(|e: Error| Error::Checkpoint(e.to_string()))?;
    let config = ModelConfig {
        kind,
        n: parse_field(&fields, "n")?,
        r: parse_field(&fields, "r")?,
        vocab_size: parse_field(&fields, "vocab_size")?,
        seed: parse_field(&fields, "seed")?,
    };
    config
        .validate()
        .map_err(|e| Error::Checkpoint(e.to_string()))?;

    let mut payload = Vec::new();
    reader
        .read_to_end(&mut payload)
        .map_err(|e| Error::io("reading checkpoint payload", e))?;
    let expected = config.parameter_count() * 8;
    if payload.len() != expected {
        return Err(Error::Checkpoint(format!(
            "payload has {} bytes, header implies {expected}",
            payload.len()
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
        .collect();

    let (n, r, v) = (config.n, config.r, config.vocab_size);
    match kind {
        ModelKind::RealEmbed => {
            let table = RealEmbeddingTable::from_raw(v, n, values[..v * n].to_vec())?;
            let head = LinearHead {
                weights: values[v * n..v * n + n].to_vec(),
                bias: values[v * n + n],
            };
            Model::from_real(table, head, r, config.seed)
        }
        _ => {
            let complex: Vec<Complex> = values
                .chunks_exact(2)
                .map(|p| Complex::new(p[0], p[1]))
                .collect();
            let table = ComplexEmbeddingTable::from_raw(v, n, complex[..v * n].to_vec())?;
            let q = ComplexMatrix::from_row_major(n, r, complex[v * n..].to_vec())?;
            Model::from_complex(kind, table, RankRProjector::new(q)?, config.seed)
        }
    }
}

pub fn save_checkpoint(model: &Model, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_checkpoint(model, &mut buf)?;
    fs::write(path, buf).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn load_checkpoint(path: &Path) -> Result<Model> {
    let file = fs::File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    read_checkpoint(file)
}
