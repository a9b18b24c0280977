use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::clinalg::{l2_normalize, Complex, ComplexVector, NORMALIZE_EPS};
use crate::error::{Error, Result};
use crate::rng;

/// A unit-norm complex word state.
#[derive(Debug, Clone, PartialEq)]
pub struct WordState(ComplexVector);

impl WordState {
    /// Wraps `v`, normalizing it.
    pub fn from_vector(v: &ComplexVector) -> Result<Self> {
        l2_normalize(v, NORMALIZE_EPS).map(Self)
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Per-basis amplitudes `|z_k|`.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.norm()).collect()
    }

    /// Per-basis phases `arg(z_k)` in `(-π, π]`.
    pub fn phases(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.arg()).collect()
    }
}

/// Raw, unnormalized complex embedding rows; normalization happens on lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEmbeddingTable {
    vocab_size: usize,
    n: usize,
    data: Vec<Complex>,
}

fn init_distribution(n: usize) -> Normal<f64> {
    Normal::new(0.0, (1.0 / n as f64).sqrt()).expect("finite std")
}

/// Entries have real and imaginary parts drawn i.i.d. from `Normal(0, 1/n)`.
pub fn init_table(vocab_size: usize, n: usize, seed: u64) -> ComplexEmbeddingTable {
    let mut rng = rng::stream(seed, rng::STREAM_TABLE);
    let dist = init_distribution(n);
    let data = (0..vocab_size * n)
        .map(|_| {
            let re = dist.sample(&mut rng);
            let im = dist.sample(&mut rng);
            Complex::new(re, im)
        })
        .collect();
    ComplexEmbeddingTable {
        vocab_size,
        n,
        data,
    }
}

impl ComplexEmbeddingTable {
    pub fn from_raw(vocab_size: usize, n: usize, data: Vec<Complex>) -> Result<Self> {
        if data.len() != vocab_size * n {
            return Err(Error::Dimension {
                expected: vocab_size * n,
                got: data.len(),
            });
        }
        Ok(Self {
            vocab_size,
            n,
            data,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn raw_row(&self, id: usize) -> Result<&[Complex]> {
        if id >= self.vocab_size {
            return Err(Error::TokenOutOfRange {
                id,
                size: self.vocab_size,
            });
        }
        Ok(&self.data[id * self.n..(id + 1) * self.n])
    }

    pub fn raw_row_mut(&mut self, id: usize) -> &mut [Complex] {
        &mut self.data[id * self.n..(id + 1) * self.n]
    }

    pub fn row_norm(&self, id: usize) -> f64 {
        self.data[id * self.n..(id + 1) * self.n]
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn lookup(&self, id: usize) -> Result<WordState> {
        let row = ComplexVector::new(self.raw_row(id)?.to_vec());
        let norm = row.norm();
        if !(norm >= NORMALIZE_EPS) {
            return Err(Error::DegenerateRow { token: id, norm });
        }
        Ok(WordState(row.scale(1.0 / norm)))
    }

    /// Redraw one row from the initialization distribution.
    pub fn reinit_row<R: Rng>(&mut self, id: usize, rng: &mut R) {
        let dist = init_distribution(self.n);
        for z in self.raw_row_mut(id) {
            let re = dist.sample(rng);
            let im = dist.sample(rng);
            *z = Complex::new(re, im);
        }
    }

    pub(crate) fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex] {
        &mut self.data
    }
}

pub fn lookup(table: &ComplexEmbeddingTable, token_id: usize) -> Result<WordState> {
    table.lookup(token_id)
}

/// Real-valued rows for the baseline model.
#[derive(Debug, Clone, PartialEq)]
pub struct RealEmbeddingTable {
    vocab_size: usize,
    n: usize,
    data: Vec<f64>,
}

impl RealEmbeddingTable {
    pub fn init(vocab_size: usize, n: usize, seed: u64) -> Self {
        let mut rng = rng::stream(seed, rng::STREAM_TABLE);
        let dist = init_distribution(n);
        let data = (0..vocab_size * n).map(|_| dist.sample(&mut rng)).collect();
        Self {
            vocab_size,
            n,
            data,
        }
    }

    pub fn from_raw(vocab_size: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != vocab_size * n {
            return Err(Error::Dimension {
                expected: vocab_size * n,
                got: data.len(),
            });
        }
        Ok(Self {
            vocab_size,
            n,
            data,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, id: usize) -> Result<&[f64]> {
        if id >= self.vocab_size {
            return Err(Error::TokenOutOfRange {
                id,
                size: self.vocab_size,
            });
        }
        Ok(&self.data[id * self.n..(id + 1) * self.n])
    }

    pub(crate) fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}
