//! Rank-r orthogonal projector `P = Q (QᴴQ)⁻¹ Qᴴ` and Born-rule measurement.
//!
//! `P` is never formed on the hot path. Projecting `v` solves the r×r
//! Gram system `(QᴴQ) c = Qᴴv` and returns `Q c`; the Born probability of a
//! unit state is `Re(aᴴ c)` with `a = Qᴴv`.

use rand_distr::{Distribution, Normal};

use crate::clinalg::{Complex, ComplexMatrix, ComplexVector, HermitianCholesky};
use crate::error::{Error, Result};
use crate::rng;

use super::compose::SentenceRepresentation;

/// Smallest admissible squared Cholesky pivot of the Gram matrix `QᴴQ`.
pub const MIN_GRAM_PIVOT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RankRProjector {
    q: ComplexMatrix,
}

impl RankRProjector {
    pub fn new(q: ComplexMatrix) -> Result<Self> {
        let (n, r) = (q.rows(), q.cols());
        if r == 0 || r >= n {
            return Err(Error::Config(format!(
                "projector rank must satisfy 1 <= r < n (n={n}, r={r})"
            )));
        }
        Ok(Self { q })
    }

    /// Entries of `Q` drawn like the embedding table, `Normal(0, 1/n)` per part.
    pub fn init(n: usize, r: usize, seed: u64) -> Result<Self> {
        let mut rng = rng::stream(seed, rng::STREAM_HEAD);
        let dist = Normal::new(0.0, (1.0 / n as f64).sqrt()).expect("finite std");
        let data = (0..n * r)
            .map(|_| {
                let re = dist.sample(&mut rng);
                let im = dist.sample(&mut rng);
                Complex::new(re, im)
            })
            .collect();
        Self::new(ComplexMatrix::from_row_major(n, r, data)?)
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn rank(&self) -> usize {
        self.q.cols()
    }

    pub fn factor_matrix(&self) -> &ComplexMatrix {
        &self.q
    }

    pub(crate) fn factor_matrix_mut(&mut self) -> &mut ComplexMatrix {
        &mut self.q
    }

    /// Factor the Gram matrix once for repeated projections.
    pub fn factorize(&self) -> Result<FactoredProjector<'_>> {
        let q = &self.q;
        let r = q.cols();
        let mut gram = ComplexMatrix::zeros(r, r);
        for row in q.as_slice().chunks_exact(r) {
            for j in 0..r {
                let a = row[j].conj();
                for k in j..r {
                    gram[(j, k)] += a * row[k];
                }
            }
        }
        for j in 0..r {
            for k in 0..j {
                gram[(j, k)] = gram[(k, j)].conj();
            }
            gram[(j, j)].im = 0.0;
        }
        let chol = HermitianCholesky::factor(&gram, MIN_GRAM_PIVOT)?;
        Ok(FactoredProjector { q, chol })
    }

    /// Materialized `P`, for inspection and dense checks.
    pub fn dense(&self) -> Result<ComplexMatrix> {
        let f = self.factorize()?;
        let n = self.dim();
        let columns: Vec<ComplexVector> = (0..n)
            .map(|k| f.project(&ComplexVector::basis(n, k)))
            .collect::<Result<_>>()?;
        ComplexMatrix::from_columns(&columns)
    }
}

#[derive(Debug, Clone)]
pub struct FactoredProjector<'a> {
    q: &'a ComplexMatrix,
    chol: HermitianCholesky,
}

/// Intermediate quantities of one measurement, reused by the backward pass.
#[derive(Debug, Clone)]
pub struct Measurement {
    /// `⟨v|P|v⟩`, unclamped.
    pub probability: f64,
    /// `c = (QᴴQ)⁻¹ Qᴴ v`
    pub coefficients: ComplexVector,
    /// `P v = Q c`
    pub projected: ComplexVector,
}

impl FactoredProjector<'_> {
    pub fn factor_matrix(&self) -> &ComplexMatrix {
        self.q
    }

    pub fn measure(&self, v: &ComplexVector) -> Result<Measurement> {
        let a = self.q.apply_adjoint(v)?;
        let coefficients = self.chol.solve(&a)?;
        let projected = self.q.apply(&coefficients)?;
        let probability = a
            .iter()
            .zip(coefficients.iter())
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex>()
            .re;
        Ok(Measurement {
            probability,
            coefficients,
            projected,
        })
    }

    pub fn project(&self, v: &ComplexVector) -> Result<ComplexVector> {
        Ok(self.measure(v)?.projected)
    }

    /// `Tr(Pρ)`, clamped to `[0, 1]`.
    pub fn born_probability(&self, s: &SentenceRepresentation) -> Result<f64> {
        let p = match s {
            SentenceRepresentation::PureState(v) => self.measure(v)?.probability,
            SentenceRepresentation::Mixture(factors) => {
                let mut p = 0.0;
                for (lambda, t) in factors {
                    p += lambda * self.measure(t.vector())?.probability;
                }
                p
            }
            SentenceRepresentation::RealMean(_) => {
                return Err(Error::Config(
                    "Born measurement needs a complex sentence state".into(),
                ))
            }
        };
        Ok(p.clamp(0.0, 1.0))
    }
}

pub fn project(proj: &RankRProjector, v: &ComplexVector) -> Result<ComplexVector> {
    proj.factorize()?.project(v)
}

pub fn born_probability(proj: &RankRProjector, s: &SentenceRepresentation) -> Result<f64> {
    proj.factorize()?.born_probability(s)
}
