//! Sentence composition: superposition (pure state), mixture, and the real mean.

use crate::clinalg::{outer, Complex, ComplexMatrix, ComplexVector, NORMALIZE_EPS};
use crate::error::{Error, Result};

use super::WordState;

/// Norm floor used by the training graph in place of the hard degeneracy error.
pub const SUPERPOSITION_NORM_FLOOR: f64 = 1e-6;

const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum SentenceRepresentation {
    /// Unit vector `|S⟩`; `ρ = |S⟩⟨S|`.
    PureState(ComplexVector),
    /// Factors `(λ_l, |t_l⟩)`; `ρ = Σ λ_l |t_l⟩⟨t_l|`.
    Mixture(Vec<(f64, WordState)>),
    /// Unnormalized mean of real rows.
    RealMean(Vec<f64>),
}

impl SentenceRepresentation {
    /// Materializes `ρ`. Returns `None` for the real baseline.
    pub fn density_matrix(&self) -> Option<ComplexMatrix> {
        match self {
            SentenceRepresentation::PureState(s) => outer(s, s).ok(),
            SentenceRepresentation::Mixture(factors) => {
                let n = factors.first()?.1.dim();
                let mut rho = ComplexMatrix::zeros(n, n);
                for (lambda, t) in factors {
                    let proj = outer(t.vector(), t.vector()).ok()?;
                    rho.add_scaled(Complex::new(*lambda, 0.0), &proj).ok()?;
                }
                Some(rho)
            }
            SentenceRepresentation::RealMean(_) => None,
        }
    }
}

/// Uniform weights `1/m`.
pub fn uniform_weights(m: usize) -> Vec<f64> {
    vec![1.0 / m as f64; m]
}

fn check_weights(states: &[WordState], weights: &[f64]) -> Result<()> {
    if states.is_empty() {
        return Err(Error::EmptySentence);
    }
    if states.len() != weights.len() {
        return Err(Error::Dimension {
            expected: states.len(),
            got: weights.len(),
        });
    }
    let n = states[0].dim();
    if let Some(bad) = states.iter().find(|s| s.dim() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: bad.dim(),
        });
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::Config("composition weights must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::Config(format!(
            "composition weights sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// `Σ λ_l |t_l⟩` before normalization.
pub(crate) fn weighted_sum(states: &[WordState], weights: &[f64]) -> ComplexVector {
    let mut u = ComplexVector::zeros(states[0].dim());
    for (t, &w) in states.iter().zip(weights) {
        for (acc, z) in u.as_mut_slice().iter_mut().zip(t.vector().iter()) {
            *acc += z * w;
        }
    }
    u
}

/// `|S⟩ = Σ λ_l |t_l⟩ / ‖Σ λ_l |t_l⟩‖`.
pub fn superpose(states: &[WordState], weights: &[f64]) -> Result<SentenceRepresentation> {
    check_weights(states, weights)?;
    let u = weighted_sum(states, weights);
    let norm = u.norm();
    if !(norm >= NORMALIZE_EPS) {
        return Err(Error::DegenerateSuperposition { norm });
    }
    Ok(SentenceRepresentation::PureState(u.scale(1.0 / norm)))
}

/// Superposition with the norm clamped from below at `floor`, so near-total
/// cancellation stays finite. The result is unit norm only when unclamped.
pub(crate) fn superpose_clamped(
    states: &[WordState],
    weights: &[f64],
    floor: f64,
) -> (ComplexVector, f64, bool) {
    let u = weighted_sum(states, weights);
    let norm = u.norm();
    let clamped = !(norm >= floor);
    let denom = if clamped { floor } else { norm };
    (u.scale(1.0 / denom), denom, clamped)
}

pub fn mix(states: &[WordState], weights: &[f64]) -> Result<SentenceRepresentation> {
    check_weights(states, weights)?;
    Ok(SentenceRepresentation::Mixture(
        weights.iter().copied().zip(states.iter().cloned()).collect(),
    ))
}

pub fn real_mean(rows: &[&[f64]]) -> Result<SentenceRepresentation> {
    let first = rows.first().ok_or(Error::EmptySentence)?;
    let n = first.len();
    let mut mean = vec![0.0; n];
    for row in rows {
        if row.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: row.len(),
            });
        }
        for (m, x) in mean.iter_mut().zip(row.iter()) {
            *m += x;
        }
    }
    let m = rows.len() as f64;
    mean.iter_mut().for_each(|x| *x /= m);
    Ok(SentenceRepresentation::RealMean(mean))
}
