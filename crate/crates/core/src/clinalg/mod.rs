//! Dense complex linear algebra for word states and sentence operators.
//!
//! The inner product is conjugate-linear in its first argument, matching
//! bra-ket notation: `inner(u, v) = Σ conj(u_k) v_k`.

mod cholesky;
mod eigen;

pub use cholesky::HermitianCholesky;
pub use eigen::hermitian_eigenvalues;

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);

/// Default floor below which a vector is treated as having no direction.
pub const NORMALIZE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex>) -> Self {
        Self { entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![ZERO; n],
        }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    /// Standard basis vector `e_k` of length `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[k] = ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.entries
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex] {
        &mut self.entries
    }

    pub fn into_vec(self) -> Vec<Complex> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex> {
        self.entries.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.entries.iter().map(|z| z * s).collect())
    }

    pub fn scale_complex(&self, s: Complex) -> Self {
        Self::new(self.entries.iter().map(|z| z * s).collect())
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: Complex, other: &ComplexVector) -> Result<()> {
        check_len(self.len(), other.len())?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &ComplexVector) -> Result<ComplexVector> {
        check_len(self.len(), other.len())?;
        Ok(Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex;
    fn index(&self, k: usize) -> &Complex {
        &self.entries[k]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, k: usize) -> &mut Complex {
        &mut self.entries[k]
    }
}

impl From<Vec<Complex>> for ComplexVector {
    fn from(entries: Vec<Complex>) -> Self {
        Self::new(entries)
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, ComplexVector::len);
        let mut m = Self::zeros(rows, cols);
        for (k, c) in columns.iter().enumerate() {
            check_len(rows, c.len())?;
            for j in 0..rows {
                m[(j, k)] = c[j];
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex] {
        &mut self.data
    }

    pub fn column(&self, k: usize) -> ComplexVector {
        ComplexVector::new((0..self.rows).map(|j| self[(j, k)]).collect())
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for j in 0..self.rows {
            for k in 0..self.cols {
                out[(k, j)] = self[(j, k)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_len(self.cols, other.rows)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `M v`
    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_len(self.cols, v.len())?;
        Ok(ComplexVector::new(
            self.data
                .chunks_exact(self.cols)
                .map(|row| row.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    /// `Mᴴ v`
    pub fn apply_adjoint(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_len(self.rows, v.len())?;
        let mut out = vec![ZERO; self.cols];
        for (row, vj) in self.data.chunks_exact(self.cols).zip(v.iter()) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * vj;
            }
        }
        Ok(ComplexVector::new(out))
    }

    pub fn add_scaled(&mut self, alpha: Complex, other: &ComplexMatrix) -> Result<()> {
        check_len(self.rows, other.rows)?;
        check_len(self.cols, other.cols)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖M − Mᴴ‖_max`; panics are avoided by returning infinity for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut dev = 0.0f64;
        for j in 0..self.rows {
            for k in j..self.cols {
                dev = dev.max((self[(j, k)] - self[(k, j)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;
    fn index(&self, (j, k): (usize, usize)) -> &Complex {
        &self.data[j * self.cols + k]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (j, k): (usize, usize)) -> &mut Complex {
        &mut self.data[j * self.cols + k]
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}

/// Hermitian inner product `⟨u|v⟩`.
pub fn inner(u: &ComplexVector, v: &ComplexVector) -> Result<Complex> {
    check_len(u.len(), v.len())?;
    Ok(inner_slices(u.as_slice(), v.as_slice()))
}

#[inline]
pub(crate) fn inner_slices(u: &[Complex], v: &[Complex]) -> Complex {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `|u⟩⟨v|`, i.e. `M[j][k] = u_j conj(v_k)`.
pub fn outer(u: &ComplexVector, v: &ComplexVector) -> Result<ComplexMatrix> {
    check_len(u.len(), v.len())?;
    let n = u.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            m[(j, k)] = u[j] * v[k].conj();
        }
    }
    Ok(m)
}

pub fn l2_normalize(u: &ComplexVector, eps: f64) -> Result<ComplexVector> {
    let norm = u.norm();
    if !(norm >= eps) {
        return Err(Error::DegenerateVector { norm, eps });
    }
    Ok(u.scale(1.0 / norm))
}

pub fn trace(m: &ComplexMatrix) -> Result<Complex> {
    check_len(m.rows(), m.cols())?;
    Ok((0..m.rows()).map(|k| m[(k, k)]).sum())
}
