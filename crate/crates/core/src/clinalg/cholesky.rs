use super::{Complex, ComplexMatrix, ComplexVector, ZERO};
use crate::error::{Error, Result};

/// `G = L Lᴴ` for a Hermitian positive definite `G`, with `L` lower triangular
/// and a real positive diagonal.
#[derive(Debug, Clone)]
pub struct HermitianCholesky {
    n: usize,
    // row-major lower triangle; upper part is unused
    l: Vec<Complex>,
}

impl HermitianCholesky {
    /// Factor `g`, rejecting it when any squared pivot falls below `min_pivot`.
    pub fn factor(g: &ComplexMatrix, min_pivot: f64) -> Result<Self> {
        let n = g.rows();
        if g.cols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: g.cols(),
            });
        }
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut d = g[(j, j)].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d >= min_pivot) {
                return Err(Error::IllConditionedProjector {
                    column: j,
                    pivot: d,
                });
            }
            let djj = d.sqrt();
            l[j * n + j] = Complex::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = g[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `G x = b`.
    pub fn solve(&self, b: &ComplexVector) -> Result<ComplexVector> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: b.len(),
            });
        }
        let mut y = b.clone().into_vec();
        // L y = b
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i].re;
        }
        // Lᴴ x = y
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i].conj() * y[k];
            }
            y[i] = s / self.l[i * n + i].re;
        }
        Ok(ComplexVector::new(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn solves_hermitian_system() {
        let g = ComplexMatrix::from_row_major(
            3,
            3,
            vec![
                c(4., 0.), c(1., 1.), c(0., -0.5),
                c(1., -1.), c(3., 0.), c(0.2, 0.),
                c(0., 0.5), c(0.2, 0.), c(2., 0.),
            ],
        )
        .unwrap();
        let x = ComplexVector::new(vec![c(1., -2.), c(0.5, 0.25), c(-1., 1.)]);
        let b = g.apply(&x).unwrap();
        let chol = HermitianCholesky::factor(&g, 1e-12).unwrap();
        let solved = chol.solve(&b).unwrap();
        assert!(solved.max_abs_diff(&x) < 1e-13);
    }

    #[test]
    fn rejects_singular() {
        let g = ComplexMatrix::from_row_major(2, 2, vec![c(1., 0.), c(1., 0.), c(1., 0.), c(1., 0.)])
            .unwrap();
        assert!(matches!(
            HermitianCholesky::factor(&g, 1e-8),
            Err(Error::IllConditionedProjector { column: 1, .. })
        ));
    }
}
