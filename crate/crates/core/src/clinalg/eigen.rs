use super::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// `M = A + iB` is embedded as the real symmetric matrix `[[A, -B], [B, A]]`,
/// whose spectrum is that of `M` with every eigenvalue doubled. The embedding
/// is diagonalized with cyclic Jacobi rotations. Meant for small test sizes.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    if m.rows() != m.cols() {
        return Err(Error::Dimension {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }

    let n = m.rows();
    let dim = 2 * n;
    let mut a = vec![0.0f64; dim * dim];
    for j in 0..n {
        for k in 0..n {
            // symmetrize so tiny Hermitian defects don't leak into the rotations
            let z = (m[(j, k)] + m[(k, j)].conj()) * 0.5;
            a[j * dim + k] = z.re;
            a[(j + n) * dim + (k + n)] = z.re;
            a[j * dim + (k + n)] = -z.im;
            a[(j + n) * dim + k] = z.im;
        }
    }

    jacobi_symmetric(&mut a, dim);

    let mut diag: Vec<f64> = (0..dim).map(|k| a[k * dim + k]).collect();
    diag.sort_by(f64::total_cmp);
    Ok(diag.into_iter().step_by(2).collect())
}

/// In-place cyclic Jacobi; on return the diagonal of `a` holds the eigenvalues.
fn jacobi_symmetric(a: &mut [f64], dim: usize) {
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..dim)
            .flat_map(|p| (0..dim).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p * dim + q] * a[p * dim + q])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            return;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
            }
        }
    }
    log::warn!("Jacobi eigenvalue iteration hit the sweep limit ({MAX_SWEEPS})");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clinalg::{outer, Complex, ComplexVector};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn diagonal() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = c(0.8, 0.);
        m[(1, 1)] = c(0.2, 0.);
        let ev = hermitian_eigenvalues(&m, 1e-12).unwrap();
        assert!((ev[0] - 0.2).abs() < 1e-14 && (ev[1] - 0.8).abs() < 1e-14);
    }

    #[test]
    fn rank_one_projector() {
        // (1/2)[[1,-i],[i,1]]: char. poly λ² − λ = 0
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(0.5, 0.), c(0., -0.5), c(0., 0.5), c(0.5, 0.)],
        )
        .unwrap();
        let ev = hermitian_eigenvalues(&m, 1e-12).unwrap();
        assert!(ev[0].abs() < 1e-12, "{ev:?}");
        assert!((ev[1] - 1.0).abs() < 1e-12, "{ev:?}");
    }

    #[test]
    fn identity() {
        let ev = hermitian_eigenvalues(&ComplexMatrix::identity(5), 1e-12).unwrap();
        assert_eq!(ev.len(), 5);
        assert!(ev.iter().all(|x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)])
            .unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&m, 1e-9),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn known_spectrum_3x3() {
        // [[2, i, 0], [-i, 2, 0], [0, 0, 5]] has eigenvalues 1, 3, 5
        let m = ComplexMatrix::from_row_major(
            3,
            3,
            vec![
                c(2., 0.), c(0., 1.), c(0., 0.),
                c(0., -1.), c(2., 0.), c(0., 0.),
                c(0., 0.), c(0., 0.), c(5., 0.),
            ],
        )
        .unwrap();
        let ev = hermitian_eigenvalues(&m, 1e-12).unwrap();
        for (a, b) in ev.iter().zip([1.0, 3.0, 5.0]) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn normalized_outer_product_is_rank_one() {
        let u = ComplexVector::new(vec![c(0.3, -1.2), c(0.7, 0.1), c(-0.4, 0.9), c(0.0, 0.5)]);
        let rho = outer(&u, &u).unwrap();
        let mut rho_n = ComplexMatrix::zeros(4, 4);
        rho_n.add_scaled(c(1.0 / u.norm_sqr(), 0.), &rho).unwrap();
        let ev = hermitian_eigenvalues(&rho_n, 1e-12).unwrap();
        assert!(ev[..3].iter().all(|x| x.abs() < 1e-9), "{ev:?}");
        assert!((ev[3] - 1.0).abs() < 1e-9);
    }
}
