//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, C64};

/// Hermitian eigendecomposition `H = V diag(λ) V*` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `eigenvalues`.
    pub vectors: ComplexMatrix,
}

impl EigDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d: Vec<C64> = self.eigenvalues.iter().map(|&x| C64::new(x, 0.0)).collect();
        &(&self.vectors * &ComplexMatrix::diag(&d)) * &self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Rebuilds `V f(Λ) V*`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TARGET: f64 = 1e-13;

/// Default relative tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Full eigendecomposition of a Hermitian matrix.
///
/// `tol` bounds the accepted Hermiticity defect relative to `1 + ‖H‖_F`; the
/// Hermitian part of `h` is what gets diagonalized.
pub fn hermitian_eig(h: &ComplexMatrix, tol: f64) -> Result<EigDecomposition> {
    let n = h.require_square("Hermitian eigenproblem input")?;
    let fro = h.frobenius_norm();
    let defect = h.hermitian_defect();
    if defect > tol * (1.0 + fro) {
        return Err(Error::NotHermitian { defect });
    }
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let target = OFF_DIAGONAL_TARGET * fro;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(EigDecomposition {
        eigenvalues,
        vectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation annihilating `a[p, q]` (and `a[q, p]`).
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that cannot change the diagonal in floating point.
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sp = phase * s;
    let n = a.rows();

    // A <- A J
    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, q)];
        a[(k, p)] = x * c - y * sp.conj();
        a[(k, q)] = x * sp + y * c;
    }
    // A <- J* A
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = x * c - y * sp;
        a[(q, k)] = x * sp.conj() + y * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * c - y * sp.conj();
        v[(k, q)] = x * sp + y * c;
    }
}

/// Largest singular value, `sqrt(spr(X* X))`.
pub fn spectral_norm(x: &ComplexMatrix) -> f64 {
    if x.rows() == 0 || x.cols() == 0 {
        return 0.0;
    }
    let fro = x.frobenius_norm();
    if fro == 0.0 {
        return 0.0;
    }
    // Scaling keeps the Gram matrix away from overflow/underflow.
    let y = x.scale_real(1.0 / fro);
    let gram = if y.rows() >= y.cols() {
        &y.adjoint() * &y
    } else {
        &y * &y.adjoint()
    };
    let eig = hermitian_eig(&gram, f64::INFINITY).expect("Gram matrix is square");
    eig.max().max(0.0).sqrt() * fro
}

/// Positive-semidefiniteness test: minimum eigenvalue at least `-tol (1 + ‖H‖)`.
pub fn psd_check(h: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(psd_margin(h, tol)? >= 0.0)
}

/// Minimum eigenvalue plus the allowance `tol (1 + ‖H‖)`; nonnegative iff PSD.
pub(crate) fn psd_margin(h: &ComplexMatrix, tol: f64) -> Result<f64> {
    let eig = hermitian_eig(h, tol.max(HERMITIAN_TOL))?;
    let norm = eig.min().abs().max(eig.max().abs());
    Ok(eig.min() + tol * (1.0 + norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_matrix, rng};

    #[test]
    fn diagonal_input_sorted() {
        let e = hermitian_eig(&ComplexMatrix::diag_real(&[2.0, 1.0]), HERMITIAN_TOL).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0]);
    }

    #[test]
    fn swap_matrix_eigenvalues() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = hermitian_eig(&x, HERMITIAN_TOL).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut r = rng(11);
        for n in 1..=9 {
            let h = random_hermitian(&mut r, n);
            let e = hermitian_eig(&h, HERMITIAN_TOL).unwrap();
            let resid = e.reconstruct().frobenius_distance(&h);
            assert!(resid <= 1e-10, "n={n} residual {resid}");
            let gram = &e.vectors.adjoint() * &e.vectors;
            assert!(gram.frobenius_distance(&ComplexMatrix::identity(n)) <= 1e-10 * n as f64);
            let d: Vec<C64> = e.eigenvalues.iter().map(|&x| C64::new(x, 0.0)).collect();
            let hv = &h * &e.vectors;
            let vd = &e.vectors * &ComplexMatrix::diag(&d);
            assert!(hv.frobenius_distance(&vd) <= 1e-10 * (1.0 + h.frobenius_norm()));
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            hermitian_eig(&x, HERMITIAN_TOL),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&ComplexMatrix::identity(4)) - 1.0).abs() < 1e-14);
        let d = ComplexMatrix::diag(&[C64::new(3.0, 0.0), C64::new(0.0, -4.0)]);
        assert!((spectral_norm(&d) - 4.0).abs() < 1e-14);
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((spectral_norm(&x) - 2.0).abs() < 1e-14);
        assert_eq!(spectral_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn gram_eigenvalues_nonnegative() {
        let mut r = rng(5);
        for n in 1..=6 {
            let x = random_matrix(&mut r, n, n);
            let e = hermitian_eig(&(&x.adjoint() * &x), HERMITIAN_TOL).unwrap();
            assert!(e.min() >= -1e-12);
        }
    }

    #[test]
    fn psd_examples() {
        assert!(psd_check(&ComplexMatrix::diag_real(&[0.0, 1.0]), 1e-12).unwrap());
        let x = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(!psd_check(&x, 1e-12).unwrap());
        let y = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            psd_check(&y, 1e-12),
            Err(Error::NotHermitian { .. })
        ));
    }
}
