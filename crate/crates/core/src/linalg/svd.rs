//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations, and
//! the rank-revealing helpers built on it: nullspaces, range bases, pseudo-inverses.
//!
//! Working on the columns of `M` directly keeps small singular values accurate to
//! roughly `ε‖M‖`; going through the Gram matrix would square the relative error and
//! make a `1e-9` rank cut meaningless.

use crate::linalg::matrix::{ComplexMatrix, C64, ZERO};

/// Relative rank cut used when callers have no better information.
pub const RANK_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 80;

/// `M = U diag(σ) V*` with σ sorted descending.
///
/// `u` has one column per column of `M`; columns belonging to zero singular values
/// are left as zero vectors.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Cut below which singular values count as zero: `tol σ_max`, or absolute `tol`
    /// for the zero matrix.
    pub fn cut(&self, tol: f64) -> f64 {
        let s = self.sigma_max();
        if s > 0.0 {
            tol * s
        } else {
            tol
        }
    }

    pub fn rank(&self, tol: f64) -> usize {
        let cut = self.cut(tol);
        self.singular_values.iter().filter(|&&s| s > cut).count()
    }

    /// Right singular vectors for singular values at or below the cut.
    pub fn null_vectors(&self, tol: f64) -> Vec<Vec<C64>> {
        let r = self.rank(tol);
        (r..self.v.cols()).map(|j| self.v.col(j)).collect()
    }

    /// Left singular vectors for singular values above the cut.
    pub fn range_vectors(&self, tol: f64) -> Vec<Vec<C64>> {
        let r = self.rank(tol);
        (0..r).map(|j| self.u.col(j)).collect()
    }
}

pub fn svd(m: &ComplexMatrix) -> Svd {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<C64>> = (0..cols).map(|j| m.col(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..cols)
        .map(|j| {
            let mut e = vec![ZERO; cols];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();

    // Columns this small are numerically zero; rotating them only amplifies noise.
    let floor = (1e-18 * m.frobenius_norm()).powi(2);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if alpha <= floor
                    || beta <= floor
                    || g == 0.0
                    || g <= f64::EPSILON * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Rotate (a_p, e^{-iφ} a_q) by the real Jacobi angle.
                rotate_pair(&mut a, p, q, c, s, phase.conj());
                rotate_pair(&mut v, p, q, c, s, phase.conj());
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<(f64, usize)> = a
        .iter()
        .enumerate()
        .map(|(j, col)| (col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), j))
        .collect();
    sigma.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    let mut u = ComplexMatrix::zeros(rows, cols);
    let mut vm = ComplexMatrix::zeros(cols, cols);
    for (k, &(s, j)) in sigma.iter().enumerate() {
        if s > 0.0 {
            let col: Vec<C64> = a[j].iter().map(|z| z / s).collect();
            u.set_col(k, &col);
        }
        vm.set_col(k, &v[j]);
    }
    Svd {
        singular_values: sigma.into_iter().map(|(s, _)| s).collect(),
        u,
        v: vm,
    }
}

/// Right-multiplies columns `p, q` by the unitary `[[c, s], [-s e^{-iφ}, c e^{-iφ}]]`.
fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, phase_conj: C64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let yq = *y * phase_conj;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

/// Orthonormal basis (as column vectors) of the numerical nullspace of `m`.
///
/// Singular values at or below `tol σ_max(m)` count as zero; for the zero matrix the
/// cut is the absolute `tol`.
pub fn nullspace(m: &ComplexMatrix, tol: f64) -> Vec<ComplexMatrix> {
    svd(m)
        .null_vectors(tol)
        .into_iter()
        .map(|v| ComplexMatrix::column(&v))
        .collect()
}

/// Numerical rank with relative cut `tol`.
pub fn rank(m: &ComplexMatrix, tol: f64) -> usize {
    svd(m).rank(tol)
}

/// Moore-Penrose pseudo-inverse with relative cut `tol`.
pub fn pinv(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    // Run Jacobi on whichever orientation has fewer columns.
    if m.rows() < m.cols() {
        return pinv(&m.adjoint(), tol).adjoint();
    }
    let d = svd(m);
    let r = d.rank(tol);
    let mut out = ComplexMatrix::zeros(m.cols(), m.rows());
    for k in 0..r {
        let s = d.singular_values[k];
        for i in 0..m.cols() {
            let vi = d.v[(i, k)] / s;
            for j in 0..m.rows() {
                out[(i, j)] += vi * d.u[(j, k)].conj();
            }
        }
    }
    out
}

/// Smallest singular value of a square matrix.
pub fn sigma_min(m: &ComplexMatrix) -> f64 {
    svd(m).singular_values.last().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig::spectral_norm;
    use crate::random::{random_matrix, rng};

    #[test]
    fn nullspace_of_zero_is_everything() {
        assert_eq!(nullspace(&ComplexMatrix::zeros(2, 2), RANK_TOL).len(), 2);
    }

    #[test]
    fn nullspace_of_identity_is_empty() {
        assert!(nullspace(&ComplexMatrix::identity(3), RANK_TOL).is_empty());
    }

    #[test]
    fn nullspace_of_rank_one_projector() {
        let s = 0.5f64.sqrt();
        let v = ComplexMatrix::column(&[C64::new(s, 0.0), C64::new(0.0, s)]);
        let p = &v * &v.adjoint();
        let ns = nullspace(&p, RANK_TOL);
        assert_eq!(ns.len(), 1);
        assert!(v.inner(&ns[0]).norm() < 1e-14);
        assert!((ns[0].frobenius_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstructs_random_matrices() {
        let mut r = rng(3);
        for &(rows, cols) in &[(4, 4), (6, 3), (3, 6), (1, 5), (9, 9)] {
            let m = random_matrix(&mut r, rows, cols);
            let d = svd(&m);
            let sig: Vec<C64> = d
                .singular_values
                .iter()
                .map(|&s| C64::new(s, 0.0))
                .collect();
            let rebuilt = &(&d.u * &ComplexMatrix::diag(&sig)) * &d.v.adjoint();
            assert!(rebuilt.frobenius_distance(&m) < 1e-12, "{rows}x{cols}");
            let vv = &d.v.adjoint() * &d.v;
            let dv = vv.frobenius_distance(&ComplexMatrix::identity(cols));
            assert!(dv < 1e-12, "{rows}x{cols}: {dv}");
            assert!((d.sigma_max() - spectral_norm(&m)).abs() < 1e-12);
        }
    }

    #[test]
    fn nullspace_vectors_orthonormal_and_annihilated() {
        let mut r = rng(8);
        let a = random_matrix(&mut r, 5, 3);
        let b = random_matrix(&mut r, 3, 7);
        let m = &a * &b; // rank 3, 7 columns
        let ns = nullspace(&m, RANK_TOL);
        assert_eq!(ns.len(), 4);
        for (i, x) in ns.iter().enumerate() {
            assert!((&m * x).frobenius_norm() < 1e-12);
            for (j, y) in ns.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((x.inner(y) - C64::new(want, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn pinv_satisfies_penrose_identities() {
        let mut r = rng(21);
        let a = random_matrix(&mut r, 4, 2);
        let b = random_matrix(&mut r, 2, 6);
        let m = &a * &b;
        for x in [m.clone(), m.adjoint()] {
            let p = pinv(&x, RANK_TOL);
            assert!((&(&x * &p) * &x).frobenius_distance(&x) < 1e-10);
            assert!((&(&p * &x) * &p).frobenius_distance(&p) < 1e-10);
            let xp = &x * &p;
            assert!(xp.hermitian_defect() < 1e-10);
        }
    }
}
