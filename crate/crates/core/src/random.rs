//! Seeded generators for test matrices, unitaries and ucp maps.
//!
//! Everything runs on ChaCha8 so that a seed reproduces the same stream on every
//! platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{hermitian_eig, ComplexMatrix, C64, HERMITIAN_TOL};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(r: &mut R) -> C64 {
    let re: f64 = r.sample(StandardNormal);
    let im: f64 = r.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(r: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(r))
}

pub fn random_hermitian<R: Rng + ?Sized>(r: &mut R, n: usize) -> ComplexMatrix {
    random_matrix(r, n, n).hermitian_part()
}

/// Haar-distributed unitary: Gram-Schmidt on a Gaussian matrix with the
/// diagonal phase of R fixed to be positive.
pub fn random_unitary<R: Rng + ?Sized>(r: &mut R, n: usize) -> ComplexMatrix {
    loop {
        let g = random_matrix(r, n, n);
        if let Some(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

/// Modified Gram-Schmidt; `None` if the columns are numerically dependent.
pub(crate) fn orthonormalize_columns(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let (rows, cols) = (g.rows(), g.cols());
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = g.col(j);
        for _ in 0..2 {
            for prev in &q {
                let dot: C64 = prev.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, p) in v.iter_mut().zip(prev) {
                    *x -= dot * p;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return None;
        }
        for x in &mut v {
            *x /= norm;
        }
        q.push(v);
    }
    Some(ComplexMatrix::from_columns(rows, &q))
}

/// Kraus operators `V_1..V_r` with `Σ V_j* V_j = I`, i.e. a random ucp map in the
/// `X ↦ Σ V_j* X V_j` convention.
pub fn random_ucp_kraus<R: Rng + ?Sized>(r: &mut R, n: usize, rank: usize) -> Vec<ComplexMatrix> {
    let raw: Vec<ComplexMatrix> = (0..rank).map(|_| random_matrix(r, n, n)).collect();
    let mut s = ComplexMatrix::zeros(n, n);
    for v in &raw {
        s += &(&v.adjoint() * v);
    }
    let eig = hermitian_eig(&s, HERMITIAN_TOL).expect("Gram sum is Hermitian");
    let inv_sqrt = eig.apply_fn(|x| 1.0 / x.sqrt());
    raw.iter().map(|v| v * &inv_sqrt).collect()
}

/// Random positive semidefinite `n x n` matrix with Frobenius norm `scale`.
pub fn random_psd<R: Rng + ?Sized>(r: &mut R, n: usize, scale: f64) -> ComplexMatrix {
    let g = random_matrix(r, n, n);
    let p = &g * &g.adjoint();
    let f = p.frobenius_norm();
    p.scale_real(scale / f)
}
