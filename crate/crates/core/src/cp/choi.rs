//! Choi matrices and Kraus decompositions.
//!
//! Block `(i, j)` of the Choi matrix is `φ(E_ij)`, i.e. `C[i·n + a, j·n + b] = φ(E_ij)[a, b]`.
//! With column-stacking, a map `X ↦ V* X V` has Choi matrix `vec(V*) vec(V*)*`, so
//! a Choi eigenvector `w` reshapes to `V = unvec(w)*`.

use crate::cp::superop::{exact_sqrt, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::eig::psd_margin;
use crate::linalg::{hermitian_eig, rank, spectral_norm, ComplexMatrix, HERMITIAN_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    n: usize,
    c: ComplexMatrix,
}

impl ChoiMatrix {
    /// Wraps an `n² x n²` block matrix.
    pub fn from_matrix(c: ComplexMatrix) -> Result<Self> {
        let size = c.require_square("Choi matrix")?;
        let n = exact_sqrt(size).ok_or_else(|| {
            Error::Dimension(format!("Choi matrix size {size} is not a perfect square"))
        })?;
        Ok(Self { n, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.c
    }

    /// `φ(E_ij)`.
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        self.c.block(i * self.n, j * self.n, self.n, self.n)
    }

    /// The map encoded by this Choi matrix.
    pub fn to_superop(&self) -> Superoperator {
        let n = self.n;
        let mut l = ComplexMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        l[(a + b * n, i + j * n)] = self.c[(i * n + a, j * n + b)];
                    }
                }
            }
        }
        Superoperator::new(n, l).expect("sizes agree by construction")
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(psd_margin(&self.c, tol)? >= 0.0)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.c.frobenius_distance(&other.c)
    }
}

/// Choi matrix `[φ(E_ij)]` of a map.
pub fn choi(phi: &Superoperator) -> ChoiMatrix {
    let n = phi.n();
    let l = phi.matrix();
    let c = ComplexMatrix::from_fn(n * n, n * n, |r, s| {
        let (i, a) = (r / n, r % n);
        let (j, b) = (s / n, s % n);
        l[(a + b * n, i + j * n)]
    });
    ChoiMatrix { n, c }
}

/// Kraus operators in the `X ↦ Σ V_j* X V_j` convention.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub ops: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn rank(&self) -> usize {
        self.ops.len()
    }

    pub fn to_superop(&self, n: usize) -> Superoperator {
        if self.ops.is_empty() {
            Superoperator::zero(n)
        } else {
            Superoperator::from_kraus(&self.ops).expect("Kraus operators share a size")
        }
    }

    /// Whether the operators are linearly independent: the Gram matrix of their
    /// vectorizations has full rank at relative cut `tol`.
    pub fn is_independent(&self, tol: f64) -> bool {
        if self.ops.is_empty() {
            return true;
        }
        let r = self.ops.len();
        let gram = ComplexMatrix::from_fn(r, r, |i, j| self.ops[i].inner(&self.ops[j]));
        rank(&gram, tol) == r
    }
}

/// Kraus decomposition from the eigendecomposition of a PSD Choi matrix.
///
/// Eigenpairs with `λ ≤ tol · λ_max` are dropped.
pub fn kraus_from_choi(c: &ChoiMatrix, tol: f64) -> Result<KrausSet> {
    let margin = psd_margin(&c.c, tol)?;
    let eig = hermitian_eig(&c.c, tol.max(HERMITIAN_TOL))?;
    if margin < 0.0 {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: eig.min(),
        });
    }
    let n = c.n;
    let lmax = eig.max();
    if lmax <= 0.0 {
        return Ok(KrausSet { ops: Vec::new() });
    }
    let ops = (0..n * n)
        .rev()
        .filter(|&k| eig.eigenvalues[k] > tol * lmax)
        .map(|k| {
            let w = eig.vectors.col(k);
            let m = ComplexMatrix::unvec(&w, n, n).expect("eigenvector has n² entries");
            m.adjoint().scale_real(eig.eigenvalues[k].sqrt())
        })
        .collect();
    Ok(KrausSet { ops })
}

/// Unital and completely positive, each within `tol`.
pub fn is_ucp(phi: &Superoperator, tol: f64) -> bool {
    let id = ComplexMatrix::identity(phi.n());
    let unital = match phi.apply(&id) {
        Ok(img) => spectral_norm(&(&img - &id)) <= tol,
        Err(_) => false,
    };
    unital && choi(phi).is_psd(tol).unwrap_or(false)
}
