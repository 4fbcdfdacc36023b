//! Linear maps on `M_n` stored as `n² x n²` matrices acting on column-stacked
//! vectorizations.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, ComplexMatrix, C64};
use crate::random::{random_matrix, random_unitary, rng};

#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    n: usize,
    l: ComplexMatrix,
}

impl Superoperator {
    /// Wraps an `n² x n²` matrix `l` so that `apply(X) = unvec(l · vec(X))`.
    pub fn new(n: usize, l: ComplexMatrix) -> Result<Self> {
        if l.rows() != n * n || l.cols() != n * n {
            return Err(Error::Dimension(format!(
                "superoperator on M_{n} needs a {0}x{0} matrix, got {1}x{2}",
                n * n,
                l.rows(),
                l.cols()
            )));
        }
        Ok(Self { n, l })
    }

    /// Infers `n` from an `n² x n²` matrix.
    pub fn from_matrix(l: ComplexMatrix) -> Result<Self> {
        let size = l.require_square("superoperator matrix")?;
        let n = exact_sqrt(size).ok_or_else(|| {
            Error::Dimension(format!("superoperator size {size} is not a perfect square"))
        })?;
        Self::new(n, l)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            l: ComplexMatrix::identity(n * n),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            l: ComplexMatrix::zeros(n * n, n * n),
        }
    }

    /// Builds the matrix of a linear map from its action on matrix units.
    pub fn from_fn(n: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let mut l = ComplexMatrix::zeros(n * n, n * n);
        for j in 0..n {
            for i in 0..n {
                let image = f(&ComplexMatrix::unit(n, i, j));
                l.set_col(i + j * n, &image.vec());
            }
        }
        Self { n, l }
    }

    /// `X ↦ Σ V_j* X V_j`.
    pub fn from_kraus(ops: &[ComplexMatrix]) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::Dimension("empty Kraus set".into()))?;
        let n = first.require_square("Kraus operator")?;
        let mut l = ComplexMatrix::zeros(n * n, n * n);
        for v in ops {
            if v.rows() != n || v.cols() != n {
                return Err(Error::Dimension("Kraus operators differ in size".into()));
            }
            l += &v.transpose().kron(&v.adjoint());
        }
        Ok(Self { n, l })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.l
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.l
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.n || x.cols() != self.n {
            return Err(Error::Dimension(format!(
                "map acts on M_{}, got {}x{}",
                self.n,
                x.rows(),
                x.cols()
            )));
        }
        ComplexMatrix::unvec(&self.l.mul_vec(&x.vec()), self.n, self.n)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "cannot compose maps on M_{} and M_{}",
                self.n, other.n
            )));
        }
        Ok(Self {
            n: self.n,
            l: &self.l * &other.l,
        })
    }

    pub fn power(&self, k: u64) -> Self {
        Self {
            n: self.n,
            l: self.l.pow(k).expect("superoperator matrix is square"),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.l.require_same_shape(&other.l, "superoperator sum")?;
        Ok(Self {
            n: self.n,
            l: &self.l + &other.l,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            l: self.l.scale_real(s),
        }
    }

    /// Spectral norm of the difference of the representing matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        spectral_norm(&(&self.l - &other.l))
    }

    /// `‖φ(I) − I‖` in spectral norm.
    pub fn unital_defect(&self) -> f64 {
        let id = ComplexMatrix::identity(self.n);
        let image = self.apply(&id).expect("identity has the right size");
        spectral_norm(&(&image - &id))
    }

    /// Lower estimate of the induced norm `max{‖φ(X)‖ : ‖X‖ = 1}`.
    ///
    /// Takes the best of `samples` random unit-norm matrices, the identity, and as
    /// many random unitaries. Exact evaluation is not attempted.
    pub fn norm_estimate(&self, samples: usize, seed: u64) -> f64 {
        let mut r = rng(seed);
        let mut best = self.ratio(&ComplexMatrix::identity(self.n));
        for _ in 0..samples {
            let x = random_matrix(&mut r, self.n, self.n);
            best = best.max(self.ratio(&x));
            let u = random_unitary(&mut r, self.n);
            best = best.max(self.ratio(&u));
            if r.random_bool(0.5) {
                best = best.max(self.ratio(&u.hermitian_part()));
            }
        }
        best
    }

    fn ratio(&self, x: &ComplexMatrix) -> f64 {
        let nx = spectral_norm(x);
        if nx == 0.0 {
            return 0.0;
        }
        spectral_norm(&self.apply(x).expect("sample has the right size")) / nx
    }
}

pub(crate) fn exact_sqrt(size: usize) -> Option<usize> {
    let n = (size as f64).sqrt().round() as usize;
    (n * n == size && n > 0).then_some(n)
}

/// `X ↦ V* X V`, represented by `Vᵀ ⊗ V*`.
pub fn conjugation_superop(v: &ComplexMatrix) -> Result<Superoperator> {
    let n = v.require_square("conjugating matrix")?;
    Superoperator::new(n, v.transpose().kron(&v.adjoint()))
}

/// `X ↦ Xᵀ`: positive but not completely positive.
pub fn transpose_map(n: usize) -> Superoperator {
    Superoperator::from_fn(n, |x| x.transpose())
}

/// `X ↦ tr(X)/n · I`, the completely depolarizing map.
pub fn trace_map(n: usize) -> Superoperator {
    let id = ComplexMatrix::identity(n);
    Superoperator::from_fn(n, |x| id.scale(x.trace() / n as f64))
}

/// Compression onto the block-diagonal algebra `M_{k_1} ⊕ ... ⊕ M_{k_m}`.
pub fn block_pinching(sizes: &[usize]) -> Superoperator {
    let n: usize = sizes.iter().sum();
    let mut owner = Vec::with_capacity(n);
    for (b, &k) in sizes.iter().enumerate() {
        owner.extend(std::iter::repeat_n(b, k));
    }
    Superoperator::from_fn(n, |x| {
        ComplexMatrix::from_fn(n, n, |i, j| {
            if owner[i] == owner[j] {
                x[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    })
}

/// Compression onto the diagonal.
pub fn diagonal_pinching(n: usize) -> Superoperator {
    block_pinching(&vec![1; n])
}
