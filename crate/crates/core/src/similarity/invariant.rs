//! The norm invariants `f_(H,K)(A) = ‖A ⊗ H + I ⊗ K‖` and their sampling on a dyadic grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, ComplexMatrix, C64};

pub const DEFAULT_SAMPLES: usize = 64;
pub const DEFAULT_SEED: u64 = 0xA57E_5EED;
pub const DEFAULT_GRID: u32 = 64;

/// Deterministic description of a finite set of `(H, K)` pairs with entries on
/// the grid `{k/d + i m/d : |k|, |m| ≤ d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplePlan {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub grid_denominator: u32,
}

impl SamplePlan {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            count: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            grid_denominator: DEFAULT_GRID,
        }
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_grid(mut self, d: u32) -> Self {
        self.grid_denominator = d;
        self
    }

    /// Pair number `index`; depends only on the seed and the index.
    pub fn pair(&self, index: usize) -> (ComplexMatrix, ComplexMatrix) {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(index as u64);
        let d = i64::from(self.grid_denominator.max(1));
        let scale = 1.0 / d as f64;
        let entry = |r: &mut ChaCha8Rng| {
            let re = r.random_range(-d..=d) as f64 * scale;
            let im = r.random_range(-d..=d) as f64 * scale;
            C64::new(re, im)
        };
        let h = ComplexMatrix::from_fn(self.n, self.n, |_, _| entry(&mut r));
        let k = ComplexMatrix::from_fn(self.n, self.n, |_, _| entry(&mut r));
        (h, k)
    }
}

/// The sampled pairs of a plan, in index order.
pub fn sample_pairs(plan: &SamplePlan) -> Vec<(ComplexMatrix, ComplexMatrix)> {
    (0..plan.count).map(|t| plan.pair(t)).collect()
}

/// `‖A ⊗ H + I ⊗ K‖`.
pub fn arveson_invariant(a: &ComplexMatrix, h: &ComplexMatrix, k: &ComplexMatrix) -> Result<f64> {
    let n = a.require_square("A")?;
    for (m, name) in [(h, "H"), (k, "K")] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::Dimension(format!(
                "{name} must be {n}x{n}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    let id = ComplexMatrix::identity(n);
    Ok(spectral_norm(&(&a.kron(h) + &id.kron(k))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub index: usize,
    pub h: ComplexMatrix,
    pub k: ComplexMatrix,
    pub value_a: f64,
    pub value_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantComparison {
    pub matched: bool,
    /// Largest `|f(A) − f(B)| / (1 + max(f(A), f(B)))` over the plan.
    pub max_gap: f64,
    /// First pair whose gap exceeds the tolerance.
    pub witness: Option<Witness>,
}

pub(crate) fn relative_gap(fa: f64, fb: f64) -> f64 {
    (fa - fb).abs() / (1.0 + fa.max(fb))
}

/// Invariant values `(f(A), f(B))` on every pair of the plan, in index order.
pub fn invariant_values(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    plan: &SamplePlan,
) -> Result<Vec<(f64, f64)>> {
    a.require_same_shape(b, "compared matrices")?;
    (0..plan.count)
        .into_par_iter()
        .map(|t| {
            let (h, k) = plan.pair(t);
            Ok((arveson_invariant(a, &h, &k)?, arveson_invariant(b, &h, &k)?))
        })
        .collect()
}

/// Compares `f_(H,K)(A)` and `f_(H,K)(B)` on every sampled pair.
pub fn invariants_match(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    plan: &SamplePlan,
    tol: f64,
) -> Result<InvariantComparison> {
    let n = a.require_square("A")?;
    if plan.n != n {
        return Err(Error::Dimension(format!(
            "plan is for n = {}, matrices are {n}x{n}",
            plan.n
        )));
    }
    let values = invariant_values(a, b, plan)?;
    let mut max_gap = 0.0f64;
    let mut witness = None;
    for (t, &(fa, fb)) in values.iter().enumerate() {
        let gap = relative_gap(fa, fb);
        max_gap = max_gap.max(gap);
        if witness.is_none() && gap > tol {
            let (h, k) = plan.pair(t);
            witness = Some(Witness {
                index: t,
                h,
                k,
                value_a: fa,
                value_b: fb,
            });
        }
    }
    Ok(InvariantComparison {
        matched: witness.is_none(),
        max_gap,
        witness,
    })
}
