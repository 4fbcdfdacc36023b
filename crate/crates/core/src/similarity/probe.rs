//! Comparison of `X ⊕ X` with `X ⊕ 0`, two matrices whose invariants can only differ
//! through the norm of `K`.

use crate::error::Result;
use crate::linalg::{spectral_norm, ComplexMatrix, RANK_TOL};
use crate::similarity::invariant::{arveson_invariant, invariant_values, SamplePlan};
use crate::similarity::irreducible::commutant_dimension;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSample {
    pub index: usize,
    pub value_a: f64,
    pub value_b: f64,
    pub norm_k: f64,
    /// `f(B) − f(A)`.
    pub gap: f64,
    /// `max(0, ‖K‖ − f(A))`.
    pub predicted_gap: f64,
}

#[derive(Debug, Clone)]
pub struct RemarkProbe {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub commutant_dims: (usize, usize),
    pub samples: Vec<ProbeSample>,
    pub max_gap: f64,
    /// Samples whose gap exceeds `1e-12 (1 + f(A))`.
    pub nonzero_gaps: usize,
    /// Largest `|gap − predicted_gap|`.
    pub max_prediction_error: f64,
    /// Values at `H = −I`, `K = I`: `(f(A), f(B))`.
    pub opposed_pair: (f64, f64),
}

/// Samples the invariants of `A = X ⊕ X` and `B = X ⊕ 0` on a plan of size `2m`.
pub fn remark_probe(x: &ComplexMatrix, count: usize, seed: u64, grid: u32) -> Result<RemarkProbe> {
    let m = x.require_square("X")?;
    let a = x.direct_sum(x);
    let b = x.direct_sum(&ComplexMatrix::zeros(m, m));
    let plan = SamplePlan::new(2 * m)
        .with_count(count)
        .with_seed(seed)
        .with_grid(grid);
    let values = invariant_values(&a, &b, &plan)?;
    let samples: Vec<ProbeSample> = values
        .iter()
        .enumerate()
        .map(|(t, &(fa, fb))| {
            let (_, k) = plan.pair(t);
            let norm_k = spectral_norm(&k);
            ProbeSample {
                index: t,
                value_a: fa,
                value_b: fb,
                norm_k,
                gap: fb - fa,
                predicted_gap: (norm_k - fa).max(0.0),
            }
        })
        .collect();
    let max_gap = samples.iter().map(|s| s.gap).fold(0.0, f64::max);
    let nonzero_gaps = samples
        .iter()
        .filter(|s| s.gap > 1e-12 * (1.0 + s.value_a))
        .count();
    let max_prediction_error = samples
        .iter()
        .map(|s| (s.gap - s.predicted_gap).abs())
        .fold(0.0, f64::max);
    let id = ComplexMatrix::identity(2 * m);
    let minus = id.scale_real(-1.0);
    let opposed_pair = (
        arveson_invariant(&a, &minus, &id)?,
        arveson_invariant(&b, &minus, &id)?,
    );
    Ok(RemarkProbe {
        commutant_dims: (
            commutant_dimension(&a, RANK_TOL)?,
            commutant_dimension(&b, RANK_TOL)?,
        ),
        a,
        b,
        samples,
        max_gap,
        nonzero_gaps,
        max_prediction_error,
        opposed_pair,
    })
}
