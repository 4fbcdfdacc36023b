//! The decision pipeline.

use std::fmt;

use crate::cp::{choi, trace_map, ucp_feasibility, FeasibilityOptions, Superoperator};
use crate::error::Result;
use crate::linalg::{ComplexMatrix, RANK_TOL};
use crate::similarity::invariant::{invariants_match, SamplePlan, Witness};
use crate::similarity::irreducible::commutant_dimension;
use crate::similarity::recover::recover_unitary;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Similar,
    NotSimilar,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Similar => "similar",
            Verdict::NotSimilar => "not_similar",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct SimilarityReport {
    pub verdict: Verdict,
    /// Present exactly when the verdict is `Similar`.
    pub unitary: Option<ComplexMatrix>,
    /// Present exactly when the verdict is `NotSimilar`.
    pub witness: Option<Witness>,
    pub max_invariant_gap: f64,
    /// Commutant dimensions of `A` and `B`.
    pub commutant_dims: (usize, usize),
    pub plan: SamplePlan,
    /// Why an inconclusive verdict was reached.
    pub diagnostic: Option<String>,
}

/// Compares sampled invariants, then tries to construct the unitary.
///
/// A separating invariant proves `A` and `B` are not unitarily similar. Matching
/// invariants plus an explicit `U` with `U*AU = B` proves they are. Otherwise the
/// answer is inconclusive.
pub fn arveson_check(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    plan: &SamplePlan,
    tol: f64,
) -> Result<SimilarityReport> {
    a.require_square("A")?;
    b.require_same_shape(a, "A and B")?;
    let commutant_dims = (
        commutant_dimension(a, RANK_TOL)?,
        commutant_dimension(b, RANK_TOL)?,
    );
    let cmp = invariants_match(a, b, plan, tol)?;
    let mut report = SimilarityReport {
        verdict: Verdict::Inconclusive,
        unitary: None,
        witness: None,
        max_invariant_gap: cmp.max_gap,
        commutant_dims,
        plan: *plan,
        diagnostic: None,
    };
    if let Some(w) = cmp.witness {
        report.verdict = Verdict::NotSimilar;
        report.witness = Some(w);
        return Ok(report);
    }
    if commutant_dims.0 != 1 {
        report.diagnostic = Some(format!(
            "A is reducible (commutant dimension {}); sampled invariants agree",
            commutant_dims.0
        ));
        return Ok(report);
    }
    match recover_unitary(a, b, tol) {
        Ok(u) => {
            report.verdict = Verdict::Similar;
            report.unitary = Some(u);
        }
        Err(e) => report.diagnostic = Some(format!("sampled invariants agree but {e}")),
    }
    Ok(report)
}

/// A ucp map with `φ(A) = B` (and hence `φ(A*) = B*`), searched from the
/// completely depolarizing map.
pub fn build_ucp_between(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    opts: &FeasibilityOptions,
) -> Result<Superoperator> {
    let n = a.require_square("A")?;
    b.require_same_shape(a, "A and B")?;
    let id = ComplexMatrix::identity(n);
    let pairs = [
        (id.clone(), id),
        (a.clone(), b.clone()),
        (a.adjoint(), b.adjoint()),
    ];
    let found = ucp_feasibility(&pairs, &choi(&trace_map(n)), opts)?;
    Ok(found.choi.to_superop())
}
