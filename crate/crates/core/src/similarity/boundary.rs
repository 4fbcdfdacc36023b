//! Numerical check that the identity is the only ucp map fixing `A`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cp::{choi, ucp_feasibility, ChoiMatrix, FeasibilityOptions, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, RANK_TOL};
use crate::random::random_psd;
use crate::similarity::irreducible::{commutant_dimension, reducing_projection};

#[derive(Debug, Clone)]
pub struct BoundaryReport {
    pub n: usize,
    pub trials: usize,
    /// Frobenius distance of each run's feasible Choi matrix to that of the
    /// identity map; `None` when the run stalled.
    pub distances: Vec<Option<f64>>,
    pub stalled: usize,
    pub max_distance_to_identity: f64,
    /// The feasible Choi matrix farthest from the identity, if that distance
    /// exceeds the tolerance.
    pub counterexample: Option<ChoiMatrix>,
    pub counterexample_distance: Option<f64>,
    pub commutant_dimension: usize,
}

/// Searches for ucp maps `φ` with `φ(A) = A` from `trials` random PSD starts.
///
/// For a reducible `A` the compression onto a reducing projection is also tried, so
/// a counterexample is found even if every random run lands on the identity.
pub fn boundary_verify(
    a: &ComplexMatrix,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<BoundaryReport> {
    let n = a.require_square("A")?;
    let id = ComplexMatrix::identity(n);
    let pairs = vec![(id.clone(), id), (a.clone(), a.clone())];
    let target = choi(&Superoperator::identity(n));
    let opts = FeasibilityOptions {
        tol: (tol * 1e-3).max(1e-12),
        ..FeasibilityOptions::default()
    };

    let runs: Vec<Result<Option<ChoiMatrix>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(t as u64);
            let start = ChoiMatrix::from_matrix(random_psd(&mut r, n * n, n as f64))?;
            match ucp_feasibility(&pairs, &start, &opts) {
                Ok(f) => Ok(Some(f.choi)),
                Err(Error::Infeasible { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut found = Vec::new();
    let mut distances = Vec::with_capacity(trials);
    for run in runs {
        let run = run?;
        distances.push(run.as_ref().map(|c| c.distance(&target)));
        found.extend(run);
    }
    let stalled = distances.iter().filter(|d| d.is_none()).count();

    let commutant = commutant_dimension(a, RANK_TOL)?;
    if commutant > 1 {
        if let Some(p) = reducing_projection(a, RANK_TOL)? {
            let q = &ComplexMatrix::identity(n) - &p;
            let compress = Superoperator::from_fn(n, |x| &(&(&p * x) * &p) + &(&(&q * x) * &q));
            if let Ok(f) = ucp_feasibility(&pairs, &choi(&compress), &opts) {
                found.push(f.choi);
            }
        }
    }

    let mut max_distance = 0.0f64;
    let mut farthest = None;
    for c in found {
        let d = c.distance(&target);
        if d > max_distance || farthest.is_none() {
            max_distance = max_distance.max(d);
            farthest = Some((c, d));
        }
    }
    let (counterexample, counterexample_distance) = match farthest {
        Some((c, d)) if d > tol => (Some(c), Some(d)),
        _ => (None, None),
    };
    Ok(BoundaryReport {
        n,
        trials,
        distances,
        stalled,
        max_distance_to_identity: max_distance,
        counterexample,
        counterexample_distance,
        commutant_dimension: commutant,
    })
}
