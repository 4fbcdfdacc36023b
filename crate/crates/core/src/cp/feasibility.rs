//! Search for a unital completely positive map with prescribed values, by alternating
//! projections between the PSD cone and an affine set of Choi matrices.
//!
//! Two schemes are available. [`FeasibilityMethod::Dykstra`] converges to the projection
//! of the start onto the intersection, but its rate collapses when the intersection
//! touches the cone boundary, which is always the case here (feasible Choi matrices of
//! maps fixing an irreducible matrix have rank one). [`FeasibilityMethod::Accelerated`]
//! runs the same pair of projections with Nesterov momentum and gradient-based restart.

use crate::cp::choi::ChoiMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, pinv, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityMethod {
    Dykstra,
    Accelerated,
}

#[derive(Debug, Clone, Copy)]
pub struct FeasibilityOptions {
    pub method: FeasibilityMethod,
    pub max_iter: usize,
    /// Target Frobenius residual of the constraints at a PSD iterate.
    pub tol: f64,
    /// Iterations between stall checks.
    pub stall_window: usize,
    /// Minimum relative residual decrease per window before declaring a stall.
    pub stall_improvement: f64,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        Self {
            method: FeasibilityMethod::Accelerated,
            max_iter: 100_000,
            tol: 1e-7,
            stall_window: 500,
            stall_improvement: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Feasible {
    pub choi: ChoiMatrix,
    pub iterations: usize,
    pub residual: f64,
}

/// Affine constraints `φ(A_i) = B_i` written as `G · vec_rows(C) = b`, where
/// `vec_rows(C)` is the row-major flattening of the Choi matrix.
struct AffineSet {
    g: ComplexMatrix,
    g_pinv: ComplexMatrix,
    b: Vec<C64>,
}

impl AffineSet {
    fn new(n: usize, pairs: &[(ComplexMatrix, ComplexMatrix)]) -> Self {
        let size = n * n;
        let rows = pairs.len() * size;
        let mut g = ComplexMatrix::zeros(rows, size * size);
        let mut b = Vec::with_capacity(rows);
        for (p, (a_in, b_out)) in pairs.iter().enumerate() {
            for a in 0..n {
                for bb in 0..n {
                    let row = p * size + a * n + bb;
                    // φ(A)[a, b] = Σ_ij A[i, j] C[i·n + a, j·n + b]
                    for i in 0..n {
                        for j in 0..n {
                            g[(row, (i * n + a) * size + j * n + bb)] = a_in[(i, j)];
                        }
                    }
                    b.push(b_out[(a, bb)]);
                }
            }
        }
        let g_pinv = pinv(&g, 1e-10);
        Self { g, g_pinv, b }
    }

    fn violation(&self, x: &[C64]) -> Vec<C64> {
        let gx = self.g.mul_vec(x);
        gx.iter().zip(&self.b).map(|(u, v)| u - v).collect()
    }

    fn residual(&self, x: &[C64]) -> f64 {
        norm(&self.violation(x))
    }

    fn project(&self, x: &[C64]) -> Vec<C64> {
        let corr = self.g_pinv.mul_vec(&self.violation(x));
        x.iter().zip(&corr).map(|(u, v)| u - v).collect()
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn project_psd(x: &[C64], size: usize) -> Vec<C64> {
    let m = ComplexMatrix::from_row_major(size, size, x.to_vec()).expect("iterate is finite");
    let eig = hermitian_eig(&m, f64::INFINITY).expect("iterate is square");
    eig.apply_fn(|l| l.max(0.0)).as_slice().to_vec()
}

/// Adds `(A*, B*)` for every pair whose adjoint is not already present, so that the
/// affine set is closed under `C ↦ C*` and its projection preserves Hermiticity.
fn close_under_adjoint(
    pairs: &[(ComplexMatrix, ComplexMatrix)],
) -> Vec<(ComplexMatrix, ComplexMatrix)> {
    let mut out: Vec<(ComplexMatrix, ComplexMatrix)> = pairs.to_vec();
    for (a, b) in pairs {
        let (aa, ba) = (a.adjoint(), b.adjoint());
        let present = out
            .iter()
            .any(|(x, y)| x.frobenius_distance(&aa) <= 1e-14 && y.frobenius_distance(&ba) <= 1e-14);
        if !present {
            out.push((aa, ba));
        }
    }
    out
}

/// Finds a PSD Choi matrix with `φ(A_i) = B_i` for every pair (include `(I, I)` to
/// ask for unital maps), starting from `start`.
///
/// Returns [`Error::Infeasible`] when the constraints are affinely inconsistent, when the
/// residual fails to improve by `stall_improvement` over `stall_window` iterations, or
/// when `max_iter` is exhausted.
pub fn ucp_feasibility(
    pairs: &[(ComplexMatrix, ComplexMatrix)],
    start: &ChoiMatrix,
    opts: &FeasibilityOptions,
) -> Result<Feasible> {
    let n = start.n();
    for (a, b) in pairs {
        for m in [a, b] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Dimension(format!(
                    "constraint matrices must be {n}x{n}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
    }
    let size = n * n;
    let affine = AffineSet::new(n, &close_under_adjoint(pairs));

    // Affinely inconsistent constraints cannot be met by any map.
    let least_squares = affine.project(&vec![C64::new(0.0, 0.0); size * size]);
    let floor = affine.residual(&least_squares);
    if floor > opts.tol {
        return Err(Error::Infeasible {
            residual: floor,
            iterations: 0,
        });
    }

    let x0 = start.matrix().hermitian_part().as_slice().to_vec();
    let (y, iterations, residual) = match opts.method {
        FeasibilityMethod::Dykstra => dykstra(&affine, x0, size, opts)?,
        FeasibilityMethod::Accelerated => accelerated(&affine, x0, size, opts)?,
    };
    let c = ComplexMatrix::from_row_major(size, size, y)?.hermitian_part();
    Ok(Feasible {
        choi: ChoiMatrix::from_matrix(c)?,
        iterations,
        residual,
    })
}

/// Tracks the best residual per window and flags windows without enough progress.
struct StallMonitor {
    window: usize,
    improvement: f64,
    previous_best: f64,
    current_best: f64,
}

impl StallMonitor {
    fn new(opts: &FeasibilityOptions) -> Self {
        Self {
            window: opts.stall_window.max(1),
            improvement: opts.stall_improvement,
            previous_best: f64::INFINITY,
            current_best: f64::INFINITY,
        }
    }

    fn stalled(&mut self, iter: usize, residual: f64) -> bool {
        self.current_best = self.current_best.min(residual);
        if !iter.is_multiple_of(self.window) {
            return false;
        }
        let stalled = self.current_best > (1.0 - self.improvement) * self.previous_best;
        self.previous_best = self.previous_best.min(self.current_best);
        self.current_best = f64::INFINITY;
        stalled
    }
}

type Outcome = Result<(Vec<C64>, usize, f64)>;

fn dykstra(affine: &AffineSet, mut x: Vec<C64>, size: usize, opts: &FeasibilityOptions) -> Outcome {
    let mut increment = vec![C64::new(0.0, 0.0); size * size];
    let mut monitor = StallMonitor::new(opts);
    let mut residual = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let shifted: Vec<C64> = x.iter().zip(&increment).map(|(a, b)| a + b).collect();
        let y = project_psd(&shifted, size);
        for ((inc, s), yv) in increment.iter_mut().zip(&shifted).zip(&y) {
            *inc = s - yv;
        }
        residual = affine.residual(&y);
        if residual <= opts.tol {
            return Ok((y, iter, residual));
        }
        // The affine set needs no Dykstra correction: its increments are normal to it.
        x = affine.project(&y);
        if monitor.stalled(iter, residual) {
            return Err(Error::Infeasible {
                residual,
                iterations: iter,
            });
        }
    }
    Err(Error::Infeasible {
        residual,
        iterations: opts.max_iter,
    })
}

/// Projected gradient on `½ dist(C, affine)²` over the PSD cone, with Nesterov
/// momentum restarted whenever the momentum direction opposes the last step.
fn accelerated(
    affine: &AffineSet,
    x0: Vec<C64>,
    size: usize,
    opts: &FeasibilityOptions,
) -> Outcome {
    let mut x = project_psd(&x0, size);
    let mut residual = affine.residual(&x);
    if residual <= opts.tol {
        return Ok((x, 1, residual));
    }
    let mut previous = x.clone();
    let mut t = 1.0f64;
    let mut monitor = StallMonitor::new(opts);
    for iter in 1..=opts.max_iter {
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        let y: Vec<C64> = x
            .iter()
            .zip(&previous)
            .map(|(a, p)| a + (a - p) * beta)
            .collect();
        let next = project_psd(&affine.project(&y), size);
        residual = affine.residual(&next);
        let restart: f64 = y
            .iter()
            .zip(&next)
            .zip(&x)
            .map(|((yv, nv), xv)| ((yv - nv).conj() * (nv - xv)).re)
            .sum();
        previous = std::mem::replace(&mut x, next);
        t = if restart > 0.0 { 1.0 } else { t_next };
        if residual <= opts.tol {
            return Ok((x, iter, residual));
        }
        if monitor.stalled(iter, residual) {
            return Err(Error::Infeasible {
                residual,
                iterations: iter,
            });
        }
    }
    Err(Error::Infeasible {
        residual,
        iterations: opts.max_iter,
    })
}

/// Constraint residual `‖(φ(A_i) − B_i)_i‖_F` of a Choi matrix.
pub fn constraint_residual(choi: &ChoiMatrix, pairs: &[(ComplexMatrix, ComplexMatrix)]) -> f64 {
    let phi = choi.to_superop();
    pairs
        .iter()
        .map(|(a, b)| {
            let img = phi.apply(a).expect("constraint sizes match");
            img.frobenius_distance(b).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::choi::choi;
    use crate::cp::superop::{conjugation_superop, Superoperator};
    use crate::random::{random_psd, random_unitary, rng};

    fn id(n: usize) -> ComplexMatrix {
        ComplexMatrix::identity(n)
    }

    fn dykstra_opts() -> FeasibilityOptions {
        FeasibilityOptions {
            method: FeasibilityMethod::Dykstra,
            ..Default::default()
        }
    }

    #[test]
    fn already_feasible_start_is_returned() {
        let start = choi(&Superoperator::identity(2));
        for opts in [FeasibilityOptions::default(), dykstra_opts()] {
            let out = ucp_feasibility(&[(id(2), id(2))], &start, &opts).unwrap();
            assert_eq!(out.iterations, 1);
            assert!(out.choi.distance(&start) < 1e-12);
        }
    }

    #[test]
    fn dykstra_converges_to_projection_of_start() {
        // Only φ(I) = I: Dykstra returns the nearest feasible Choi matrix, so no known
        // ucp Choi matrix may be closer to the start.
        let mut r = rng(12);
        let start = ChoiMatrix::from_matrix(random_psd(&mut r, 4, 2.0)).unwrap();
        let opts = FeasibilityOptions {
            tol: 1e-10,
            ..dykstra_opts()
        };
        let out = ucp_feasibility(&[(id(2), id(2))], &start, &opts).unwrap();
        let d = out.choi.distance(&start);
        for other in [
            choi(&Superoperator::identity(2)),
            choi(&crate::cp::superop::trace_map(2)),
            choi(&crate::cp::superop::diagonal_pinching(2)),
        ] {
            assert!(d <= other.distance(&start) + 1e-8);
        }
    }

    #[test]
    fn order_bound_violation_is_infeasible() {
        let a = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let b = id(2).scale_real(3.0);
        let start = choi(&Superoperator::identity(2));
        for opts in [FeasibilityOptions::default(), dykstra_opts()] {
            let err = ucp_feasibility(&[(id(2), id(2)), (a.clone(), b.clone())], &start, &opts)
                .unwrap_err();
            assert!(matches!(err, Error::Infeasible { .. }));
        }
    }

    #[test]
    fn inconsistent_affine_constraints_fail_immediately() {
        let start = choi(&Superoperator::identity(2));
        let err = ucp_feasibility(
            &[(id(2), id(2)), (id(2), id(2).scale_real(2.0))],
            &start,
            &FeasibilityOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Infeasible { iterations: 0, .. }));
    }

    #[test]
    fn conjugation_constraints_are_met_from_random_start() {
        let mut r = rng(44);
        let u = random_unitary(&mut r, 2);
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let b = &(&u.adjoint() * &a) * &u;
        let start = ChoiMatrix::from_matrix(random_psd(&mut r, 4, 2.0)).unwrap();
        let pairs = [(id(2), id(2)), (a, b)];
        let want = choi(&conjugation_superop(&u).unwrap());
        for opts in [FeasibilityOptions::default(), dykstra_opts()] {
            let out = ucp_feasibility(&pairs, &start, &opts).unwrap();
            assert!(out.residual <= 1e-7);
            assert!(out.choi.is_psd(1e-12).unwrap());
            assert!(constraint_residual(&out.choi, &pairs) <= 1e-7);
            assert!(out.choi.distance(&want) < 1e-4);
        }
    }
}
