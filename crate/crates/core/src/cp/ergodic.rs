//! Fixed-point projections of contractive maps: the ergodic (Cesàro) limit, the
//! peripheral spectral projection, and the Choi-Effros product on their range.

use crate::cp::superop::Superoperator;
use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, inverse, sigma_min, spectral_norm, svd, ComplexMatrix, C64, RANK_TOL,
};

/// Eigenvalues closer than this are treated as one cluster.
const CLUSTER_TOL: f64 = 1e-7;

/// Idempotent map `Ω` onto a fixed-point space, together with an orthonormal
/// (Frobenius) basis of that space.
#[derive(Debug, Clone)]
pub struct ConditionalExpectation {
    pub omega: Superoperator,
    pub fixed_basis: Vec<ComplexMatrix>,
}

impl ConditionalExpectation {
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.omega.apply(x)
    }

    pub fn n(&self) -> usize {
        self.omega.n()
    }

    /// `‖Ω∘Ω − Ω‖` on the representing matrix.
    pub fn idempotence_defect(&self) -> f64 {
        let l = self.omega.matrix();
        spectral_norm(&(&(l * l) - l))
    }

    /// `‖Ω(X) − X‖_F`.
    pub fn range_defect(&self, x: &ComplexMatrix) -> Result<f64> {
        Ok(self.apply(x)?.frobenius_distance(x))
    }
}

/// Idempotent with range `ker(L − I)` and kernel `ran(L − I)`.
///
/// `tol` is the relative rank cut used to split the spectrum of `L − I`.
pub fn ergodic_projection(omega: &Superoperator, tol: f64) -> Result<ConditionalExpectation> {
    let n = omega.n();
    let m = omega.matrix() - &ComplexMatrix::identity(n * n);
    let d = svd(&m);
    let kernel = d.null_vectors(tol);
    if kernel.is_empty() {
        return Err(Error::NoFixedPoint);
    }
    let range = d.range_vectors(tol);
    let proj = oblique_projection(n * n, &kernel, &range, tol)?;
    let fixed_basis = kernel
        .iter()
        .map(|v| ComplexMatrix::unvec(v, n, n).expect("kernel vector has n² entries"))
        .collect();
    let ce = ConditionalExpectation {
        omega: Superoperator::new(n, proj)?,
        fixed_basis,
    };
    let defect = ce.idempotence_defect();
    if defect > 1e-9 * (1.0 + spectral_norm(ce.omega.matrix())) {
        return Err(Error::DecompositionFailure { sigma_min: defect });
    }
    Ok(ce)
}

/// Projection onto `span(keep)` along `span(drop)`, where the two spans together
/// must fill the whole space.
fn oblique_projection(
    dim: usize,
    keep: &[Vec<C64>],
    drop: &[Vec<C64>],
    tol: f64,
) -> Result<ComplexMatrix> {
    if keep.len() + drop.len() != dim {
        return Err(Error::DecompositionFailure { sigma_min: 0.0 });
    }
    let mut cols = keep.to_vec();
    cols.extend_from_slice(drop);
    let t = ComplexMatrix::from_columns(dim, &cols);
    let smin = sigma_min(&t);
    if smin <= tol.sqrt().max(1e-6) {
        return Err(Error::DecompositionFailure { sigma_min: smin });
    }
    let t_inv = inverse(&t).map_err(|_| Error::DecompositionFailure { sigma_min: smin })?;
    let k = keep.len();
    let basis = ComplexMatrix::from_columns(dim, keep);
    Ok(&basis * &t_inv.block(0, 0, k, dim))
}

/// Exact finite average `(1/m) Σ_{k<m} ω^k`; `m = 0` is treated as `1`.
pub fn cesaro_average(omega: &Superoperator, m: usize) -> Superoperator {
    let m = m.max(1);
    let l = omega.matrix();
    let size = l.rows();
    let mut power = ComplexMatrix::identity(size);
    let mut sum = ComplexMatrix::zeros(size, size);
    for k in 0..m {
        sum += &power;
        if k + 1 < m {
            power = &power * l;
        }
    }
    Superoperator::new(omega.n(), sum.scale_real(1.0 / m as f64)).expect("same size as omega")
}

/// A cluster of peripheral eigenvalues with the ranks used to test semisimplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct PeripheralEigenvalue {
    pub value: C64,
    /// Algebraic multiplicity (cluster size from the Schur iteration).
    pub multiplicity: usize,
    pub rank_first: usize,
    pub rank_second: usize,
}

impl PeripheralEigenvalue {
    /// `rank(L − λI) = rank((L − λI)²)` and the eigenspace has full dimension.
    pub fn is_semisimple(&self, size: usize) -> bool {
        self.rank_first == self.rank_second && size - self.rank_first == self.multiplicity
    }
}

/// Eigenvalues with `|λ| ≥ 1 − tol`, clustered, each with its rank test.
pub fn peripheral_spectrum(omega: &Superoperator, tol: f64) -> Result<Vec<PeripheralEigenvalue>> {
    let l = omega.matrix();
    let size = l.rows();
    let ev = eigenvalues(l)?;
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    let mut peripheral: Vec<C64> = ev.into_iter().filter(|z| z.norm() >= 1.0 - tol).collect();
    peripheral.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    for z in peripheral {
        match clusters
            .iter_mut()
            .find(|(c, k)| (*c / *k as f64 - z).norm() <= CLUSTER_TOL)
        {
            Some((sum, k)) => {
                *sum += z;
                *k += 1;
            }
            None => clusters.push((z, 1)),
        }
    }
    Ok(clusters
        .into_iter()
        .map(|(sum, k)| {
            let value = sum / k as f64;
            let shifted = l - &ComplexMatrix::identity(size).scale(value);
            let rank_first = svd(&shifted).rank(RANK_TOL);
            let rank_second = svd(&(&shifted * &shifted)).rank(RANK_TOL);
            PeripheralEigenvalue {
                value,
                multiplicity: k,
                rank_first,
                rank_second,
            }
        })
        .collect())
}

/// Spectral projection onto the span of the eigenspaces of peripheral eigenvalues
/// (`|λ| ≥ 1 − tol`), along the complementary invariant subspace. For a ucp map this
/// is the idempotent limit point of the powers `ω^k`.
pub fn peripheral_expectation(omega: &Superoperator, tol: f64) -> Result<Superoperator> {
    let n = omega.n();
    let size = n * n;
    let l = omega.matrix();
    let spectrum = peripheral_spectrum(omega, tol)?;
    let mut keep = Vec::new();
    let mut annihilator = ComplexMatrix::identity(size);
    for p in &spectrum {
        if !p.is_semisimple(size) {
            return Err(Error::PeripheralDefect {
                re: p.value.re,
                im: p.value.im,
            });
        }
        let shifted = l - &ComplexMatrix::identity(size).scale(p.value);
        keep.extend(svd(&shifted).null_vectors(RANK_TOL));
        annihilator = &annihilator * &shifted;
    }
    if keep.is_empty() {
        return Ok(Superoperator::zero(n));
    }
    let drop = svd(&annihilator).range_vectors(RANK_TOL);
    let proj = oblique_projection(size, &keep, &drop, RANK_TOL)?;
    Superoperator::new(n, proj)
}

/// `X ⊙ Y = Ω(XY)` for `X, Y` in the range of `Ω`.
pub fn choi_effros_product(
    omega: &ConditionalExpectation,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    for m in [x, y] {
        let defect = omega.range_defect(m)?;
        if defect > 1e-8 * (1.0 + m.frobenius_norm()) {
            return Err(Error::NotInRange { defect });
        }
    }
    omega.apply(&(x * y))
}

/// `‖Ω(YZ) − Ω(Y Ω(Z))‖` (spectral norm).
pub fn module_property_check(
    omega: &ConditionalExpectation,
    y: &ComplexMatrix,
    z: &ComplexMatrix,
) -> Result<f64> {
    let lhs = omega.apply(&(y * z))?;
    let rhs = omega.apply(&(y * &omega.apply(z)?))?;
    Ok(spectral_norm(&(&lhs - &rhs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::choi::is_ucp;
    use crate::cp::superop::{block_pinching, conjugation_superop, diagonal_pinching, trace_map};
    use crate::random::{random_matrix, random_ucp_kraus, rng};

    fn phase_diag(n: usize, theta: f64) -> ComplexMatrix {
        let e: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(1.0, theta * k as f64))
            .collect();
        ComplexMatrix::diag(&e)
    }

    /// Cyclic shift composed with diagonal pinching: peripheral spectrum is the
    /// cube roots of unity, and ω³ = pinching.
    fn shifted_pinching() -> Superoperator {
        let p = ComplexMatrix::from_fn(3, 3, |i, j| {
            if j == (i + 1) % 3 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        conjugation_superop(&p)
            .unwrap()
            .compose(&diagonal_pinching(3))
            .unwrap()
    }

    #[test]
    fn identity_projects_to_identity() {
        let ce = ergodic_projection(&Superoperator::identity(3), RANK_TOL).unwrap();
        assert!(ce.omega.distance(&Superoperator::identity(3)) < 1e-14);
        assert_eq!(ce.fixed_basis.len(), 9);
    }

    #[test]
    fn diagonal_phase_conjugation_gives_pinching() {
        let omega = conjugation_superop(&phase_diag(2, 1.0)).unwrap();
        let ce = ergodic_projection(&omega, RANK_TOL).unwrap();
        assert!(ce.omega.distance(&diagonal_pinching(2)) < 1e-12);
        // Cesàro oracle at m = 1e5
        let avg = cesaro_average(&omega, 100_000);
        assert!(avg.distance(&ce.omega) < 1e-4);
    }

    #[test]
    fn depolarizing_fixed_line_gives_trace_map() {
        let omega = trace_map(3)
            .scale(0.5)
            .add(&Superoperator::identity(3).scale(0.5))
            .unwrap();
        let ce = ergodic_projection(&omega, RANK_TOL).unwrap();
        assert!(ce.omega.distance(&trace_map(3)) < 1e-12);
        assert!(cesaro_average(&omega, 10_000).distance(&ce.omega) < 1e-3);
    }

    #[test]
    fn no_fixed_point_and_jordan_failures() {
        let twice = Superoperator::identity(2).scale(0.5);
        assert!(matches!(
            ergodic_projection(&twice, RANK_TOL),
            Err(Error::NoFixedPoint)
        ));
        let mut l = ComplexMatrix::identity(4);
        l[(0, 1)] = C64::new(1.0, 0.0);
        let jordan = Superoperator::new(2, l).unwrap();
        assert!(matches!(
            ergodic_projection(&jordan, RANK_TOL),
            Err(Error::DecompositionFailure { .. })
        ));
    }

    #[test]
    fn cesaro_small_cases() {
        let omega = conjugation_superop(&ComplexMatrix::diag_real(&[1.0, -1.0])).unwrap();
        assert_eq!(cesaro_average(&omega, 1), Superoperator::identity(2));
        for k in 1..5 {
            assert!(cesaro_average(&omega, 2 * k).distance(&diagonal_pinching(2)) < 1e-14);
        }
        // idempotent ω: (1/m)(id + (m−1)Ω)
        let p = diagonal_pinching(3);
        let id = Superoperator::identity(3);
        for m in [2usize, 7, 50] {
            let d = cesaro_average(&p, m).distance(&p);
            let want = id.distance(&p) / m as f64;
            assert!((d - want).abs() < 1e-12);
        }
    }

    #[test]
    fn ergodic_projection_commutes_with_omega() {
        let mut r = rng(31);
        for rank in 1..=3 {
            let omega = Superoperator::from_kraus(&random_ucp_kraus(&mut r, 3, rank)).unwrap();
            let ce = ergodic_projection(&omega, RANK_TOL).unwrap();
            let left = ce.omega.compose(&omega).unwrap();
            let right = omega.compose(&ce.omega).unwrap();
            assert!(left.distance(&ce.omega) < 1e-8);
            assert!(right.distance(&ce.omega) < 1e-8);
            assert!(is_ucp(&ce.omega, 1e-8));
        }
    }

    #[test]
    fn peripheral_of_identity_is_identity() {
        let p = peripheral_expectation(&Superoperator::identity(2), 1e-8).unwrap();
        assert!(p.distance(&Superoperator::identity(2)) < 1e-12);
    }

    #[test]
    fn peripheral_of_shifted_pinching_is_pinching() {
        let omega = shifted_pinching();
        let spectrum = peripheral_spectrum(&omega, 1e-8).unwrap();
        assert_eq!(spectrum.len(), 3);
        assert!(spectrum.iter().all(|p| p.is_semisimple(9)));
        let p = peripheral_expectation(&omega, 1e-8).unwrap();
        assert!(p.distance(&diagonal_pinching(3)) < 1e-10);
        assert!(omega.power(3).distance(&p) < 1e-12);
        // ergodic projection is coarser: scalars only
        let ce = ergodic_projection(&omega, RANK_TOL).unwrap();
        assert!(ce.omega.distance(&trace_map(3)) < 1e-10);
    }

    #[test]
    fn peripheral_detects_jordan_block() {
        let mut l = ComplexMatrix::identity(4);
        l[(2, 3)] = C64::new(0.5, 0.0);
        let omega = Superoperator::new(2, l).unwrap();
        assert!(matches!(
            peripheral_expectation(&omega, 1e-8),
            Err(Error::PeripheralDefect { .. })
        ));
    }

    #[test]
    fn peripheral_equals_ergodic_for_primitive_maps() {
        let mut r = rng(17);
        let omega = Superoperator::from_kraus(&random_ucp_kraus(&mut r, 3, 3)).unwrap();
        let p = peripheral_expectation(&omega, 1e-8).unwrap();
        let ce = ergodic_projection(&omega, RANK_TOL).unwrap();
        assert!(p.distance(&ce.omega) < 1e-8);
    }

    #[test]
    fn choi_effros_examples() {
        let mut r = rng(5);
        let id = ergodic_projection(&Superoperator::identity(2), RANK_TOL).unwrap();
        let x = random_matrix(&mut r, 2, 2);
        let y = random_matrix(&mut r, 2, 2);
        assert!(
            choi_effros_product(&id, &x, &y)
                .unwrap()
                .frobenius_distance(&(&x * &y))
                < 1e-12
        );

        let diag = ergodic_projection(&conjugation_superop(&phase_diag(3, 0.7)).unwrap(), RANK_TOL)
            .unwrap();
        let dx = diagonal_pinching(3)
            .apply(&random_matrix(&mut r, 3, 3))
            .unwrap();
        let dy =
            ComplexMatrix::diag(&[C64::new(2.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, 3.0)]);
        let prod = choi_effros_product(&diag, &dx, &dy).unwrap();
        assert!(prod.frobenius_distance(&(&dx * &dy)) < 1e-12);
        assert!(matches!(
            choi_effros_product(&diag, &random_matrix(&mut r, 3, 3), &dy),
            Err(Error::NotInRange { .. })
        ));
    }

    #[test]
    fn block_pinching_product_is_blockwise() {
        let mut r = rng(19);
        let pin = block_pinching(&[2, 1]);
        let ce = ergodic_projection(&pin, RANK_TOL).unwrap();
        let x = pin.apply(&random_matrix(&mut r, 3, 3)).unwrap();
        let y = pin.apply(&random_matrix(&mut r, 3, 3)).unwrap();
        let prod = choi_effros_product(&ce, &x, &y).unwrap();
        let mut want = &x.block(0, 0, 2, 2) * &y.block(0, 0, 2, 2);
        want = want.direct_sum(&(&x.block(2, 2, 1, 1) * &y.block(2, 2, 1, 1)));
        assert!(prod.frobenius_distance(&want) < 1e-12);
    }

    #[test]
    fn module_property_examples() {
        let mut r = rng(23);
        let id = ergodic_projection(&Superoperator::identity(2), RANK_TOL).unwrap();
        let y = random_matrix(&mut r, 2, 2);
        let z = random_matrix(&mut r, 2, 2);
        assert!(module_property_check(&id, &y, &z).unwrap() < 1e-14);

        let diag = ergodic_projection(&diagonal_pinching(3), RANK_TOL).unwrap();
        let yd = diagonal_pinching(3)
            .apply(&random_matrix(&mut r, 3, 3))
            .unwrap();
        let z3 = random_matrix(&mut r, 3, 3);
        assert!(module_property_check(&diag, &yd, &z3).unwrap() <= 1e-10);

        let tr = ergodic_projection(&trace_map(3), RANK_TOL).unwrap();
        let defect = module_property_check(&tr, &ComplexMatrix::identity(3), &z3).unwrap();
        assert!(defect < 1e-14);
    }
}
