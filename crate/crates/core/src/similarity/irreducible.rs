//! Commutants and irreducibility.

use crate::error::Result;
use crate::linalg::{svd, ComplexMatrix, C64};

/// Stacked system whose nullspace is `{S : AS = SB, A*S = SB*}` acting on `vec(S)`.
pub(crate) fn intertwiner_system(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square("A")?;
    b.require_same_shape(a, "intertwiner operands")?;
    let id = ComplexMatrix::identity(n);
    let top = &id.kron(a) - &b.transpose().kron(&id);
    let bottom = &id.kron(&a.adjoint()) - &b.conj().kron(&id);
    top.vstack(&bottom)
}

/// Singular values of the commutant system, descending.
pub fn commutant_spectrum(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(&intertwiner_system(a, a)?).singular_values)
}

/// Dimension of `{S : AS = SA, A*S = SA*}`, the commutant of `{A, A*}`.
pub fn commutant_dimension(a: &ComplexMatrix, tol: f64) -> Result<usize> {
    let d = svd(&intertwiner_system(a, a)?);
    Ok(d.null_vectors(tol).len())
}

/// Orthonormal (Frobenius) basis of the commutant of `{A, A*}`.
pub fn commutant_basis(a: &ComplexMatrix, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let n = a.require_square("A")?;
    let d = svd(&intertwiner_system(a, a)?);
    Ok(d.null_vectors(tol)
        .iter()
        .map(|v| ComplexMatrix::unvec(v, n, n).expect("n² entries"))
        .collect())
}

/// Trivial commutant, i.e. `{I, A, A*}` generates `M_n`.
pub fn is_irreducible(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(commutant_dimension(a, tol)? == 1)
}

/// A projection `P ∉ {0, I}` commuting with `A`, if the commutant is nontrivial.
///
/// Taken as the spectral projection for the smallest eigenvalue of a Hermitian
/// commutant element that is not a scalar.
pub fn reducing_projection(a: &ComplexMatrix, tol: f64) -> Result<Option<ComplexMatrix>> {
    let n = a.require_square("A")?;
    let basis = commutant_basis(a, tol)?;
    if basis.len() < 2 {
        return Ok(None);
    }
    let id = ComplexMatrix::identity(n);
    for s in &basis {
        for h in [
            s + &s.adjoint(),
            (s - &s.adjoint()).scale(C64::new(0.0, 1.0)),
        ] {
            let h = h.hermitian_part();
            let eig = crate::linalg::hermitian_eig(&h, f64::INFINITY)?;
            let spread = eig.max() - eig.min();
            if spread <= 1e-6 * (1.0 + h.frobenius_norm()) {
                continue;
            }
            let lo = eig.min();
            let p = eig.apply_fn(|x| if x - lo <= 1e-3 * spread { 1.0 } else { 0.0 });
            if p.frobenius_distance(&ComplexMatrix::zeros(n, n)) > 0.5
                && p.frobenius_distance(&id) > 0.5
            {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}
