//! Explicit unitaries: intertwiners of irreducible matrices and Kraus operators of
//! conjugation maps.

use crate::cp::{choi, is_ucp, kraus_from_choi, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{svd, ComplexMatrix, C64, RANK_TOL};
use crate::similarity::irreducible::intertwiner_system;

/// Multiplies by a unit scalar so that the first entry of largest modulus (row-major)
/// is real and positive.
pub fn normalize_phase(u: &ComplexMatrix) -> ComplexMatrix {
    let mut best = C64::new(0.0, 0.0);
    for &z in u.as_slice() {
        if z.norm() > best.norm() * (1.0 + 1e-12) {
            best = z;
        }
    }
    if best.norm() == 0.0 {
        return u.clone();
    }
    let mut out = u.scale(best.conj() / best.norm());
    let data = out.as_mut_slice();
    if let Some(z) = data
        .iter_mut()
        .find(|z| z.norm() >= best.norm() / (1.0 + 1e-12))
    {
        *z = C64::new(z.norm(), 0.0);
    }
    out
}

fn unitary_defect(u: &ComplexMatrix) -> f64 {
    (&u.adjoint() * u).frobenius_distance(&ComplexMatrix::identity(u.rows()))
}

/// Finds `U` with `U*AU = B` when `A` is irreducible.
///
/// The intertwiners `{S : AS = SB, A*S = SB*}` form a space of dimension at most one
/// in that case; a nonzero intertwiner is a multiple of a unitary.
pub fn recover_unitary(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let n = a.require_square("A")?;
    b.require_same_shape(a, "A and B")?;
    let d = svd(&intertwiner_system(a, b)?);
    let null = d.null_vectors(RANK_TOL);
    match null.len() {
        0 => return Err(Error::NoIntertwiner),
        1 => {}
        k => {
            return Err(Error::NotUnitarilySimilar(format!(
                "intertwiner space has dimension {k}, so A is reducible"
            )))
        }
    }
    let s = ComplexMatrix::unvec(&null[0], n, n)?;
    // AS = SB and A*S = SB* force S*S into the commutant of B, hence S*S = cI.
    let gram = &s.adjoint() * &s;
    let c = gram.trace().re / n as f64;
    let id = ComplexMatrix::identity(n);
    let defect = gram.frobenius_distance(&id.scale_real(c)) / c;
    if c <= 0.0 || c.is_nan() || defect > 1e-6 {
        return Err(Error::NotUnitarilySimilar(format!(
            "intertwiner is not a multiple of a unitary (defect {defect:.3e})"
        )));
    }
    let u = normalize_phase(&s.scale_real(1.0 / c.sqrt()));
    let residual = (&(&u.adjoint() * a) * &u).frobenius_distance(b);
    if residual > tol * (1.0 + a.frobenius_norm()) || unitary_defect(&u) > 1e-8 {
        return Err(Error::NotUnitarilySimilar(format!(
            "recovered unitary misses B by {residual:.3e}"
        )));
    }
    Ok(u)
}

/// The unitary `V` of a ucp map `φ(X) = V*XV`, phase-normalized.
///
/// A ucp map that is a unital isometric (Jordan) homomorphism of this kind has a
/// single Kraus operator; anything else is rejected with its Kraus rank.
pub fn kadison_extract(phi: &Superoperator, tol: f64) -> Result<ComplexMatrix> {
    if !is_ucp(phi, tol) {
        return Err(Error::NotUcp);
    }
    let kraus = kraus_from_choi(&choi(phi), tol)?;
    if kraus.rank() != 1 {
        return Err(Error::NotConjugation { rank: kraus.rank() });
    }
    let v = &kraus.ops[0];
    if unitary_defect(v) > tol.max(1e-12) * phi.n() as f64 {
        return Err(Error::NotConjugation { rank: 1 });
    }
    Ok(normalize_phase(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::{conjugation_superop, diagonal_pinching, transpose_map};
    use crate::random::{random_matrix, random_unitary, rng};

    fn similar(a: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
        &(&u.adjoint() * a) * u
    }

    #[test]
    fn recovers_unitary_up_to_phase() {
        let mut r = rng(11);
        for n in 2..=5 {
            let a = random_matrix(&mut r, n, n);
            let u = random_unitary(&mut r, n);
            let b = similar(&a, &u);
            let got = recover_unitary(&a, &b, 1e-8).unwrap();
            assert!(unitary_defect(&got) <= 1e-8);
            assert!(similar(&a, &got).frobenius_distance(&b) <= 1e-8 * (1.0 + a.frobenius_norm()));
            assert!(got.frobenius_distance(&normalize_phase(&u)) < 1e-8);
        }
    }

    #[test]
    fn identity_pair_gives_identity() {
        let mut r = rng(12);
        let a = random_matrix(&mut r, 3, 3);
        let u = recover_unitary(&a, &a, 1e-8).unwrap();
        assert!(u.frobenius_distance(&ComplexMatrix::identity(3)) < 1e-10);
    }

    #[test]
    fn different_spectra_have_no_intertwiner() {
        let mut r = rng(13);
        let a = random_matrix(&mut r, 3, 3);
        let b = &a + &ComplexMatrix::identity(3);
        assert_eq!(recover_unitary(&a, &b, 1e-8), Err(Error::NoIntertwiner));
    }

    #[test]
    fn reducible_pair_is_refused() {
        let a = ComplexMatrix::diag_real(&[1.0, 2.0]);
        assert!(matches!(
            recover_unitary(&a, &a, 1e-8),
            Err(Error::NotUnitarilySimilar(_))
        ));
    }

    #[test]
    fn phase_normalization_is_canonical() {
        let mut r = rng(14);
        let u = random_unitary(&mut r, 3);
        let v = normalize_phase(&u.scale(C64::from_polar(1.0, 2.1)));
        assert!(v.frobenius_distance(&normalize_phase(&u)) < 1e-12);
        let top = v.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lead = v
            .as_slice()
            .iter()
            .find(|z| z.norm() >= top * (1.0 - 1e-12))
            .unwrap();
        assert_eq!(lead.im, 0.0);
        assert!(lead.re > 0.0);
    }

    #[test]
    fn kadison_returns_conjugating_unitary() {
        let mut r = rng(15);
        for n in 1..=4 {
            let u = random_unitary(&mut r, n);
            let phi = conjugation_superop(&u).unwrap();
            let v = kadison_extract(&phi, 1e-9).unwrap();
            assert!(v.frobenius_distance(&normalize_phase(&u)) < 1e-9);
        }
    }

    #[test]
    fn kadison_rejects_other_maps() {
        let mut r = rng(16);
        let u = random_unitary(&mut r, 3);
        let w = random_unitary(&mut r, 3);
        let mix = conjugation_superop(&u)
            .unwrap()
            .scale(0.5)
            .add(&conjugation_superop(&w).unwrap().scale(0.5))
            .unwrap();
        assert_eq!(
            kadison_extract(&mix, 1e-9),
            Err(Error::NotConjugation { rank: 2 })
        );
        assert_eq!(
            kadison_extract(&diagonal_pinching(3), 1e-9),
            Err(Error::NotConjugation { rank: 3 })
        );
        assert_eq!(kadison_extract(&transpose_map(2), 1e-9), Err(Error::NotUcp));
    }
}
