//! Non-Hermitian helpers: eigenvalues by shifted Hessenberg QR, and LU solves.

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, C64, ONE, ZERO};

const MAX_QR_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of a square complex matrix (with multiplicity, unordered).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = m.require_square("eigenvalue input")?;
    let mut h = hessenberg(m);
    let mut out = Vec::with_capacity(n);
    let mut hi = n;
    let mut iter = 0usize;
    while hi > 0 {
        if hi == 1 {
            out.push(h[(0, 0)]);
            break;
        }
        // Find the start of the trailing unreduced block.
        let mut lo = hi - 1;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let scale = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let scale = if scale == 0.0 { 1.0 } else { scale };
            if sub <= f64::EPSILON * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            out.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_QR_ITERATIONS_PER_EIGENVALUE * n {
            return Err(Error::NoConvergence("Hessenberg QR".into()));
        }
        let shift = if iter.is_multiple_of(11) {
            // exceptional shift
            h[(hi - 1, hi - 1)] + C64::new(h[(hi - 1, hi - 2)].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            )
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(out)
}

/// Eigenvalue of the trailing 2x2 block closest to its bottom-right entry.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicitly shifted QR step on the active window `[lo, hi)`.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    for i in lo..hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (ONE, ZERO)
        } else {
            (a / r, b / r)
        };
        for j in k..hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = c.conj() * x + s.conj() * y;
            h[(k + 1, j)] = -s * x + c * y;
        }
        rotations.push((c, s));
    }
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + idx;
        let last = (k + 2).min(hi - 1);
        for i in lo..=last {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s;
            h[(i, k + 1)] = -x * s.conj() + y * c.conj();
        }
    }
    for i in lo..hi {
        h[(i, i)] += shift;
    }
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            ONE
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x.clone();
        v[0] += phase * alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // H <- (I - 2vv*) H (I - 2vv*) on rows/cols k+1..n
        for j in 0..n {
            let dot: C64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= v[i] * dot * 2.0;
            }
        }
        for i in 0..n {
            let dot: C64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= dot * v[j].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

/// LU factorization with partial pivoting.
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        let n = m.require_square("LU input")?;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (piv, mag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if mag <= f64::EPSILON * scale * n as f64 * 1e-3 {
                return Err(Error::Singular);
            }
            if piv != k {
                perm.swap(piv, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = t;
                }
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows();
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                y[i] = y[i] - l * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                y[i] = y[i] - u * y[j];
            }
            y[i] /= self.lu[(i, i)];
        }
        y
    }

    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let cols: Vec<Vec<C64>> = (0..b.cols()).map(|j| self.solve_vec(&b.col(j))).collect();
        ComplexMatrix::from_columns(b.rows(), &cols)
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.lu.rows()))
    }
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(Lu::new(m)?.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_unitary, rng};

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn eigenvalues_of_similarity_transform() {
        let mut r = rng(4);
        for n in 1..=8 {
            let d: Vec<C64> = (0..n)
                .map(|k| C64::new(k as f64 - 2.5, 0.3 * (k as f64).sin()))
                .collect();
            let p = random_matrix(&mut r, n, n);
            let m = &(&p * &ComplexMatrix::diag(&d)) * &inverse(&p).unwrap();
            let got = sorted(eigenvalues(&m).unwrap());
            let want = sorted(d);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).norm() < 1e-8, "n={n}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn unitary_eigenvalues_on_circle_with_multiplicity() {
        let mut r = rng(9);
        let u = random_unitary(&mut r, 3);
        // Conjugation superoperator has eigenvalue 1 with multiplicity >= 3.
        let l = u.transpose().kron(&u.adjoint());
        let ev = eigenvalues(&l).unwrap();
        assert_eq!(ev.len(), 9);
        assert!(ev.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert!(ev.iter().filter(|z| (*z - ONE).norm() < 1e-10).count() >= 3);
    }

    #[test]
    fn nilpotent_and_zero() {
        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(eigenvalues(&j).unwrap().iter().all(|z| z.norm() < 1e-12));
        assert!(eigenvalues(&ComplexMatrix::zeros(4, 4))
            .unwrap()
            .iter()
            .all(|z| z.norm() == 0.0));
    }

    #[test]
    fn trace_and_sum_agree() {
        let mut r = rng(12);
        let m = random_matrix(&mut r, 9, 9);
        let s: C64 = eigenvalues(&m).unwrap().iter().sum();
        assert!((s - m.trace()).norm() < 1e-10);
    }

    #[test]
    fn lu_inverse() {
        let mut r = rng(2);
        let m = random_matrix(&mut r, 6, 6);
        let inv = inverse(&m).unwrap();
        assert!((&m * &inv).frobenius_distance(&ComplexMatrix::identity(6)) < 1e-10);
        assert!(matches!(
            inverse(&ComplexMatrix::zeros(2, 2)),
            Err(Error::Singular)
        ));
    }
}
