//! Traces of words in `A` and `A*`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Words are enumerated level by level; beyond this many the call is refused.
pub const MAX_WORDS: u128 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    A,
    AStar,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|l| match l {
                Letter::A => "A",
                Letter::AStar => "A*",
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Length bound that suffices for unitary similarity in dimension `n`.
pub fn default_word_length(n: usize) -> usize {
    2 * n * n
}

/// Number of nonempty words of length at most `max_len`.
pub fn word_count(max_len: usize) -> u128 {
    if max_len >= 127 {
        u128::MAX
    } else {
        (1u128 << (max_len + 1)) - 2
    }
}

/// `tr(w(A, A*))` for every nonempty word of length at most `max_len`, shorter words
/// first and `A` before `A*` at each position.
pub fn specht_invariants(a: &ComplexMatrix, max_len: usize) -> Result<Vec<(Word, C64)>> {
    a.require_square("A")?;
    let words = word_count(max_len);
    if words > MAX_WORDS {
        return Err(Error::TooManyWords {
            words,
            limit: MAX_WORDS,
        });
    }
    let letters = [(Letter::A, a.clone()), (Letter::AStar, a.adjoint())];
    let mut out = Vec::with_capacity(words as usize);
    let mut level: Vec<(Vec<Letter>, ComplexMatrix)> =
        vec![(Vec::new(), ComplexMatrix::identity(a.rows()))];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (word, product) in &level {
            for (letter, m) in &letters {
                let mut w = word.clone();
                w.push(*letter);
                next.push((w, product * m));
            }
        }
        out.extend(next.iter().map(|(w, p)| (Word(w.clone()), p.trace())));
        level = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_unitary, rng};

    #[test]
    fn ordering_and_count() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let inv = specht_invariants(&a, 3).unwrap();
        assert_eq!(inv.len(), 14);
        let names: Vec<String> = inv.iter().take(6).map(|(w, _)| w.to_string()).collect();
        assert_eq!(names, ["A", "A*", "A A", "A A*", "A* A", "A* A*"]);
        // tr(A A*) = 1 for the Jordan block
        assert!((inv[3].1 - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(specht_invariants(&a, 0).unwrap().is_empty());
    }

    #[test]
    fn unitary_similarity_preserves_traces() {
        let mut r = rng(21);
        let a = random_matrix(&mut r, 3, 3);
        let u = random_unitary(&mut r, 3);
        let b = &(&u.adjoint() * &a) * &u;
        let ia = specht_invariants(&a, 6).unwrap();
        let ib = specht_invariants(&b, 6).unwrap();
        for ((wa, x), (wb, y)) in ia.iter().zip(&ib) {
            assert_eq!(wa, wb);
            assert!((x - y).norm() <= 1e-9 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn refuses_huge_enumerations() {
        let a = ComplexMatrix::identity(4);
        assert!(matches!(
            specht_invariants(&a, default_word_length(4)),
            Err(Error::TooManyWords { .. })
        ));
        assert_eq!(word_count(21), MAX_WORDS - 2);
        assert_eq!(
            specht_invariants(&ComplexMatrix::identity(2), 8)
                .unwrap()
                .len(),
            510
        );
    }
}
