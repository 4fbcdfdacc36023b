//! Deciding unitary similarity of complex matrices through the norm invariants
//! `f_(H,K)(A) = ‖A ⊗ H + I ⊗ K‖`, with constructive recovery of the conjugating
//! unitary.
//!
//! The crate is layered:
//!
//! - [`linalg`]: dense complex matrices, Jacobi eigen/SVD solvers, Kronecker products,
//!   spectral norms.
//! - [`cp`]: linear maps on `M_n` (superoperators), Choi matrices, Kraus
//!   decompositions, ergodic conditional expectations and ucp feasibility search.
//! - [`similarity`]: irreducibility, invariant sampling, trace-word invariants,
//!   intertwiner recovery, and the decision pipeline [`similarity::arveson_check`].

pub mod cp;
pub mod error;
pub mod linalg;
pub mod random;
pub mod similarity;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
