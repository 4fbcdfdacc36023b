//! Unitary similarity: irreducibility, norm invariants, trace words, unitary recovery
//! and the boundary property of irreducible matrices.

pub mod boundary;
pub mod check;
pub mod invariant;
pub mod irreducible;
pub mod probe;
pub mod recover;
pub mod specht;

pub use boundary::{boundary_verify, BoundaryReport};
pub use check::{arveson_check, build_ucp_between, SimilarityReport, Verdict};
pub use invariant::{
    arveson_invariant, invariant_values, invariants_match, sample_pairs, InvariantComparison,
    SamplePlan, Witness, DEFAULT_GRID, DEFAULT_SAMPLES, DEFAULT_SEED,
};
pub use irreducible::{
    commutant_basis, commutant_dimension, commutant_spectrum, is_irreducible, reducing_projection,
};
pub use probe::{remark_probe, ProbeSample, RemarkProbe};
pub use recover::{kadison_extract, normalize_phase, recover_unitary};
pub use specht::{default_word_length, specht_invariants, word_count, Letter, Word, MAX_WORDS};
