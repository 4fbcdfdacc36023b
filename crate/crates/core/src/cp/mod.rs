//! Linear transformations of matrix space and their completely positive structure.

pub mod choi;
pub mod ergodic;
pub mod feasibility;
pub mod superop;

pub use choi::{choi, is_ucp, kraus_from_choi, ChoiMatrix, KrausSet};
pub use ergodic::{
    cesaro_average, choi_effros_product, ergodic_projection, module_property_check,
    peripheral_expectation, peripheral_spectrum, ConditionalExpectation, PeripheralEigenvalue,
};
pub use feasibility::{
    constraint_residual, ucp_feasibility, FeasibilityMethod, FeasibilityOptions, Feasible,
};
pub use superop::{
    block_pinching, conjugation_superop, diagonal_pinching, trace_map, transpose_map, Superoperator,
};
