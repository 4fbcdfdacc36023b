use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("map is not unital completely positive")]
    NotUcp,

    #[error("1 is not an eigenvalue of the map")]
    NoFixedPoint,

    #[error(
        "fixed space and range of (map - id) intersect (smallest singular value {sigma_min:.3e})"
    )]
    DecompositionFailure { sigma_min: f64 },

    #[error("peripheral eigenvalue {re:+.6}{im:+.6}i is not semisimple")]
    PeripheralDefect { re: f64, im: f64 },

    #[error("matrix is not in the range of the conditional expectation (defect {defect:.3e})")]
    NotInRange { defect: f64 },

    #[error("no ucp map satisfies the constraints (residual {residual:.3e} after {iterations} iterations)")]
    Infeasible { residual: f64, iterations: usize },

    #[error("no nonzero intertwiner exists")]
    NoIntertwiner,

    #[error("matrices are not unitarily similar: {0}")]
    NotUnitarilySimilar(String),

    #[error("map is not a unitary conjugation (Kraus rank {rank})")]
    NotConjugation { rank: usize },

    #[error("singular matrix")]
    Singular,

    #[error("{words} trace words requested, limit is {limit}")]
    TooManyWords { words: u128, limit: u128 },

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
