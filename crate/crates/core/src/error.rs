use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("unsupported matrix shape {rows}x{cols} (only 2 and 4 are supported)")]
    UnsupportedShape { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid subsystem index {0} (0 = ancilla, 1 = system)")]
    InvalidSubsystem(usize),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("parameter `{name}` = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid flip operator `{0}` (expected X or Z)")]
    InvalidFlip(String),

    #[error("Q undefined: p_xx + p_zz + p_xz + p_zx = 0")]
    CorrelationUndefined,

    #[error("map is not unital (|t| = {0:.3e})")]
    NonUnital(f64),

    #[error("input state insufficient for process extraction (smallest singular value {0:.3e})")]
    IllConditionedInput(f64),

    #[error("counts record: {0}")]
    Counts(String),
}

pub type Result<T> = std::result::Result<T, Error>;
