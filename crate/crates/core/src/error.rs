use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A phase-space point outside the admissible domain of a realization.
    #[error("domain error: {0}")]
    Domain(String),

    /// Quantum numbers outside the range where a coefficient formula is defined.
    #[error("index out of range: {0}")]
    Index(String),

    /// A derived coefficient table failed its defining constraints.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// A matrix failed a Hermitian / skew-Hermitian / unitary check.
    #[error("symmetry check failed: {0}")]
    Symmetry(String),

    /// No singular-value gap of the requested ratio exists.
    #[error("numerical rank is ambiguous: {0}")]
    RankAmbiguous(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A violated precondition on an argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown generator name `{0}`")]
    UnknownGenerator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
