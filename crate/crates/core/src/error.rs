use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("size {size} exceeds the brute-force limit {limit}; use the assignment-based test")]
    SizeLimitExceeded { size: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no column replacement keeps the matrix non-singular (this is a bug)")]
    LemmaViolation,

    #[error("matrix has no finite assignment")]
    NoFiniteAssignment,

    #[error("malformed symmetrized matrix: {0}")]
    MalformedSymmetrized(String),

    #[error("label clash: {0}")]
    LabelClash(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("coefficient field has fewer than three elements")]
    FieldTooSmall,

    #[error("not a lifting: {0}")]
    NotALifting(String),

    #[error("negative radicand: n^2 - ku = {0}")]
    NegativeRadicand(String),

    #[error("no good tuple after {attempts} attempts (cond1 failures {cond1_failures}, cond2 failures {cond2_failures})")]
    AttemptsExhausted {
        attempts: usize,
        cond1_failures: usize,
        cond2_failures: usize,
    },

    #[error("invalid alpha: {0}")]
    InvalidAlpha(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integer overflow while scaling entries")]
    Overflow,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
