use thiserror::Error;

/// Errors raised by the library. Mathematical invariant failures are kept
/// apart from bad input so callers can map them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("additive character of level {psi_level} cannot be paired with modulus p^{k}")]
    LevelMismatch { psi_level: u32, k: u32 },

    #[error("{n} is not a unit modulo {modulus}")]
    NonUnit { n: i64, modulus: u64 },

    #[error("group of order {order} exceeds the element budget {budget}")]
    BudgetExceeded { order: u64, budget: u64 },

    #[error("q-expansion truncated at {available} terms, certificate needs at least {required}")]
    InsufficientTerms { required: usize, available: usize },

    #[error("model of {label} disagrees with its conductor at p = {p}: bad reduction of the model and p | N do not match")]
    ModelMismatch { label: String, p: u64 },

    #[error("representation does not satisfy the precondition: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a mathematical check (as opposed to bad input).
    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
