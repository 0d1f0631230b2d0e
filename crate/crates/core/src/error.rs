use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Variants are split so the CLI can tell input problems from domain
/// failures (infeasible ansatz, size guards) when picking an exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("unexpected format tag {found:?}, expected {expected:?}")]
    FormatTag {
        expected: &'static str,
        found: String,
    },

    #[error("invalid pauli label {label:?}: {reason}")]
    InvalidPauli { label: String, reason: String },

    #[error("invalid coefficient {value} for term {index}")]
    InvalidCoefficient { index: usize, value: f64 },

    #[error("duplicate pauli label {label:?} at terms {first} and {second}")]
    DuplicateLabel {
        label: String,
        first: usize,
        second: usize,
    },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("need at least {required} terms, found {found}")]
    TooFewTerms { required: usize, found: usize },

    #[error("probability p[{index}] = {value} outside (0, 1]")]
    InvalidProbability { index: usize, value: f64 },

    #[error("linear ansatz infeasible: p[{index}] = {value} violates p < 1")]
    Infeasible { index: usize, value: f64 },

    #[error("no feasible grid point")]
    NoFeasiblePoint,

    #[error("size guard: {what} = {value} exceeds limit {limit}")]
    SizeGuard {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
