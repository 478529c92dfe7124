use thiserror::Error;

/// Errors raised by the simulation and learning routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid qubit subset: {0}")]
    InvalidSubset(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("too many qubits: {n} exceeds the limit of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("schedule mismatch: {0}")]
    ScheduleMismatch(String),

    #[error("shot budget exceeded: {requested} shots requested, limit is {limit}")]
    BudgetExceeded { requested: u64, limit: u64 },

    #[error("insufficient data: subset {subset} has no records measured in basis {basis}")]
    InsufficientData { subset: String, basis: String },

    #[error("not the unique ground state: {0}")]
    NotUniqueGroundState(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
