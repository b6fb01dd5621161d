use thiserror::Error;

/// Errors shared across the crate. Display output starts with the variant
/// name so CLI diagnostics can be matched by name.
#[derive(Debug, Error)]
pub enum Error {
    #[error("CapacityExceeded: {0}")]
    CapacityExceeded(String),
    #[error("DimensionMismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("InsufficientUniverse: requested {requested} samples but the universe has {universe}")]
    InsufficientUniverse { requested: u64, universe: u64 },
    #[error("IndexOutOfRange: {0}")]
    IndexOutOfRange(String),
    #[error("PreconditionViolated: {0}")]
    PreconditionViolated(String),
    #[error("InconsistentOutcome: identical signatures at rows {first} and {second} disagree on the outcome")]
    InconsistentOutcome { first: usize, second: usize },
    #[error("InconsistentSystem: positive row {row} has every entry forced to zero")]
    InconsistentSystem { row: usize },
    #[error("DomainError: {0}")]
    DomainError(String),
    #[error("ParseError: line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
