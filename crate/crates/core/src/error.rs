use thiserror::Error;

/// Failure raised by an objective oracle.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum OracleError {
    #[error("oracle protocol error: {0}")]
    Protocol(String),
    #[error("oracle process exited: {0}")]
    ProcessExited(String),
    #[error("oracle timed out after {0:.3} s")]
    Timeout(f64),
    #[error("oracle i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("objective requested outside the unrelaxable feasible set at {point}")]
    InfeasibleEvaluation { point: String },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid feasible set: {0}")]
    InvalidSet(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("coordinate {0} has zero room for a finite difference in either direction")]
    DegenerateCoordinate(usize),
    #[error("gradient is zero")]
    ZeroGradient,
    #[error("model decrease must be positive, got {0}")]
    ZeroModelDecrease(f64),
    #[error("problem `{0}` has no exact gradient")]
    MissingExactGradient(String),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("no run records supplied")]
    EmptyRecords,
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("malformed data: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
