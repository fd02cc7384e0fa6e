use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("unsupported dimension {0}: only single- and two-qubit operators (2, 4) are supported")]
    UnsupportedDimension(usize),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("function is not finite on eigenvalue {0}")]
    Domain(f64),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("relative entropy is infinite: support of the state is not contained in the reference support")]
    InfiniteDivergence,

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("feedback label {0} has zero marginal probability but is realized")]
    DegenerateMarginal(usize),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
