use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDist(String),

    #[error("invalid stochastic matrix: {0}")]
    InvalidStochMatrix(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid pure state: {0}")]
    InvalidPureState(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("size limit exceeded: {what} is {size}, limit {limit}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("resource kind mismatch: theory expects {expected}, got {got}")]
    KindMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("unsound oracle: {0}")]
    OracleSoundness(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("enumeration budget of {0} exceeded")]
    Budget(usize),

    #[error("unknown id: {0}")]
    UnknownId(String),
}

pub type Result<T> = std::result::Result<T, Error>;
