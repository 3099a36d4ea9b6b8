use thiserror::Error as ThisError;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("lookup failed: {0}")]
    Lookup(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("counts record is empty")]
    EmptyRecord,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;
