use std::fmt;

/// Error taxonomy shared by every module.
///
/// `Input` is a malformed argument, `Domain` a mathematically invalid request
/// (singular matrix, parameter outside its range), `Numeric` an iteration
/// that failed to converge, and `Budget` an enumeration that would exceed
/// the configured word budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    Input(String),
    Domain(String),
    Numeric(String),
    Budget(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(msg) => write!(f, "input error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            Error::Budget(msg) => write!(f, "budget exceeded: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
