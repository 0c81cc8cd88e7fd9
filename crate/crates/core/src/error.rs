use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// Inconsistent or invalid run parameters.
    Config(String),
    /// Invalid initial data.
    Input(String),
    /// The kinetics have no positive equilibrium in the scanned range.
    NoPositiveEquilibrium,
    /// The sampled field has no positive value.
    NoEdge,
    /// The support reached the left end of the grid.
    EdgeLeftDomain,
    /// Fewer samples than a fit requires.
    InsufficientData { needed: usize, found: usize },
    /// An integrator or solver failed.
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Input(msg) => write!(f, "input error: {msg}"),
            Error::NoPositiveEquilibrium => f.write_str("no positive equilibrium"),
            Error::NoEdge => f.write_str("no edge"),
            Error::EdgeLeftDomain => f.write_str("edge left the domain"),
            Error::InsufficientData { needed, found } => {
                write!(f, "insufficient data: need {needed} points, found {found}")
            }
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
