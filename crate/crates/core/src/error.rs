use num_complex::Complex64;
use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at z = {z}: {what}")]
    Pole { z: Complex64, what: String },

    #[error("numerical failure: {msg}")]
    Numerical {
        msg: String,
        /// Best value available when the iteration gave up, if any.
        partial: Option<Complex64>,
    },

    #[error("resource budget exhausted: {msg}")]
    Resource { msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical { msg: msg.into(), partial: None }
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource { msg: msg.into() }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical { .. } | Error::Resource { .. } => 2,
            Error::InvalidInput(_) | Error::Domain(_) | Error::Pole { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
