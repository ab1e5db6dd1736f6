//! Error type shared by all modules.

use thiserror::Error;

/// Failure classes; the CLI maps them to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LedError {
    /// Input outside the domain of definition (superluminal, bad radius, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A constraint that the input must satisfy is violated.
    #[error("constraint violated: {0}")]
    Constraint(String),
    /// A numerical procedure failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Malformed external data (tables, data files).
    #[error("invalid input data: {0}")]
    Input(String),
}

impl LedError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }
    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Self::Numerical(msg.into())
    }
    pub(crate) fn constraint(msg: impl Into<String>) -> Self {
        Self::Constraint(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, LedError>;
