//! Error taxonomy shared by every module.
//!
//! The variants mirror how the CLI reports failures: invalid input (exit 2),
//! violated preconditions or divergent regimes (exit 3), and numerical
//! breakdown inside a solver (exit 4).

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed data: non-square input, negative entries where a
    /// nonnegative matrix is required, non-finite values, bad sizes.
    InvalidInput(String),
    /// A documented precondition does not hold (reducible matrix, periodic
    /// chain, asymmetric matrix where symmetry is required, ...).
    Precondition(String),
    /// A decay/feedback parameter places the system past the radius of
    /// convergence; no finite solution exists.
    Divergence(String),
    /// A utility model violates its structural assumptions at the point of
    /// evaluation (e.g. own-action derivative not negative).
    ModelViolation(String),
    /// The observed data carries no usable spectral structure for the
    /// requested design.
    NoRecoverableStructure(String),
    /// An eigensolver or linear solver failed to produce a trustworthy
    /// answer.
    Numeric(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violation: {msg}"),
            Error::Divergence(msg) => write!(f, "divergence: {msg}"),
            Error::ModelViolation(msg) => write!(f, "model violation: {msg}"),
            Error::NoRecoverableStructure(msg) => write!(f, "no recoverable structure: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
