//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A file could not be parsed; `line` is 1-based and includes the header.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Input data violates a documented invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration file or key is invalid.
    #[error("config error: {0}")]
    Config(String),

    /// The translation optimizer hit a non-finite loss; carries the last valid iterate.
    #[error("optimizer error: {msg} (last valid iterate ({x}, {y}))")]
    Optimizer { msg: String, x: f64, y: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
