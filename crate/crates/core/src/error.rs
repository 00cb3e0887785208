//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building or certifying the construction.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation
    /// (e.g. a basis index below the first admissible level).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed caller-supplied data: bad files, blocks that do not
    /// partition their window, out-of-window coordinates, empty inputs.
    #[error("input error: {0}")]
    Input(String),

    /// A documented precondition of an operation does not hold
    /// (e.g. a required adjacent partition level is missing).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The partition generator could not satisfy its contract at a level.
    #[error("partition generation failed at level {level}: {reason}")]
    Generation { level: u32, reason: String },

    /// A numerical kernel failed to meet its accuracy contract
    /// (non-convergence, non-finite input, reconstruction residual too large).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A certified check evaluated to false.
    #[error("certification failure: {0}")]
    Certification(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
