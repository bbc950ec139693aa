use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no ground state bracket found for amplitudes in [{lo:e}, {hi:e}]")]
    NoGroundState { lo: f64, hi: f64 },

    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("field leaks into the box boundary (relative boundary mass {fraction:e})")]
    BoundaryLeakage { fraction: f64 },

    #[error("checkpoint format error at byte {offset}: {reason}")]
    Format { offset: u64, reason: String },

    #[error("unsupported checkpoint version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
