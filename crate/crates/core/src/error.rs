use thiserror::Error;

use crate::spectral::RealField;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Newton iteration failed to reach the requested tolerance.
    #[error("newton diverged after {iterations} iterations (last residual {last_residual:e}): {reason}")]
    NewtonDiverged {
        iterations: usize,
        last_residual: f64,
        reason: String,
        residual_history: Vec<f64>,
        last_iterate: Box<RealField>,
    },

    /// Requested velocity lies where solitary waves provably do not exist.
    #[error("velocity c = {c} lies in the nonexistence window (c > alpha^2/(5 beta) = {threshold})")]
    NonexistenceWindow { c: f64, threshold: f64 },

    #[error("profile is not classifiable: {0}")]
    NotClassifiable(String),

    #[error("no coherent structure found: {0}")]
    NotFound(String),

    /// Time integration produced non-finite values or exceeded the blow-up bound.
    /// The trajectory recorded up to the failure is attached.
    #[error("blow-up at t = {time}: {reason}")]
    BlowUp {
        time: f64,
        reason: String,
        trajectory: Box<crate::evolution::Trajectory>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
