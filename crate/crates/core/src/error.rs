use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("solution diverged; last good x = {x}")]
    Diverged { x: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error estimate {error}")]
    Accuracy { estimate: f64, error: f64 },

    #[error("Newton iteration did not converge after {} iterations (last residual {:e})",
        .history.len(), .history.last().copied().unwrap_or(f64::NAN))]
    Solver { history: Vec<f64> },

    #[error("x = {x} lies outside the grid [{lo}, {hi}] and no extension is attached")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("integrand does not vanish at the grid end ({value:e}); a tail model is required")]
    Truncation { value: f64 },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("empty sample stream")]
    EmptySamples,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
