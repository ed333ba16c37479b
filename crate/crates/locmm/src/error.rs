use thiserror::Error;

/// Errors surfaced by body oracles, packing construction, estimators, and
/// the rate solvers. Numerical failures are always explicit; no oracle
/// silently returns an inaccurate answer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid body descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("{context}: no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        context: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("entropy request too large: estimated packing cardinality {estimate:.3e} exceeds budget {budget}")]
    BudgetExceeded { estimate: f64, budget: usize },

    #[error("sampler failure: {0}")]
    SamplerFailure(String),

    #[error("ball growth cap reached: 2^{cap} still does not enclose the projected anchor (needs {needed:.3e})")]
    BallCapExceeded { cap: u32, needed: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Exit code for the CLI: validation problems are 2, numerical failures 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::InvalidInput(_)
            | Error::InvalidDescriptor(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::NonConvergence { .. }
            | Error::BudgetExceeded { .. }
            | Error::SamplerFailure(_)
            | Error::BallCapExceeded { .. } => 3,
        }
    }
}
