use thiserror::Error;

/// Library-wide error type. Variants carry enough payload to diagnose the
/// failure without re-running the computation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A dyadic series was requested outside its convergence regime.
    #[error("series regime violation: {0}")]
    Regime(String),

    /// Iteration produced a non-finite value. The trace holds every iterate
    /// norm computed before the blow-up, so callers can report the run.
    #[error("iteration diverged for the {target} component at m = {at_m} (trace of {} iterate norms attached)", trace_norms.len())]
    Divergence {
        target: &'static str,
        at_m: usize,
        trace_norms: Vec<f64>,
    },

    /// Iteration ran to its cap without meeting the tail tolerance.
    #[error("iteration did not converge for the {target} component: tail {tail:e} > tol {tol:e} after m_max = {m_max}")]
    Unconverged {
        target: &'static str,
        tail: f64,
        tol: f64,
        m_max: usize,
    },

    /// A control function vanishes on grid pairs where the residual does not,
    /// so no finite amplitude can dominate the residual there.
    #[error("empirical amplitude fit infeasible: residual nonzero where the control shape vanishes at {} pair(s), first at (x, y) = ({:?}, {:?})", pairs.len(), pairs[0].0, pairs[0].1)]
    Infeasible {
        pairs: Vec<(Vec<f64>, Vec<f64>)>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for CLI use: 1 for mathematical failures
    /// (divergence, regime violations, infeasible fits), 2 for usage,
    /// configuration, and I/O problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Regime(_)
            | Error::Divergence { .. }
            | Error::Unconverged { .. }
            | Error::Infeasible { .. } => 1,
            Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
