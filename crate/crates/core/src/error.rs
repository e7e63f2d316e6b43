use crate::grid::Index;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("GMRES did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("forward solve failed at frequency index ({}, {}): {source}", index.0, index.1)]
    AtIndex {
        index: Index,
        #[source]
        source: Box<Error>,
    },

    #[error("iteration step failed at {} frequency indices, first: {first}", failing.len())]
    StepFailed { failing: Vec<Index>, first: Box<Error> },

    #[error("iterate {step} diverged: norm {norm:.3e} exceeds limit {limit:.3e}")]
    Divergence { step: usize, norm: f64, limit: f64 },

    #[error("malformed {what}: {msg}")]
    Parse { what: &'static str, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(what: &'static str, msg: impl Into<String>) -> Self {
        Error::Parse { what, msg: msg.into() }
    }

    /// Whether the failure came from the linear solver (possibly wrapped).
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::NoConvergence { .. } | Error::StepFailed { .. } | Error::Divergence { .. } => true,
            Error::AtIndex { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}
