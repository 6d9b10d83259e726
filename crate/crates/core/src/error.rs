use thiserror::Error;

/// Errors produced by the rate model, the solvers and the Fock-space oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid value for `{param}`: {value} ({reason})")]
    Domain {
        param: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("non-physical covariance matrix: {0}")]
    NonPhysicalCovariance(String),

    #[error("Fock cutoff {cutoff} too small: truncated mass {norm_defect:e} exceeds budget {budget:e}")]
    CutoffTooSmall {
        cutoff: usize,
        norm_defect: f64,
        budget: f64,
    },

    #[error("oracle state is not of standard two-mode form (deviation {0:e})")]
    NotStandardForm(f64),

    #[error("key rate {rate:e} at zero distance does not exceed target {target:e}")]
    NoKeyAtZeroDistance { rate: f64, target: f64 },

    #[error("no positive key rate even at zero excess noise (K = {rate:e})")]
    NoKeyAtZeroNoise { rate: f64 },

    #[error("solver failed: {0}")]
    SolverFailure(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("grid of {points} points exceeds the cap of {cap}")]
    GridTooLarge { points: usize, cap: usize },
}

impl Error {
    pub(crate) fn domain(param: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            param,
            value,
            reason,
        }
    }

    /// True for errors raised by the root finders and maximizers.
    pub fn is_solver_error(&self) -> bool {
        matches!(
            self,
            Error::NoKeyAtZeroDistance { .. }
                | Error::NoKeyAtZeroNoise { .. }
                | Error::SolverFailure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
