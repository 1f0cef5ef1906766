use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("fields live on different bases")]
    BasisMismatch,

    #[error("length mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Gevrey weight out of range at mode {mode}: exponent {exponent:.3} exceeds {limit}")]
    GevreyRange {
        mode: usize,
        exponent: f64,
        limit: f64,
    },

    #[error("lattice enumeration needs {needed} points, budget is {budget}")]
    EnumerationBudget { needed: usize, budget: usize },

    #[error("cut-off schedule infeasible: {0}")]
    InfeasibleSchedule(String),

    #[error("non-finite state at mode {mode}, t = {t}")]
    NonFiniteState { mode: usize, t: f64 },

    #[error("fixed-point iteration did not converge in {iterations} iterations (last residual {last:e})", last = residuals.last().copied().unwrap_or(f64::NAN))]
    NonConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("weight overflow: {0}")]
    WeightOverflow(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
