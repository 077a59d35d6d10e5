use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error(
        "adaptive quadrature did not reach tolerance: estimate {estimate:e}, \
         error bound {error_bound:e} after {intervals} intervals"
    )]
    Quadrature {
        estimate: f64,
        error_bound: f64,
        intervals: usize,
    },

    #[error("point lies outside the closed domain: {0}")]
    Domain(&'static str),

    #[error("kernel singularity: {0}")]
    Singularity(&'static str),

    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("principal-value tail cannot be bounded: {0}")]
    Truncation(String),

    #[error("degenerate iterate: {0}")]
    Degenerate(&'static str),

    #[error("fixed-point iteration did not converge in {iterations} iterations (last residual {last:e})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        residuals: Vec<f64>,
    },

    #[error("unknown suite `{name}`; valid suites: {valid}")]
    UnknownSuite { name: String, valid: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
