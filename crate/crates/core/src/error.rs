use thiserror::Error;

/// Errors raised by model construction and the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested problem exceeds a hard size cap.
    #[error("capacity exceeded: {what} needs {requested}, cap is {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    /// An iterative solver stopped before reaching its tolerance.
    #[error("no convergence after {iterations} iterations (best residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },
    /// The decay rate is too large for the underdamped closed form.
    #[error("out of regime: gamma = {gamma} must be below g = {g}")]
    OutOfRegime { gamma: f64, g: f64 },
}

impl SpinError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        SpinError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, SpinError>;
