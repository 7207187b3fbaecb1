use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A geometric argument lies outside the regime where the angular
    /// sector argument applies.
    #[error("regime error: {0}")]
    Regime(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Grid spacing too coarse for the scale of the kernel.
    #[error("resolution error: h = {h} exceeds the limit {limit} for radius {radius}")]
    Resolution { h: f64, limit: f64, radius: f64 },

    /// A node or memory budget was exceeded.
    #[error("resource error: {what} requires {required} nodes, budget is {available}")]
    Resource {
        what: String,
        required: usize,
        available: usize,
        /// Partial value accumulated before giving up, when one exists.
        partial: Option<f64>,
    },

    /// An iterative method did not converge within its cap.
    #[error("convergence error after {iterations} iterations (last estimate {last})")]
    Convergence { iterations: usize, last: f64 },

    /// Vector length mismatches and similar caller mistakes.
    #[error("contract error: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
