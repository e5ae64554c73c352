//! Error type shared across the toolkit.

/// Errors produced by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// One or more admissibility conditions failed; each entry names one
    /// violated condition.
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// A parameter lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature could not reach the requested tolerance. The
    /// best estimate and its error bound are reported.
    #[error("quadrature for {quantity} did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Quadrature {
        quantity: String,
        estimate: f64,
        error_bound: f64,
    },

    /// Rejection sampling exhausted its attempt budget.
    #[error("sampling failed: {0}")]
    Sampling(String),

    /// A requested allocation exceeds the configured memory budget.
    #[error("memory budget exceeded: {0}")]
    Budget(String),

    /// Malformed input data (tables, ensemble files).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Renames the quantity of a quadrature error; other variants pass
    /// through unchanged.
    pub(crate) fn named(self, quantity: &str) -> Error {
        match self {
            Error::Quadrature {
                estimate,
                error_bound,
                ..
            } => Error::Quadrature {
                quantity: quantity.to_string(),
                estimate,
                error_bound,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
