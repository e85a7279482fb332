//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// Evaluation outside the mathematical domain of an operation
    /// (declared singularities, nonpositive coefficients, invalid ranges).
    #[error("domain error: {0}")]
    Domain(String),

    /// A potential spec violated a structural invariant (negative values,
    /// K identically zero, region touching the axis, ...).
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// Growth classification could not certify the requested condition.
    #[error("unclassifiable asymptotics: {0}")]
    Unclassifiable(String),

    /// A minimization found no finite minimizer (e.g. M ≡ +∞ on the slice).
    #[error("no minimizer: {0}")]
    NoMinimizer(String),

    /// An iterative solver failed to converge; carries diagnostics.
    #[error("solver failed: {msg}")]
    Solver {
        msg: String,
        /// Residual history of the failed run, when available.
        history: Vec<f64>,
    },

    /// Grid construction or grid compatibility problem.
    #[error("grid error: {0}")]
    Grid(String),

    /// Least-squares fit had too little usable data.
    #[error("fit error: {0}")]
    Fit(String),

    /// Configuration file problem.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CoreError {
    pub fn solver(msg: impl Into<String>) -> Self {
        CoreError::Solver {
            msg: msg.into(),
            history: Vec::new(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
