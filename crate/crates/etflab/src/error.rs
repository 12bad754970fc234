//! Error type shared by all modules.

/// Errors reported by configuration builders, energy evaluators, the
/// optimizer and the quadrature routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A parameter violated a precondition (counts, signs, ranges).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A simplex frame of `n` points needs ambient dimension >= n-1.
    #[error("infeasible dimension: {n} points need ambient dimension >= {min}, got {m}", min = n - 1)]
    InfeasibleDimension { n: usize, m: usize },

    /// Mismatched point counts or ambient dimensions between arguments.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is undefined in this ambient dimension.
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    /// A numerical procedure failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of numerical procedures (as opposed to bad inputs).
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_))
    }
}
