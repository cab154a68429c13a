use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operation undefined for the zero vector")]
    ZeroVector,

    #[error("dictionary is empty")]
    EmptyDictionary,

    #[error("atom {index} has norm {norm}, expected 1")]
    NotNormalized { index: usize, norm: f64 },

    #[error("vector is not in the span of the dictionary (relative residual {residual:.3e})")]
    NotInSpan { residual: f64 },

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error("solver did not converge after {iterations} iterations (gradient norm {grad_norm:.3e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("combinatorial budget exceeded: {what} needs {needed} > {budget}; {advice}")]
    BudgetExceeded {
        what: &'static str,
        needed: f64,
        budget: f64,
        advice: &'static str,
    },

    #[error("basis is not orthonormal under the measure (Gram defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("certificate rejected: {0}")]
    Certificate(String),

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("property violated: {0}")]
    PropertyViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
