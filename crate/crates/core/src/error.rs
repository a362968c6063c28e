//! Crate-wide error type.

use thiserror::Error;

/// Errors shared by all modules of the toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    NonHermitian { deviation: f64, tolerance: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps (off-norm {off_norm:.3e})")]
    NonConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("invalid quantum state: {context}")]
    InvalidState { context: String },

    #[error("invalid probability distribution: {context}")]
    InvalidDistribution { context: String },

    #[error("unsupported dimension {dim} for channel family {family}")]
    UnsupportedDimension { family: String, dim: usize },

    #[error("degenerate state factor: trace {trace:.3e} below threshold")]
    DegenerateFactor { trace: f64 },

    #[error("channel is not trace preserving: max deviation {deviation:.3e}")]
    NotTracePreserving { deviation: f64 },

    #[error("profile field missing: {field}")]
    MissingProfileField { field: String },

    #[error("infeasible profile: lower bound {lower:.6} ({lower_tag}) exceeds upper bound {upper:.6} ({upper_tag}) at {coord}")]
    InfeasibleProfile {
        coord: String,
        lower: f64,
        upper: f64,
        lower_tag: String,
        upper_tag: String,
    },

    #[error("undefined resource arithmetic: {context}")]
    UndefinedResourceArithmetic { context: String },

    #[error("malformed input: {context}")]
    MalformedInput { context: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn dimension_mismatch(context: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
        }
    }

    pub fn invalid_state(context: impl Into<String>) -> Self {
        Error::InvalidState {
            context: context.into(),
        }
    }

    pub fn malformed(context: impl Into<String>) -> Self {
        Error::MalformedInput {
            context: context.into(),
        }
    }
}
