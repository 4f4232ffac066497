use thiserror::Error;

use crate::decomposition::DecompositionError;

pub type Result<T, E = LfsmError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LfsmError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: estimate {estimate}, error estimate {error_estimate:e}")]
    Quadrature { estimate: f64, error_estimate: f64 },

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Decomposition(#[from] DecompositionError),

    #[error("ill-conditioned decomposition: diagonal coefficient a[{index}][{index}] = {value:e}")]
    IllConditioned { index: usize, value: f64 },

    #[error("no usable forecasts ({ties} ties out of {total})")]
    NoUsableForecasts { total: usize, ties: usize },
}

impl LfsmError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LfsmError::InvalidParameter(msg.into())
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            LfsmError::Decomposition(e) => !matches!(
                e,
                DecompositionError::Invalid(_)
                    | DecompositionError::UnknownSolver(_)
                    | DecompositionError::Unsupported { .. }
            ),
            LfsmError::Quadrature { .. }
            | LfsmError::Estimation(_)
            | LfsmError::IllConditioned { .. }
            | LfsmError::NoUsableForecasts { .. } => true,
            LfsmError::InvalidParameter(_) | LfsmError::Unsupported(_) => false,
        }
    }
}
