use thiserror::Error;

pub type Result<T> = std::result::Result<T, QopError>;

#[derive(Debug, Error)]
pub enum QopError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {got} exceeds the supported maximum of {max}")]
    TooLarge { got: usize, max: usize },

    #[error("non-finite entry at {0}")]
    NonFinite(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not selfadjoint (residual {residual:.3e}, allowed {allowed:.3e})")]
    NotSelfAdjoint { residual: f64, allowed: f64 },

    #[error("complex embedding structure violated (residual {0:.3e})")]
    Structure(f64),

    #[error("eigenvalue pairing failed: {0}")]
    Pairing(String),

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("function undefined or non-finite at eigenvalue {0}")]
    UndefinedFunction(f64),

    #[error("matrix has a materially negative eigenvalue {value:.3e} (threshold {threshold:.3e})")]
    NegativeEigenvalue { value: f64, threshold: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
