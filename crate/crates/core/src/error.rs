use thiserror::Error;

/// Errors raised by the numerical kernels, the optimizers and the data layer.
#[derive(Debug, Error)]
pub enum DiiError {
    #[error("degenerate metric: all weights are zero")]
    DegenerateMetric,

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("softmax scale must be positive and finite, got {0}")]
    InvalidLambda(f64),

    #[error("degenerate neighborhoods: every first/second neighbor gap is zero")]
    DegenerateNeighborhoods,

    #[error("over-regularized: all weights were driven to zero at epoch {epoch}")]
    OverRegularized { epoch: usize },

    #[error("too many features for exhaustive search: {n_features} > bound {bound}")]
    TooManyFeatures { n_features: usize, bound: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("csv error: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl DiiError {
    /// True for failures of the numerics (as opposed to bad input or usage).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            DiiError::DegenerateMetric
                | DiiError::DegenerateNeighborhoods
                | DiiError::OverRegularized { .. }
        )
    }
}

impl From<csv::Error> for DiiError {
    fn from(e: csv::Error) -> Self {
        DiiError::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, DiiError>;
