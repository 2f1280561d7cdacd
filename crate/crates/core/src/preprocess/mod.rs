//! Feature preprocessing: standardization, Pearson-correlation filtering and
//! PCA, composed into a pipeline that is fitted on training rows only.

mod correlation;
mod pca;
mod pipeline;

use thiserror::Error;

pub use correlation::{correlation_filter, pearson_correlation, Correlation};
pub use pca::{fit_pca, PcaBasis};
pub use pipeline::{
    apply_pipeline, fit_pipeline, FittedPipeline, PipelineConfig, DEFAULT_CORRELATION_THRESHOLD,
    DEFAULT_PCA_VARIANCE_TARGET, PCA_DATASETS,
};

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("need at least 2 rows, found {0}")]
    TooFewRows(usize),
    #[error("every feature was dropped by the correlation filter")]
    AllFeaturesDropped,
    #[error("input has {found} columns, pipeline expects {expected}")]
    ColumnMismatch { expected: usize, found: usize },
    #[error("input contains missing or non-finite values")]
    NonFinite,
    #[error("total variance is zero; PCA is undefined")]
    ZeroVariance,
    #[error("invalid pipeline config: {0}")]
    InvalidConfig(String),
    #[error("pipeline document: {0}")]
    Serde(String),
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
}
