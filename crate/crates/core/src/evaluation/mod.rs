//! Stratified cross-validation, classification metrics and the benchmark
//! grid runner.

mod benchmark;
mod cv;
mod folds;
mod metrics;

use thiserror::Error;

pub use benchmark::{
    aggregate_folds, run_benchmark, BenchmarkConfig, BenchmarkTable, Cell, CellOutcome, DatasetColumn,
    DatasetEntry, FoldDetail, Metric, PipelineOverrides,
};
pub use cv::{assign_folds, cross_validate, fit_fold, fold_model_seed, CvResult, FoldFit, FoldRecord};
pub use folds::{stratified_kfold, FoldAssignment};
pub use metrics::{classification_metrics, Confusion, MetricsReport};

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("k = {0}; need at least 2 folds")]
    InvalidK(usize),
    #[error("{dataset}: class {class} has {count} instances, fewer than k = {k}")]
    ClassTooSmall {
        dataset: String,
        class: u8,
        count: usize,
        k: usize,
    },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("invalid benchmark config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Ingest(#[from] crate::ingest::IngestError),
    #[error(transparent)]
    Preprocess(#[from] crate::preprocess::PreprocessError),
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
    #[error("config document: {0}")]
    Serde(#[from] serde_json::Error),
}

impl EvaluationError {
    fn for_dataset(self, name: &str) -> Self {
        match self {
            Self::ClassTooSmall { class, count, k, .. } => Self::ClassTooSmall {
                dataset: name.to_string(),
                class,
                count,
                k,
            },
            other => other,
        }
    }
}
