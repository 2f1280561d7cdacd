//! Software defect prediction benchmark toolkit.
//!
//! Loads static-code-metric datasets (NASA Promise ARFF/CSV files), fits a
//! leakage-free preprocessing pipeline (standardization, correlation
//! filtering, PCA), trains six classifier families and scores them with
//! stratified k-fold cross-validation.
//!
//! ```no_run
//! use defectbench::evaluation::cross_validate;
//! use defectbench::ingest::{impute_missing, load_dataset, ImputeStrategy};
//! use defectbench::models::{ModelKind, ModelSpec};
//! use defectbench::preprocess::PipelineConfig;
//!
//! let raw = load_dataset("data/CM1.arff".as_ref(), None).unwrap();
//! let data = impute_missing(&raw, ImputeStrategy::Median).unwrap();
//! let spec = ModelSpec::default_for(ModelKind::GradientBoosting, 42);
//! let cv = cross_validate(&spec, &data, &PipelineConfig::for_dataset(&data.name), 10, 42).unwrap();
//! println!("{:.1}%", 100.0 * cv.report.mean_accuracy);
//! ```

pub mod evaluation;
pub mod ingest;
pub mod models;
pub mod numerics;
pub mod preprocess;
pub mod reference;

use thiserror::Error;

/// Top-level error for operations that cross module boundaries.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
    #[error(transparent)]
    Preprocess(#[from] preprocess::PreprocessError),
    #[error(transparent)]
    Model(#[from] models::ModelError),
    #[error(transparent)]
    Evaluation(#[from] evaluation::EvaluationError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
