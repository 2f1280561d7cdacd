use serde::{Deserialize, Serialize};

use crate::numerics::Matrix;

use super::correlation::{correlation_filter, is_constant};
use super::pca::{fit_pca, PcaBasis};
use super::PreprocessError;

/// Datasets for which PCA is switched on by default.
pub const PCA_DATASETS: [&str; 2] = ["JM1", "KC1_CL"];

pub const DEFAULT_CORRELATION_THRESHOLD: f64 = 0.90;
pub const DEFAULT_PCA_VARIANCE_TARGET: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub standardize: bool,
    /// `|r|` at or above which the later feature of a pair is dropped.
    pub correlation_threshold: f64,
    pub use_pca: bool,
    pub pca_variance_target: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            standardize: true,
            correlation_threshold: DEFAULT_CORRELATION_THRESHOLD,
            use_pca: false,
            pca_variance_target: DEFAULT_PCA_VARIANCE_TARGET,
        }
    }
}

impl PipelineConfig {
    /// Defaults with PCA enabled only for the datasets in [`PCA_DATASETS`].
    pub fn for_dataset(name: &str) -> Self {
        let name = crate::ingest::normalize_name(name);
        Self {
            use_pca: PCA_DATASETS.contains(&name.as_str()),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), PreprocessError> {
        if !(self.correlation_threshold > 0.0 && self.correlation_threshold <= 1.0) {
            return Err(PreprocessError::InvalidConfig(format!(
                "correlation_threshold {} outside (0, 1]",
                self.correlation_threshold
            )));
        }
        if !(self.pca_variance_target > 0.0 && self.pca_variance_target <= 1.0) {
            return Err(PreprocessError::InvalidConfig(format!(
                "pca_variance_target {} outside (0, 1]",
                self.pca_variance_target
            )));
        }
        Ok(())
    }
}

/// Preprocessing state frozen from a training fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPipeline {
    pub means: Vec<f64>,
    /// Raw sample standard deviations; zero entries are flagged in
    /// `constant` and divided by 1 instead.
    pub stds: Vec<f64>,
    pub constant: Vec<bool>,
    pub keep_mask: Vec<bool>,
    pub pca: Option<PcaBasis>,
    pub config: PipelineConfig,
}

const PIPELINE_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct PipelineDocument {
    format_version: u32,
    pipeline: FittedPipeline,
}

impl FittedPipeline {
    /// Standardize, then correlation-filter, then (optionally) PCA. Every
    /// statistic comes from `train` alone.
    pub fn fit(train: &Matrix, config: &PipelineConfig) -> Result<Self, PreprocessError> {
        config.validate()?;
        if train.rows() < 2 {
            return Err(PreprocessError::TooFewRows(train.rows()));
        }
        if !train.is_finite() {
            return Err(PreprocessError::NonFinite);
        }
        let means = train.column_means();
        let stds = train.column_stds(&means);
        let constant: Vec<bool> = (0..train.cols())
            .map(|j| {
                let scale = train.row_iter().map(|r| r[j].abs()).fold(0.0, f64::max);
                is_constant(stds[j], scale)
            })
            .collect();
        for (j, c) in constant.iter().enumerate() {
            if *c {
                log::warn!("feature {j} is constant in the training data; dropping it");
            }
        }

        let mut fitted = Self {
            means,
            stds,
            constant,
            keep_mask: vec![true; train.cols()],
            pca: None,
            config: config.clone(),
        };
        let scaled = fitted.standardize(train);
        let mut keep = correlation_filter(&scaled, config.correlation_threshold)?;
        for (k, c) in keep.iter_mut().zip(&fitted.constant) {
            *k &= !c;
        }
        if !keep.iter().any(|&k| k) {
            return Err(PreprocessError::AllFeaturesDropped);
        }
        fitted.keep_mask = keep;
        if config.use_pca {
            let kept = scaled.select_columns(&fitted.kept_indices());
            fitted.pca = Some(fit_pca(&kept, config.pca_variance_target)?);
        }
        Ok(fitted)
    }

    pub fn input_dim(&self) -> usize {
        self.keep_mask.len()
    }

    pub fn kept_indices(&self) -> Vec<usize> {
        self.keep_mask
            .iter()
            .enumerate()
            .filter_map(|(i, &k)| k.then_some(i))
            .collect()
    }

    pub fn output_dim(&self) -> usize {
        match &self.pca {
            Some(p) => p.n_components,
            None => self.keep_mask.iter().filter(|&&k| k).count(),
        }
    }

    fn standardize(&self, x: &Matrix) -> Matrix {
        if !self.config.standardize {
            return x.clone();
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                let s = if self.constant[j] { 1.0 } else { self.stds[j] };
                *v = (*v - self.means[j]) / s;
            }
        }
        out
    }

    /// Replays the fitted transform on new rows with the original columns.
    pub fn transform(&self, x: &Matrix) -> Result<Matrix, PreprocessError> {
        if x.cols() != self.input_dim() {
            return Err(PreprocessError::ColumnMismatch {
                expected: self.input_dim(),
                found: x.cols(),
            });
        }
        let kept = self.standardize(x).select_columns(&self.kept_indices());
        match &self.pca {
            Some(pca) => pca.project(&kept),
            None => Ok(kept),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PipelineDocument {
            format_version: PIPELINE_FORMAT_VERSION,
            pipeline: self.clone(),
        })
        .expect("pipeline state is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, PreprocessError> {
        let doc: PipelineDocument =
            serde_json::from_str(text).map_err(|e| PreprocessError::Serde(e.to_string()))?;
        if doc.format_version != PIPELINE_FORMAT_VERSION {
            return Err(PreprocessError::Serde(format!(
                "unsupported pipeline format version {}",
                doc.format_version
            )));
        }
        Ok(doc.pipeline)
    }
}

/// Convenience wrapper over [`FittedPipeline::fit`].
pub fn fit_pipeline(train: &Matrix, config: &PipelineConfig) -> Result<FittedPipeline, PreprocessError> {
    FittedPipeline::fit(train, config)
}

/// Convenience wrapper over [`FittedPipeline::transform`].
pub fn apply_pipeline(pipeline: &FittedPipeline, x: &Matrix) -> Result<Matrix, PreprocessError> {
    pipeline.transform(x)
}
