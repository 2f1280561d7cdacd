//! Binary classifiers behind one train/predict contract.

pub mod adam;
pub mod ann;
pub mod boosting;
pub mod forest;
pub mod logistic;
pub mod loss;
pub mod naive_bayes;
pub mod spec;
pub mod svm;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::numerics::{derive_seed, Matrix, RandomSource};

pub use adam::{adam_step, AdamState};
pub use loss::{bce_loss, clamp_probability, sigmoid, PROBABILITY_EPS};
pub use spec::{
    AnnParams, BoostingParams, ForestParams, Hyperparameters, Kernel, LogisticParams, ModelKind,
    ModelSpec, NaiveBayesParams, SvmParams,
};
pub use tree::{Tree, TreeNode};

pub const MODEL_FORMAT_VERSION: u32 = 1;

const HOLDOUT_SEED_ROLE: u64 = 0x686f_6c64;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("label {0} is not 0 or 1")]
    InvalidLabel(u8),
    #[error("training data contains a single class")]
    SingleClass,
    #[error("model expects {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("validation split is empty")]
    EmptyValidation,
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("model serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FittedParams {
    LogisticRegression(logistic::LogisticModel),
    NaiveBayes(naive_bayes::NaiveBayesModel),
    GradientBoosting(boosting::BoostingModel),
    Svm(svm::SvmModel),
    RandomForest(forest::ForestModel),
    Ann(ann::AnnModel),
}

impl FittedParams {
    fn is_finite(&self) -> bool {
        match self {
            Self::LogisticRegression(m) => m.bias.is_finite() && m.weights.iter().all(|w| w.is_finite()),
            Self::NaiveBayes(m) => m
                .priors
                .iter()
                .chain(m.means.iter().flatten())
                .chain(m.variances.iter().flatten())
                .all(|v| v.is_finite()),
            Self::GradientBoosting(m) => m.is_finite(),
            Self::Svm(m) => m.is_finite(),
            Self::RandomForest(m) => m.is_finite(),
            Self::Ann(m) => m.is_finite(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub spec: ModelSpec,
    pub n_features: usize,
    pub params: FittedParams,
    /// Objective per iteration (logistic regression), training BCE per
    /// round (boosting) or validation BCE per epoch (ANN); empty otherwise.
    pub training_log: Vec<f64>,
}

fn check_training_data(x: &Matrix, y: &[u8]) -> Result<(), ModelError> {
    if x.rows() != y.len() {
        return Err(ModelError::LengthMismatch {
            expected: x.rows(),
            found: y.len(),
        });
    }
    if y.is_empty() || x.cols() == 0 {
        return Err(ModelError::EmptyInput);
    }
    if !x.is_finite() {
        return Err(ModelError::NonFinite("training features".into()));
    }
    if let Some(&bad) = y.iter().find(|&&l| l > 1) {
        return Err(ModelError::InvalidLabel(bad));
    }
    Ok(())
}

fn has_both_classes(y: &[u8]) -> bool {
    y.contains(&0) && y.contains(&1)
}

/// Trains the model described by `spec`. The ANN carves its validation
/// split out of `x` itself.
pub fn train(spec: &ModelSpec, x: &Matrix, y: &[u8]) -> Result<TrainedModel, ModelError> {
    spec.validate()?;
    check_training_data(x, y)?;
    let needs_both = !matches!(
        spec.params,
        Hyperparameters::LogisticRegression(_) | Hyperparameters::Ann(_)
    );
    if needs_both && !has_both_classes(y) {
        return Err(ModelError::SingleClass);
    }

    let (params, training_log) = match &spec.params {
        Hyperparameters::LogisticRegression(p) => {
            let (m, log) = logistic::train(x, y, p);
            (FittedParams::LogisticRegression(m), log)
        }
        Hyperparameters::NaiveBayes(p) => (FittedParams::NaiveBayes(naive_bayes::train(x, y, p)?), Vec::new()),
        Hyperparameters::GradientBoosting(p) => {
            let (m, log) = boosting::train(x, y, p);
            (FittedParams::GradientBoosting(m), log)
        }
        Hyperparameters::Svm(p) => (FittedParams::Svm(svm::train(x, y, p, spec.seed)), Vec::new()),
        Hyperparameters::RandomForest(p) => {
            (FittedParams::RandomForest(forest::train(x, y, p, spec.seed)), Vec::new())
        }
        Hyperparameters::Ann(p) => {
            let mut rng = RandomSource::new(derive_seed(spec.seed, HOLDOUT_SEED_ROLE, 0));
            let (tr, va) = ann::stratified_holdout(y, p.validation_fraction, &mut rng);
            let pick = |idx: &[usize]| (x.select_rows(idx), idx.iter().map(|&i| y[i]).collect::<Vec<u8>>());
            let (xt, yt) = pick(&tr);
            let (xv, yv) = pick(&va);
            if yt.is_empty() {
                return Err(ModelError::EmptyInput);
            }
            let (m, log) = ann::train(&xt, &yt, &xv, &yv, p, spec.seed)?;
            (FittedParams::Ann(m), log)
        }
    };
    if !params.is_finite() {
        return Err(ModelError::NonFinite(format!("fitted {} parameters", spec.kind())));
    }
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        spec: spec.clone(),
        n_features: x.cols(),
        params,
        training_log,
    })
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        self.spec.kind()
    }

    /// Probability of class 1 for each row, clamped into `[0, 1]`.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>, ModelError> {
        if x.cols() != self.n_features {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_features,
                found: x.cols(),
            });
        }
        let raw = match &self.params {
            FittedParams::LogisticRegression(m) => m.predict_proba(x),
            FittedParams::NaiveBayes(m) => m.predict_proba(x),
            FittedParams::GradientBoosting(m) => m.predict_proba(x),
            FittedParams::Svm(m) => m.predict_proba(x),
            FittedParams::RandomForest(m) => m.predict_proba(x),
            FittedParams::Ann(m) => m.predict_proba(x),
        };
        Ok(raw
            .into_iter()
            .map(|p| if p.is_nan() { 0.5 } else { p.clamp(0.0, 1.0) })
            .collect())
    }

    /// Labels `proba >= threshold`; a probability exactly at the threshold
    /// is class 1.
    pub fn predict(&self, x: &Matrix, threshold: f64) -> Result<Vec<u8>, ModelError> {
        Ok(self
            .predict_proba(x)?
            .into_iter()
            .map(|p| u8::from(p >= threshold))
            .collect())
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let model: Self = serde_json::from_str(text)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(ModelError::UnsupportedVersion(model.format_version));
        }
        model.spec.validate()?;
        if model.params_kind() != model.spec.kind() {
            return Err(ModelError::InvalidHyperparameter(format!(
                "fitted parameters are for {}, spec says {}",
                model.params_kind(),
                model.spec.kind()
            )));
        }
        Ok(model)
    }

    fn params_kind(&self) -> ModelKind {
        match self.params {
            FittedParams::LogisticRegression(_) => ModelKind::LogisticRegression,
            FittedParams::NaiveBayes(_) => ModelKind::NaiveBayes,
            FittedParams::GradientBoosting(_) => ModelKind::GradientBoosting,
            FittedParams::Svm(_) => ModelKind::Svm,
            FittedParams::RandomForest(_) => ModelKind::RandomForest,
            FittedParams::Ann(_) => ModelKind::Ann,
        }
    }
}

pub fn predict_proba(model: &TrainedModel, x: &Matrix) -> Result<Vec<f64>, ModelError> {
    model.predict_proba(x)
}

pub fn predict(model: &TrainedModel, x: &Matrix, threshold: f64) -> Result<Vec<u8>, ModelError> {
    model.predict(x, threshold)
}
