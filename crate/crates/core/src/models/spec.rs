//! Model specifications and the frozen hyperparameter defaults.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    LogisticRegression,
    NaiveBayes,
    GradientBoosting,
    Svm,
    RandomForest,
    Ann,
}

impl ModelKind {
    /// Table order used by every report.
    pub const ALL: [ModelKind; 6] = [
        ModelKind::LogisticRegression,
        ModelKind::NaiveBayes,
        ModelKind::GradientBoosting,
        ModelKind::Svm,
        ModelKind::RandomForest,
        ModelKind::Ann,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::LogisticRegression => "logistic_regression",
            Self::NaiveBayes => "naive_bayes",
            Self::GradientBoosting => "gradient_boosting",
            Self::Svm => "svm",
            Self::RandomForest => "random_forest",
            Self::Ann => "ann",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Self::LogisticRegression => "Logistic Regression",
            Self::NaiveBayes => "Naive Bayes",
            Self::GradientBoosting => "Gradient Boosting",
            Self::Svm => "Support Vector Machine",
            Self::RandomForest => "Random Forest",
            Self::Ann => "ANN",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == norm)
            .ok_or_else(|| ModelError::InvalidHyperparameter(format!("unknown model kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticParams {
    /// L2 penalty λ in `mean BCE + λ‖w‖²`.
    pub l2: f64,
    pub max_iters: usize,
    /// Stop once the gradient max-norm falls to this value.
    pub tolerance: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            max_iters: 5_000,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NaiveBayesParams {
    pub variance_floor: f64,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        Self {
            variance_floor: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features considered per split; `None` means `floor(sqrt(p))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 16,
            min_samples_split: 2,
            max_features: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostingParams {
    pub n_rounds: usize,
    pub shrinkage: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

impl Default for BoostingParams {
    fn default() -> Self {
        Self {
            n_rounds: 100,
            shrinkage: 0.1,
            max_depth: 3,
            min_samples_leaf: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Kernel {
    Linear,
    /// `exp(-γ‖a-b‖²)`; `gamma: None` resolves to `1/p` at training time.
    Rbf { gamma: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub c: f64,
    pub kernel: Kernel,
    /// KKT tolerance.
    pub tolerance: f64,
    /// Consecutive full passes without an update before stopping.
    pub max_passes: usize,
    /// Hard cap on passes over the data.
    pub max_total_passes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            kernel: Kernel::Rbf { gamma: None },
            tolerance: 1e-3,
            max_passes: 10,
            max_total_passes: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnParams {
    pub hidden_units: usize,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub learning_rate: f64,
    /// Learning rate is divided by this on every plateau.
    pub decay_factor: f64,
    pub plateau_patience: usize,
    pub early_stop_patience: usize,
    /// Validation loss must drop by more than this to count as improvement.
    pub min_delta: f64,
    /// Fraction of the training rows held out (stratified) for validation.
    pub validation_fraction: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AnnParams {
    fn default() -> Self {
        Self {
            hidden_units: 16,
            batch_size: 16,
            max_epochs: 200,
            learning_rate: 1e-4,
            decay_factor: 10.0,
            plateau_patience: 10,
            early_stop_patience: 25,
            min_delta: 1e-4,
            validation_fraction: 0.1,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Hyperparameters tagged by model kind. Serialized flat, e.g.
/// `{"kind": "svm", "c": 1.0, "kernel": {"type": "linear"}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hyperparameters {
    LogisticRegression(LogisticParams),
    NaiveBayes(NaiveBayesParams),
    GradientBoosting(BoostingParams),
    Svm(SvmParams),
    RandomForest(ForestParams),
    Ann(AnnParams),
}

impl Hyperparameters {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::LogisticRegression => Self::LogisticRegression(Default::default()),
            ModelKind::NaiveBayes => Self::NaiveBayes(Default::default()),
            ModelKind::GradientBoosting => Self::GradientBoosting(Default::default()),
            ModelKind::Svm => Self::Svm(Default::default()),
            ModelKind::RandomForest => Self::RandomForest(Default::default()),
            ModelKind::Ann => Self::Ann(Default::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Self::LogisticRegression(_) => ModelKind::LogisticRegression,
            Self::NaiveBayes(_) => ModelKind::NaiveBayes,
            Self::GradientBoosting(_) => ModelKind::GradientBoosting,
            Self::Svm(_) => ModelKind::Svm,
            Self::RandomForest(_) => ModelKind::RandomForest,
            Self::Ann(_) => ModelKind::Ann,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub params: Hyperparameters,
    pub seed: u64,
}

// `#[serde(flatten)]` disables `deny_unknown_fields` on the inner params, so
// the seed is split off by hand and the remainder parsed strictly.
impl<'de> Deserialize<'de> for ModelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let mut map = serde_json::Map::deserialize(deserializer)?;
        let seed = match map.remove("seed") {
            None => 0,
            Some(v) => v
                .as_u64()
                .ok_or_else(|| D::Error::custom("seed must be a non-negative integer"))?,
        };
        let params = Hyperparameters::deserialize(serde_json::Value::Object(map))
            .map_err(D::Error::custom)?;
        Ok(Self { params, seed })
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), ModelError> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::InvalidHyperparameter(msg()))
    }
}

fn unit_rate(name: &str, v: f64) -> Result<(), ModelError> {
    check(v > 0.0 && v <= 1.0, || format!("{name} = {v} must lie in (0, 1]"))
}

impl ModelSpec {
    pub fn new(params: Hyperparameters, seed: u64) -> Result<Self, ModelError> {
        let spec = Self { params, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn default_for(kind: ModelKind, seed: u64) -> Self {
        Self {
            params: Hyperparameters::default_for(kind),
            seed,
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.params.kind()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            params: self.params.clone(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match &self.params {
            Hyperparameters::LogisticRegression(p) => {
                check(p.l2 >= 0.0 && p.l2.is_finite(), || format!("l2 = {} must be >= 0", p.l2))?;
                check(p.max_iters > 0, || "max_iters must be positive".into())?;
                check(p.tolerance > 0.0, || "tolerance must be positive".into())
            }
            Hyperparameters::NaiveBayes(p) => check(p.variance_floor > 0.0, || {
                "variance_floor must be positive".into()
            }),
            Hyperparameters::GradientBoosting(p) => {
                unit_rate("shrinkage", p.shrinkage)?;
                check(p.max_depth > 0, || "max_depth must be positive".into())?;
                check(p.min_samples_leaf > 0, || "min_samples_leaf must be positive".into())
            }
            Hyperparameters::Svm(p) => {
                check(p.c > 0.0 && p.c.is_finite(), || format!("C = {} must be positive", p.c))?;
                check(p.tolerance > 0.0, || "tolerance must be positive".into())?;
                check(p.max_passes > 0 && p.max_total_passes > 0, || {
                    "pass limits must be positive".into()
                })?;
                if let Kernel::Rbf { gamma: Some(g) } = p.kernel {
                    check(g > 0.0 && g.is_finite(), || format!("gamma = {g} must be positive"))?;
                }
                Ok(())
            }
            Hyperparameters::RandomForest(p) => {
                check(p.n_trees > 0, || "n_trees must be positive".into())?;
                check(p.max_depth > 0, || "max_depth must be positive".into())?;
                check(p.min_samples_split >= 2, || "min_samples_split must be >= 2".into())?;
                check(p.max_features != Some(0), || "max_features must be positive".into())
            }
            Hyperparameters::Ann(p) => {
                check(p.hidden_units > 0, || "hidden_units must be positive".into())?;
                check(p.batch_size > 0, || "batch_size must be positive".into())?;
                check(p.max_epochs > 0, || "max_epochs must be positive".into())?;
                unit_rate("learning_rate", p.learning_rate)?;
                check(p.decay_factor > 1.0, || "decay_factor must exceed 1".into())?;
                check(p.validation_fraction > 0.0 && p.validation_fraction < 1.0, || {
                    "validation_fraction must lie in (0, 1)".into()
                })?;
                check((0.0..1.0).contains(&p.beta1) && (0.0..1.0).contains(&p.beta2), || {
                    "Adam betas must lie in [0, 1)".into()
                })?;
                check(p.epsilon > 0.0, || "epsilon must be positive".into())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_is_flat_and_partial() {
        let spec: ModelSpec =
            serde_json::from_str(r#"{"kind": "svm", "kernel": {"type": "linear"}, "seed": 3}"#)
                .unwrap();
        assert_eq!(spec.kind(), ModelKind::Svm);
        assert_eq!(spec.seed, 3);
        match &spec.params {
            Hyperparameters::Svm(p) => {
                assert_eq!(p.kernel, Kernel::Linear);
                assert_eq!(p.c, 1.0);
            }
            other => panic!("{other:?}"),
        }
        let json = serde_json::to_value(ModelSpec::default_for(ModelKind::Ann, 1)).unwrap();
        assert_eq!(json["kind"], "ann");
        assert_eq!(json["learning_rate"], 1e-4);
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(serde_json::from_str::<ModelSpec>(r#"{"kind": "ann", "lr": 0.1}"#).is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut p = BoostingParams::default();
        p.shrinkage = 0.0;
        assert!(ModelSpec::new(Hyperparameters::GradientBoosting(p), 0).is_err());
        let mut f = ForestParams::default();
        f.n_trees = 0;
        assert!(ModelSpec::new(Hyperparameters::RandomForest(f), 0).is_err());
        for kind in ModelKind::ALL {
            assert!(ModelSpec::default_for(kind, 0).validate().is_ok());
        }
    }

    #[test]
    fn kind_parses_from_text() {
        assert_eq!("gradient-boosting".parse::<ModelKind>().unwrap(), ModelKind::GradientBoosting);
        assert_eq!("SVM".parse::<ModelKind>().unwrap(), ModelKind::Svm);
        assert!("knn".parse::<ModelKind>().is_err());
    }
}
