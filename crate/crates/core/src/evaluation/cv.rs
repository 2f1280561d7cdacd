use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ingest::Dataset;
use crate::models::{train, ModelSpec, TrainedModel};
use crate::numerics::{derive_seed, Matrix, RandomSource};
use crate::preprocess::{FittedPipeline, PipelineConfig};

use super::folds::{stratified_kfold, FoldAssignment};
use super::metrics::{Confusion, MetricsReport};
use super::EvaluationError;

const FOLD_SEED_ROLE: u64 = 0x666f_6c64;
const MODEL_SEED_ROLE: u64 = 0x6d6f_646c;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub fold: usize,
    /// Seed the fold's model was trained with.
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: Confusion,
    pub accuracy: f64,
    pub train_time_ms: u64,
    /// SHA-256 over the fitted pipeline and model documents.
    pub fitted_checksum: String,
}

#[derive(Debug, Clone)]
pub struct CvResult {
    pub report: MetricsReport,
    pub folds: Vec<FoldRecord>,
    pub assignment: FoldAssignment,
}

/// Pipeline and model fitted on one fold's training rows.
#[derive(Debug, Clone)]
pub struct FoldFit {
    pub pipeline: FittedPipeline,
    pub model: TrainedModel,
    pub checksum: String,
}

/// Folds for `d` under the cross-validation seed `seed`.
pub fn assign_folds(d: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment, EvaluationError> {
    let mut rng = RandomSource::new(derive_seed(seed, FOLD_SEED_ROLE, 0));
    stratified_kfold(&d.labels, k, &mut rng).map_err(|e| e.for_dataset(&d.name))
}

pub fn fold_model_seed(spec: &ModelSpec, fold: usize) -> u64 {
    derive_seed(spec.seed, MODEL_SEED_ROLE, fold as u64)
}

/// Fits the pipeline and model using only the training rows of `fold`.
pub fn fit_fold(
    spec: &ModelSpec,
    d: &Dataset,
    config: &PipelineConfig,
    assignment: &FoldAssignment,
    fold: usize,
) -> Result<FoldFit, EvaluationError> {
    let train_idx = assignment.train_indices(fold);
    let x = d.features.select_rows(&train_idx);
    let y: Vec<u8> = train_idx.iter().map(|&i| d.labels[i]).collect();
    let pipeline = FittedPipeline::fit(&x, config)?;
    let xt = pipeline.transform(&x)?;
    let model = train(&spec.with_seed(fold_model_seed(spec, fold)), &xt, &y)?;
    let mut hasher = Sha256::new();
    hasher.update(pipeline.to_json().as_bytes());
    hasher.update(model.to_json()?.as_bytes());
    let checksum = hex::encode(hasher.finalize());
    Ok(FoldFit {
        pipeline,
        model,
        checksum,
    })
}

fn evaluate_fold(
    spec: &ModelSpec,
    d: &Dataset,
    config: &PipelineConfig,
    assignment: &FoldAssignment,
    fold: usize,
) -> Result<FoldRecord, EvaluationError> {
    let start = Instant::now();
    let fit = fit_fold(spec, d, config, assignment, fold)?;
    let train_time_ms = start.elapsed().as_millis() as u64;
    let test_idx = assignment.test_indices(fold);
    let x_test: Matrix = fit.pipeline.transform(&d.features.select_rows(&test_idx))?;
    let y_test: Vec<u8> = test_idx.iter().map(|&i| d.labels[i]).collect();
    let predicted = fit.model.predict(&x_test, 0.5)?;
    let confusion = Confusion::from_labels(&y_test, &predicted)?;
    Ok(FoldRecord {
        fold,
        seed: fold_model_seed(spec, fold),
        n_train: d.n_instances() - test_idx.len(),
        n_test: test_idx.len(),
        confusion,
        accuracy: confusion.accuracy(),
        train_time_ms,
        fitted_checksum: fit.checksum,
    })
}

/// Stratified k-fold cross-validation. Preprocessing is refitted inside
/// every fold, and folds run in parallel; results are ordered by fold.
pub fn cross_validate(
    spec: &ModelSpec,
    d: &Dataset,
    config: &PipelineConfig,
    k: usize,
    seed: u64,
) -> Result<CvResult, EvaluationError> {
    d.validate_for_training()?;
    config.validate()?;
    spec.validate()?;
    let assignment = assign_folds(d, k, seed)?;
    let folds = (0..k)
        .into_par_iter()
        .map(|f| evaluate_fold(spec, d, config, &assignment, f))
        .collect::<Result<Vec<_>, _>>()?;
    let confusions: Vec<Confusion> = folds.iter().map(|r| r.confusion).collect();
    Ok(CvResult {
        report: MetricsReport::from_folds(&confusions)?,
        folds,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelKind, ModelSpec};

    fn separable(n: usize, seed: u64) -> Dataset {
        let mut rng = RandomSource::new(seed);
        let mut data = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let side = if i % 2 == 0 { 1.0 } else { -1.0 };
            data.extend([side * rng.uniform(1.0, 4.0), rng.normal(), rng.normal()]);
            labels.push(u8::from(side > 0.0));
        }
        Dataset::new(
            "synthetic",
            Matrix::from_vec(n, 3, data).unwrap(),
            labels,
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap()
    }

    #[test]
    fn separable_data_scores_high() {
        let d = separable(300, 1);
        for kind in [ModelKind::LogisticRegression, ModelKind::NaiveBayes, ModelKind::GradientBoosting] {
            let cv = cross_validate(&ModelSpec::default_for(kind, 3), &d, &PipelineConfig::default(), 10, 42).unwrap();
            assert!(cv.report.mean_accuracy >= 0.95, "{kind}: {}", cv.report.mean_accuracy);
            assert_eq!(cv.report.per_fold_accuracy.len(), 10);
            assert_eq!(cv.report.confusion.total(), 300);
        }
    }

    #[test]
    fn k_larger_than_class_is_rejected() {
        let d = separable(8, 2);
        let spec = ModelSpec::default_for(ModelKind::NaiveBayes, 0);
        assert!(matches!(
            cross_validate(&spec, &d, &PipelineConfig::default(), 8, 0),
            Err(EvaluationError::ClassTooSmall { .. })
        ));
    }

    #[test]
    fn test_rows_do_not_reach_fitting() {
        let d = separable(100, 5);
        let spec = ModelSpec::default_for(ModelKind::LogisticRegression, 0);
        let config = PipelineConfig::default();
        let a = assign_folds(&d, 5, 7).unwrap();
        let before = fit_fold(&spec, &d, &config, &a, 2).unwrap().checksum;
        let mut perturbed = d.clone();
        for i in a.test_indices(2) {
            for v in perturbed.features.row_mut(i) {
                *v = *v * 10.0 + 3.0;
            }
        }
        assert_eq!(fit_fold(&spec, &perturbed, &config, &a, 2).unwrap().checksum, before);
        for i in a.test_indices(3).into_iter().take(1) {
            perturbed.features.row_mut(i)[0] += 1.0;
        }
        assert_ne!(fit_fold(&spec, &perturbed, &config, &a, 2).unwrap().checksum, before);
    }
}
