use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::ingest::{impute_missing, load_dataset, normalize_name, Dataset, ImputeStrategy};
use crate::models::{ModelKind, ModelSpec};
use crate::preprocess::PipelineConfig;

use super::cv::cross_validate;
use super::metrics::{Confusion, MetricsReport};
use super::EvaluationError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    pub path: PathBuf,
    /// `None` enables PCA for the datasets that use it by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_pca: Option<bool>,
    #[serde(default)]
    pub impute: ImputeStrategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,
}

/// Pipeline settings applied to every dataset; unset fields keep the
/// defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standardize: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pca_variance_target: Option<f64>,
}

impl PipelineOverrides {
    pub fn config_for(&self, entry: &DatasetEntry) -> PipelineConfig {
        let base = PipelineConfig::for_dataset(&entry.name);
        PipelineConfig {
            standardize: self.standardize.unwrap_or(base.standardize),
            correlation_threshold: self.correlation_threshold.unwrap_or(base.correlation_threshold),
            use_pca: entry.use_pca.unwrap_or(base.use_pca),
            pca_variance_target: self.pca_variance_target.unwrap_or(base.pca_variance_target),
        }
    }
}

fn default_k() -> usize {
    10
}

fn default_seed() -> u64 {
    42
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub datasets: Vec<DatasetEntry>,
    pub models: Vec<ModelSpec>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub pipeline: PipelineOverrides,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl BenchmarkConfig {
    /// Parses a config document. A model entry without a `seed` inherits
    /// `master_seed`.
    pub fn from_json(text: &str) -> Result<Self, EvaluationError> {
        let mut doc: Value = serde_json::from_str(text)?;
        let master = match doc.get("master_seed") {
            None => default_seed(),
            Some(v) => v
                .as_u64()
                .ok_or_else(|| EvaluationError::InvalidConfig("master_seed must be an unsigned integer".into()))?,
        };
        if let Some(models) = doc.get_mut("models").and_then(Value::as_array_mut) {
            for m in models {
                if let Some(obj) = m.as_object_mut() {
                    obj.entry("seed").or_insert(Value::from(master));
                }
            }
        }
        let config: Self = serde_json::from_value(doc)?;
        config.validate()?;
        Ok(config)
    }

    /// Replaces the master seed and every model seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        for m in &mut self.models {
            m.seed = seed;
        }
        self
    }

    /// Makes relative dataset and output paths relative to `base`.
    pub fn resolve_paths(mut self, base: &Path) -> Self {
        for d in &mut self.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        if self.output_dir.is_relative() {
            self.output_dir = base.join(&self.output_dir);
        }
        self
    }

    /// Every default written out, so the document alone reproduces a run.
    pub fn resolved(&self) -> Self {
        let mut out = self.clone();
        let first = self.datasets.first().map(|d| self.pipeline.config_for(d)).unwrap_or_default();
        out.pipeline = PipelineOverrides {
            standardize: Some(first.standardize),
            correlation_threshold: Some(first.correlation_threshold),
            pca_variance_target: Some(first.pca_variance_target),
        };
        for d in &mut out.datasets {
            d.use_pca = Some(self.pipeline.config_for(d).use_pca);
        }
        out
    }

    pub fn validate(&self) -> Result<(), EvaluationError> {
        let bad = |msg: String| Err(EvaluationError::InvalidConfig(msg));
        if self.datasets.is_empty() {
            return bad("no datasets listed".into());
        }
        if self.models.is_empty() {
            return bad("no models listed".into());
        }
        if self.k < 2 {
            return Err(EvaluationError::InvalidK(self.k));
        }
        let mut names = HashSet::new();
        let mut paths = HashSet::new();
        for d in &self.datasets {
            if !names.insert(normalize_name(&d.name)) {
                return bad(format!("dataset {:?} listed twice", d.name));
            }
            if !paths.insert(d.path.clone()) {
                return bad(format!("path {} listed twice", d.path.display()));
            }
            self.pipeline.config_for(d).validate()?;
        }
        let mut kinds = HashSet::new();
        for m in &self.models {
            if !kinds.insert(m.kind()) {
                return bad(format!("model {} listed twice", m.kind()));
            }
            m.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum CellOutcome {
    Ok { report: MetricsReport },
    NotAvailable { reason: String },
    Error { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub model: ModelKind,
    pub dataset: String,
    pub outcome: CellOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetColumn {
    pub name: String,
    pub path: PathBuf,
    /// SHA-256 of the file bytes; `None` when the file could not be read.
    pub checksum: Option<String>,
    pub n_instances: Option<usize>,
    /// Accuracy of always predicting "not defective".
    pub majority_baseline: Option<f64>,
    pub pipeline: PipelineConfig,
}

/// One line of `folds.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldDetail {
    pub dataset: String,
    pub model: ModelKind,
    pub fold: usize,
    pub seed: u64,
    pub confusion: Confusion,
    pub accuracy: f64,
    pub train_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTable {
    pub models: Vec<ModelKind>,
    pub datasets: Vec<DatasetColumn>,
    /// Row-major: `cells[m * datasets.len() + d]`.
    pub cells: Vec<Cell>,
    pub folds: Vec<FoldDetail>,
    pub config: BenchmarkConfig,
    pub timestamp: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    F1,
    Precision,
    Recall,
}

impl Metric {
    /// Accuracy is the mean over folds; the other metrics come from the
    /// pooled confusion matrix.
    pub fn value(self, r: &MetricsReport) -> f64 {
        match self {
            Self::Accuracy => r.mean_accuracy,
            Self::F1 => r.f1,
            Self::Precision => r.precision,
            Self::Recall => r.recall,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Accuracy => "accuracy",
            Self::F1 => "f1",
            Self::Precision => "precision",
            Self::Recall => "recall",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "accuracy" => Ok(Self::Accuracy),
            "f1" => Ok(Self::F1),
            "precision" => Ok(Self::Precision),
            "recall" => Ok(Self::Recall),
            other => Err(format!("unknown metric {other:?}")),
        }
    }
}

fn prepare(entry: &DatasetEntry) -> Result<(Dataset, String), EvaluationError> {
    let bytes = std::fs::read(&entry.path).map_err(|source| crate::ingest::IngestError::Io {
        path: entry.path.display().to_string(),
        source,
    })?;
    let checksum = hex::encode(Sha256::digest(&bytes));
    let raw = load_dataset(&entry.path, entry.label_column.as_deref())?.with_name(&entry.name);
    let d = impute_missing(&raw, entry.impute)?;
    d.validate_for_training()?;
    Ok((d, checksum))
}

/// Runs every (model, dataset) pair. Missing dataset files give N/A
/// cells; failures inside a cell give error cells.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkTable, EvaluationError> {
    config.validate()?;
    let mut columns = Vec::new();
    let mut loaded: Vec<Result<Dataset, CellOutcome>> = Vec::new();
    for entry in &config.datasets {
        let pipeline = config.pipeline.config_for(entry);
        let name = normalize_name(&entry.name);
        let (data, checksum) = if !entry.path.exists() {
            log::warn!("{name}: {} not found, column marked N/A", entry.path.display());
            let reason = format!("file {} not found", entry.path.display());
            (Err(CellOutcome::NotAvailable { reason }), None)
        } else {
            match prepare(entry) {
                Ok((d, sum)) => (Ok(d), Some(sum)),
                Err(e) => (Err(CellOutcome::Error { message: e.to_string() }), None),
            }
        };
        let (n_instances, majority_baseline) = match &data {
            Ok(d) => (
                Some(d.n_instances()),
                Some(1.0 - d.positives() as f64 / d.n_instances() as f64),
            ),
            Err(_) => (None, None),
        };
        columns.push(DatasetColumn {
            name,
            path: entry.path.clone(),
            checksum,
            n_instances,
            majority_baseline,
            pipeline,
        });
        loaded.push(data);
    }

    let pairs: Vec<(usize, usize)> = (0..config.models.len())
        .flat_map(|m| (0..config.datasets.len()).map(move |d| (m, d)))
        .collect();
    let results: Vec<(Cell, Vec<FoldDetail>)> = pairs
        .par_iter()
        .map(|&(m, di)| {
            let spec = &config.models[m];
            let column = &columns[di];
            let mut details = Vec::new();
            let outcome = match &loaded[di] {
                Err(o) => o.clone(),
                Ok(d) => match cross_validate(spec, d, &column.pipeline, config.k, config.master_seed) {
                    Ok(cv) => {
                        details = cv
                            .folds
                            .iter()
                            .map(|f| FoldDetail {
                                dataset: column.name.clone(),
                                model: spec.kind(),
                                fold: f.fold,
                                seed: f.seed,
                                confusion: f.confusion,
                                accuracy: f.accuracy,
                                train_time_ms: f.train_time_ms,
                            })
                            .collect();
                        CellOutcome::Ok { report: cv.report }
                    }
                    Err(e) => {
                        log::error!("{} on {}: {e}", spec.kind(), column.name);
                        CellOutcome::Error { message: e.to_string() }
                    }
                },
            };
            let cell = Cell {
                model: spec.kind(),
                dataset: column.name.clone(),
                outcome,
            };
            (cell, details)
        })
        .collect();

    let mut cells = Vec::with_capacity(results.len());
    let mut folds = Vec::new();
    for (cell, details) in results {
        cells.push(cell);
        folds.extend(details);
    }
    Ok(BenchmarkTable {
        models: config.models.iter().map(ModelSpec::kind).collect(),
        datasets: columns,
        cells,
        folds,
        config: config.resolved(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    })
}

fn percent(v: f64) -> String {
    format!("{:.1}", 100.0 * v)
}

impl BenchmarkTable {
    pub fn cell(&self, model: ModelKind, dataset: &str) -> Option<&Cell> {
        let key = normalize_name(dataset);
        self.cells.iter().find(|c| c.model == model && c.dataset == key)
    }

    pub fn has_errors(&self) -> bool {
        self.cells.iter().any(|c| matches!(c.outcome, CellOutcome::Error { .. }))
    }

    fn cell_text(outcome: &CellOutcome, metric: Metric) -> String {
        match outcome {
            CellOutcome::Ok { report } => percent(metric.value(report)),
            CellOutcome::NotAvailable { .. } => "N/A".into(),
            CellOutcome::Error { .. } => "ERR".into(),
        }
    }

    fn row(&self, m: usize) -> &[Cell] {
        let w = self.datasets.len();
        &self.cells[m * w..(m + 1) * w]
    }

    /// Models as rows, datasets as columns, values in percent. Accuracy
    /// tables end with the majority-class baseline row.
    pub fn to_csv(&self, metric: Metric) -> String {
        let mut out = String::from("model");
        for d in &self.datasets {
            out.push(',');
            out.push_str(&d.name);
        }
        out.push('\n');
        for (m, kind) in self.models.iter().enumerate() {
            out.push_str(kind.as_str());
            for c in self.row(m) {
                out.push(',');
                out.push_str(&Self::cell_text(&c.outcome, metric));
            }
            out.push('\n');
        }
        if metric == Metric::Accuracy {
            out.push_str("majority_baseline");
            for d in &self.datasets {
                out.push(',');
                out.push_str(&d.majority_baseline.map_or("N/A".into(), percent));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self, metric: Metric) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Defect prediction benchmark: {} (%)\n", metric.as_str());
        let _ = writeln!(
            out,
            "{}-fold stratified cross-validation, master seed {}, generated {}.",
            self.config.k, self.config.master_seed, self.timestamp
        );
        let _ = writeln!(
            out,
            "Preprocessing is refitted on the training portion of every fold. Cells show the mean over folds \
             (accuracy) or the pooled value (other metrics); `±` is the sample standard deviation of fold accuracies. \
             Published reference figures are unlabelled and are read as accuracy in percent.\n"
        );
        out.push_str("| Model |");
        for d in &self.datasets {
            let _ = write!(out, " {} |", d.name);
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(self.datasets.len()));
        out.push('\n');
        for (m, kind) in self.models.iter().enumerate() {
            let _ = write!(out, "| {} |", kind.display_name());
            for c in self.row(m) {
                let text = match &c.outcome {
                    CellOutcome::Ok { report } if metric == Metric::Accuracy => {
                        format!("{} ± {}", percent(report.mean_accuracy), percent(report.std_accuracy))
                    }
                    other => Self::cell_text(other, metric),
                };
                let _ = write!(out, " {text} |");
            }
            out.push('\n');
        }
        if metric == Metric::Accuracy {
            out.push_str("| Majority baseline |");
            for d in &self.datasets {
                let _ = write!(out, " {} |", d.majority_baseline.map_or("N/A".into(), percent));
            }
            out.push('\n');
        }
        let notes: Vec<String> = self
            .cells
            .iter()
            .filter_map(|c| match &c.outcome {
                CellOutcome::Error { message } => Some(format!("- ERR {} / {}: {message}", c.model, c.dataset)),
                _ => None,
            })
            .chain(self.datasets.iter().filter(|d| d.n_instances.is_none() && d.checksum.is_none()).map(|d| {
                format!("- N/A {}: {} unavailable", d.name, d.path.display())
            }))
            .collect();
        if !notes.is_empty() {
            out.push('\n');
            for n in notes {
                out.push_str(&n);
                out.push('\n');
            }
        }
        out
    }

    pub fn folds_jsonl(&self) -> String {
        let mut out = String::new();
        for f in &self.folds {
            out.push_str(&serde_json::to_string(f).expect("fold records serialize"));
            out.push('\n');
        }
        out
    }
}

/// Re-aggregates fold records into one report per (dataset, model), in
/// order of first appearance.
pub fn aggregate_folds(records: &[FoldDetail]) -> Result<Vec<(String, ModelKind, MetricsReport)>, EvaluationError> {
    let mut keys: Vec<(String, ModelKind)> = Vec::new();
    for r in records {
        let key = (r.dataset.clone(), r.model);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(dataset, model)| {
            let mut rs: Vec<&FoldDetail> =
                records.iter().filter(|r| r.dataset == dataset && r.model == model).collect();
            rs.sort_by_key(|r| r.fold);
            let confusions: Vec<Confusion> = rs.iter().map(|r| r.confusion).collect();
            Ok((dataset, model, MetricsReport::from_folds(&confusions)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config_json(extra: &str) -> String {
        format!(
            r#"{{"datasets": [{{"name": "CM1", "path": "data/CM1.arff"}}, {{"name": "JM1", "path": "data/JM1.arff"}}],
               "models": [{{"kind": "naive_bayes"}}, {{"kind": "svm", "seed": 5, "c": 2.0}}]{extra}}}"#
        )
    }

    #[test]
    fn models_inherit_master_seed() {
        let c = BenchmarkConfig::from_json(&config_json(r#", "master_seed": 9"#)).unwrap();
        assert_eq!(c.models[0].seed, 9);
        assert_eq!(c.models[1].seed, 5);
        assert_eq!(c.k, 10);
        let c = c.with_seed(3);
        assert!(c.models.iter().all(|m| m.seed == 3));
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(BenchmarkConfig::from_json(&config_json(r#", "k": 1"#)).is_err());
        assert!(BenchmarkConfig::from_json(&config_json(r#", "bogus": 1"#)).is_err());
        let dup = r#"{"datasets": [{"name": "a", "path": "x"}, {"name": "A", "path": "y"}], "models": [{"kind": "ann"}]}"#;
        assert!(matches!(BenchmarkConfig::from_json(dup), Err(EvaluationError::InvalidConfig(_))));
        let no_models = r#"{"datasets": [{"name": "a", "path": "x"}], "models": []}"#;
        assert!(BenchmarkConfig::from_json(no_models).is_err());
    }

    #[test]
    fn resolved_config_is_explicit_and_reparses() {
        let c = BenchmarkConfig::from_json(&config_json("")).unwrap();
        let r = c.resolved();
        assert_eq!(r.datasets[0].use_pca, Some(false));
        assert_eq!(r.datasets[1].use_pca, Some(true));
        assert_eq!(r.pipeline.correlation_threshold, Some(0.90));
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"n_trees\"") || text.contains("\"variance_floor\""));
        assert_eq!(BenchmarkConfig::from_json(&text).unwrap(), r);
    }

    #[test]
    fn aggregation_matches_fold_means() {
        let rec = |fold, tp, tn| FoldDetail {
            dataset: "CM1".into(),
            model: ModelKind::Svm,
            fold,
            seed: 0,
            confusion: Confusion { tp, fp: 1, tn, fn_: 1 },
            accuracy: 0.0,
            train_time_ms: 0,
        };
        let out = aggregate_folds(&[rec(1, 2, 6), rec(0, 1, 7)]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].2.per_fold_accuracy, vec![0.8, 0.8]);
    }
}
