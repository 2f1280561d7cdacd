use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::numerics::Matrix;

use super::IngestError;

/// Feature matrix plus binary defect labels.
///
/// Missing cells are stored as `NaN` until [`impute_missing`] runs.
///
/// [`impute_missing`]: super::impute_missing
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub features: Matrix,
    /// 1 = defective.
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
    pub source_path: String,
    /// Number of attributes declared in the source file, class included.
    pub declared_attributes: usize,
}

impl Dataset {
    pub fn new(
        name: &str,
        features: Matrix,
        labels: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self, IngestError> {
        let declared_attributes = feature_names.len() + 1;
        let d = Self {
            name: normalize_name(name),
            features,
            labels,
            feature_names,
            source_path: String::new(),
            declared_attributes,
        };
        d.validate_shape()?;
        Ok(d)
    }

    pub fn with_source_path(mut self, path: impl Into<String>) -> Self {
        self.source_path = path.into();
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = normalize_name(name);
        self
    }

    pub fn n_instances(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn missing_count(&self) -> usize {
        self.features.as_slice().iter().filter(|v| v.is_nan()).count()
    }

    pub fn has_missing(&self) -> bool {
        self.features.as_slice().iter().any(|v| v.is_nan())
    }

    /// Structural invariants: label length, binary labels, unique names.
    pub fn validate_shape(&self) -> Result<(), IngestError> {
        if self.labels.len() != self.features.rows() {
            return Err(IngestError::Invalid(format!(
                "{} labels for {} rows",
                self.labels.len(),
                self.features.rows()
            )));
        }
        if self.feature_names.len() != self.features.cols() {
            return Err(IngestError::Invalid(format!(
                "{} feature names for {} columns",
                self.feature_names.len(),
                self.features.cols()
            )));
        }
        if let Some(bad) = self.labels.iter().find(|&&l| l > 1) {
            return Err(IngestError::Invalid(format!("label {bad} is not binary")));
        }
        let mut seen = HashSet::new();
        for n in &self.feature_names {
            if !seen.insert(n.as_str()) {
                return Err(IngestError::Invalid(format!("duplicate feature name {n:?}")));
            }
        }
        if self
            .features
            .as_slice()
            .iter()
            .any(|v| v.is_infinite())
        {
            return Err(IngestError::Invalid("infinite feature value".into()));
        }
        Ok(())
    }

    /// Full training-readiness check: shape invariants, no missing values and
    /// both classes present.
    pub fn validate_for_training(&self) -> Result<(), IngestError> {
        self.validate_shape()?;
        if self.has_missing() {
            return Err(IngestError::Invalid(format!(
                "{}: {} missing values remain; impute first",
                self.name,
                self.missing_count()
            )));
        }
        let pos = self.positives();
        if pos == 0 || pos == self.labels.len() {
            return Err(IngestError::SingleClass {
                dataset: self.name.clone(),
            });
        }
        Ok(())
    }

    /// Rows selected by index, metadata preserved.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            source_path: self.source_path.clone(),
            declared_attributes: self.declared_attributes,
        }
    }
}

/// Uppercase, with runs of whitespace, `-` and `.` collapsed to `_`.
pub fn normalize_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut pending_sep = false;
    for c in name.trim().chars() {
        if c.is_whitespace() || c == '-' || c == '.' || c == '_' {
            pending_sep = !out.is_empty();
        } else {
            if pending_sep {
                out.push('_');
                pending_sep = false;
            }
            out.extend(c.to_uppercase());
        }
    }
    out
}
