use serde::{Deserialize, Serialize};

use super::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation; 0 when fewer than two values are present.
    pub std: f64,
    pub missing_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub name: String,
    pub n_instances: usize,
    pub n_features: usize,
    /// Declared attributes including the class attribute.
    pub n_attributes: usize,
    pub n_faulty: usize,
    pub faulty_fraction: f64,
    pub per_feature_stats: Vec<FeatureStats>,
}

/// Counts and per-feature summary statistics over non-missing entries.
pub fn profile(d: &Dataset) -> DatasetProfile {
    let n = d.n_instances();
    let n_faulty = d.positives();
    let per_feature_stats = (0..d.n_features())
        .map(|j| {
            let col = d.features.column(j);
            let present: Vec<f64> = col.iter().copied().filter(|v| !v.is_nan()).collect();
            let missing_count = col.len() - present.len();
            let k = present.len();
            let (min, max, mean, std) = if k == 0 {
                (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
            } else {
                let min = present.iter().copied().fold(f64::INFINITY, f64::min);
                let max = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mean = present.iter().sum::<f64>() / k as f64;
                let std = if k < 2 {
                    0.0
                } else {
                    (present.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64)
                        .sqrt()
                };
                (min, max, mean, std)
            };
            FeatureStats {
                name: d.feature_names[j].clone(),
                min,
                max,
                mean,
                std,
                missing_count,
            }
        })
        .collect();
    DatasetProfile {
        name: d.name.clone(),
        n_instances: n,
        n_features: d.n_features(),
        n_attributes: d.declared_attributes,
        n_faulty,
        faulty_fraction: if n == 0 { 0.0 } else { n_faulty as f64 / n as f64 },
        per_feature_stats,
    }
}
