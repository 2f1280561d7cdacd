use serde::{Deserialize, Serialize};

use super::{Dataset, IngestError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImputeStrategy {
    /// Replace each missing cell with its column's median.
    #[default]
    Median,
    /// Remove every row that has a missing cell.
    DropRows,
}

impl std::str::FromStr for ImputeStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "median" => Ok(Self::Median),
            "drop_rows" | "drop-rows" => Ok(Self::DropRows),
            other => Err(format!("unknown imputation strategy {other:?}")),
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Removes missing values. A dataset without missing cells comes back
/// unchanged under either strategy.
pub fn impute_missing(d: &Dataset, strategy: ImputeStrategy) -> Result<Dataset, IngestError> {
    if !d.has_missing() {
        return Ok(d.clone());
    }
    match strategy {
        ImputeStrategy::Median => {
            let mut out = d.clone();
            for j in 0..d.n_features() {
                let col = d.features.column(j);
                if !col.iter().any(|v| v.is_nan()) {
                    continue;
                }
                let mut present: Vec<f64> = col.iter().copied().filter(|v| !v.is_nan()).collect();
                if present.is_empty() {
                    return Err(IngestError::AllMissing {
                        feature: d.feature_names[j].clone(),
                    });
                }
                let m = median(&mut present);
                for i in 0..d.n_instances() {
                    if out.features[(i, j)].is_nan() {
                        out.features[(i, j)] = m;
                    }
                }
            }
            Ok(out)
        }
        ImputeStrategy::DropRows => {
            let keep: Vec<usize> = (0..d.n_instances())
                .filter(|&i| !d.features.row(i).iter().any(|v| v.is_nan()))
                .collect();
            let out = d.subset(&keep);
            if out.n_instances() == 0 {
                return Err(IngestError::Invalid(format!(
                    "{}: dropping incomplete rows leaves no data",
                    d.name
                )));
            }
            let pos = out.positives();
            if pos == 0 || pos == out.n_instances() {
                return Err(IngestError::SingleClass {
                    dataset: d.name.clone(),
                });
            }
            Ok(out)
        }
    }
}
