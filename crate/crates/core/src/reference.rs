//! Published reference numbers for the NASA Promise benchmark: dataset
//! characteristics and 10-fold cross-validation accuracies (percent).

use crate::ingest::normalize_name;
use crate::models::ModelKind;

/// Dataset columns in reference order.
pub const DATASETS: [&str; 7] = ["CM1", "JM1", "KC1", "KC2", "PC1", "AT", "KC1_CL"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetCharacteristics {
    pub name: &'static str,
    pub attributes: usize,
    pub instances: usize,
    pub faulty_percent: f64,
}

pub const CHARACTERISTICS: [DatasetCharacteristics; 7] = [
    DatasetCharacteristics { name: "CM1", attributes: 22, instances: 498, faulty_percent: 9.83 },
    DatasetCharacteristics { name: "JM1", attributes: 22, instances: 10_885, faulty_percent: 19.35 },
    DatasetCharacteristics { name: "KC1", attributes: 22, instances: 2_109, faulty_percent: 15.45 },
    DatasetCharacteristics { name: "KC2", attributes: 22, instances: 522, faulty_percent: 20.50 },
    DatasetCharacteristics { name: "PC1", attributes: 22, instances: 1_109, faulty_percent: 6.94 },
    DatasetCharacteristics { name: "AT", attributes: 9, instances: 130, faulty_percent: 8.46 },
    DatasetCharacteristics { name: "KC1_CL", attributes: 95, instances: 145, faulty_percent: 44.82 },
];

/// Rows follow `ModelKind::ALL`; columns follow `DATASETS`.
const ACCURACY: [[f64; 7]; 6] = [
    [85.1, 70.6, 80.1, 83.7, 79.8, 81.0, 80.5],
    [82.9, 77.0, 75.0, 81.7, 81.1, 72.7, 73.7],
    [88.0, 78.7, 87.5, 84.0, 86.0, 87.0, 89.5],
    [85.0, 75.4, 83.0, 86.0, 85.0, 88.0, 78.0],
    [83.0, 76.9, 85.0, 79.0, 89.0, 91.2, 81.0],
    [80.0, 83.4, 83.0, 88.9, 93.0, 90.0, 79.0],
];

pub fn characteristics(dataset: &str) -> Option<DatasetCharacteristics> {
    let key = normalize_name(dataset);
    CHARACTERISTICS.iter().copied().find(|c| c.name == key)
}

/// Reference accuracy in percent, if the pair has a published value.
pub fn accuracy(model: ModelKind, dataset: &str) -> Option<f64> {
    let key = normalize_name(dataset);
    let col = DATASETS.iter().position(|&d| d == key)?;
    let row = ModelKind::ALL.iter().position(|&m| m == model)?;
    Some(ACCURACY[row][col])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups() {
        assert_eq!(accuracy(ModelKind::Ann, "PC1"), Some(93.0));
        assert_eq!(accuracy(ModelKind::GradientBoosting, "cm1"), Some(88.0));
        assert_eq!(accuracy(ModelKind::NaiveBayes, "JM1"), Some(77.0));
        assert_eq!(accuracy(ModelKind::RandomForest, "KC1 CL"), Some(81.0));
        assert_eq!(accuracy(ModelKind::Svm, "XYZ"), None);
        assert_eq!(characteristics("CM1").unwrap().instances, 498);
    }

    #[test]
    fn row_order_matches_model_order() {
        assert_eq!(
            ModelKind::ALL,
            [
                ModelKind::LogisticRegression,
                ModelKind::NaiveBayes,
                ModelKind::GradientBoosting,
                ModelKind::Svm,
                ModelKind::RandomForest,
                ModelKind::Ann
            ]
        );
    }
}
