use serde::{Deserialize, Serialize};

use super::EvaluationError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn from_labels(y_true: &[u8], y_pred: &[u8]) -> Result<Self, EvaluationError> {
        if y_true.len() != y_pred.len() {
            return Err(EvaluationError::LengthMismatch {
                expected: y_true.len(),
                found: y_pred.len(),
            });
        }
        if y_true.is_empty() {
            return Err(EvaluationError::Empty);
        }
        let mut c = Self::default();
        for (&t, &p) in y_true.iter().zip(y_pred) {
            match (t == 1, p == 1) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (false, false) => c.tn += 1,
                (true, false) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// Zero when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// Zero when there are no actual positives.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn add(&self, other: &Confusion) -> Confusion {
        Confusion {
            tp: self.tp + other.tp,
            fp: self.fp + other.fp,
            tn: self.tn + other.tn,
            fn_: self.fn_ + other.fn_,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Pooled over all evaluated folds.
    pub confusion: Confusion,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Set when the pooled precision or recall had a zero denominator and
    /// was reported as 0.
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub per_fold_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
    /// Sample standard deviation of the per-fold accuracies.
    pub std_accuracy: f64,
}

impl MetricsReport {
    /// Pooled confusion plus per-fold accuracy statistics.
    pub fn from_folds(folds: &[Confusion]) -> Result<Self, EvaluationError> {
        if folds.is_empty() || folds.iter().any(|c| c.total() == 0) {
            return Err(EvaluationError::Empty);
        }
        let pooled = folds.iter().fold(Confusion::default(), |acc, c| acc.add(c));
        let per_fold_accuracy: Vec<f64> = folds.iter().map(Confusion::accuracy).collect();
        let k = per_fold_accuracy.len() as f64;
        let mean = per_fold_accuracy.iter().sum::<f64>() / k;
        let std = if per_fold_accuracy.len() > 1 {
            (per_fold_accuracy.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            confusion: pooled,
            accuracy: pooled.accuracy(),
            precision: pooled.precision(),
            recall: pooled.recall(),
            f1: pooled.f1(),
            precision_undefined: pooled.tp + pooled.fp == 0,
            recall_undefined: pooled.tp + pooled.fn_ == 0,
            per_fold_accuracy,
            mean_accuracy: mean,
            std_accuracy: std,
        })
    }
}

/// Single-fold report.
pub fn classification_metrics(y_true: &[u8], y_pred: &[u8]) -> Result<MetricsReport, EvaluationError> {
    MetricsReport::from_folds(&[Confusion::from_labels(y_true, y_pred)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction() {
        let y = [1, 0, 1, 1, 0];
        let r = classification_metrics(&y, &y).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.f1, 1.0);
    }

    #[test]
    fn hand_confusion() {
        let c = Confusion { tp: 1, fp: 1, tn: 7, fn_: 1 };
        assert!((c.accuracy() - 0.8).abs() < 1e-15);
        assert_eq!(c.precision(), 0.5);
        assert_eq!(c.recall(), 0.5);
        assert_eq!(c.f1(), 0.5);
    }

    #[test]
    fn all_negative_on_cm1_distribution() {
        let y: Vec<u8> = (0..498).map(|i| u8::from(i < 49)).collect();
        let r = classification_metrics(&y, &vec![0; 498]).unwrap();
        assert!((r.accuracy - 0.9016).abs() < 1e-4);
        assert!(r.precision_undefined);
        assert_eq!(r.precision, 0.0);
        assert_eq!(r.f1, 0.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            classification_metrics(&[1, 0], &[1]),
            Err(EvaluationError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn fold_statistics() {
        let folds = [
            Confusion { tp: 1, fp: 0, tn: 3, fn_: 0 },
            Confusion { tp: 0, fp: 1, tn: 2, fn_: 1 },
        ];
        let r = MetricsReport::from_folds(&folds).unwrap();
        assert_eq!(r.per_fold_accuracy, vec![1.0, 0.5]);
        assert_eq!(r.mean_accuracy, 0.75);
        assert!((r.std_accuracy - (0.125f64).sqrt()).abs() < 1e-15);
        assert_eq!(r.confusion.total(), 8);
        assert_eq!(r.accuracy, 6.0 / 8.0);
    }
}
