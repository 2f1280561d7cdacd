use serde::{Deserialize, Serialize};

use crate::numerics::Matrix;

use super::spec::NaiveBayesParams;
use super::ModelError;

/// Gaussian naive Bayes with per-class feature means and variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    /// Indexed by class (0, 1).
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

pub fn train(x: &Matrix, y: &[u8], params: &NaiveBayesParams) -> Result<NaiveBayesModel, ModelError> {
    let p = x.cols();
    let mut counts = [0usize; 2];
    let mut sums = [vec![0.0; p], vec![0.0; p]];
    for (row, &label) in x.row_iter().zip(y) {
        let c = usize::from(label);
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(row) {
            *s += v;
        }
    }
    if counts[0] == 0 || counts[1] == 0 {
        return Err(ModelError::SingleClass);
    }
    let means = [0, 1].map(|c| sums[c].iter().map(|s| s / counts[c] as f64).collect::<Vec<_>>());
    let mut ss = [vec![0.0; p], vec![0.0; p]];
    for (row, &label) in x.row_iter().zip(y) {
        let c = usize::from(label);
        for ((s, v), m) in ss[c].iter_mut().zip(row).zip(&means[c]) {
            *s += (v - m) * (v - m);
        }
    }
    let variances = [0, 1].map(|c| {
        ss[c]
            .iter()
            .map(|s| (s / counts[c] as f64).max(params.variance_floor))
            .collect::<Vec<_>>()
    });
    let n = y.len() as f64;
    Ok(NaiveBayesModel {
        priors: [counts[0] as f64 / n, counts[1] as f64 / n],
        means,
        variances,
    })
}

impl NaiveBayesModel {
    fn log_joint(&self, row: &[f64], c: usize) -> f64 {
        let mut lp = self.priors[c].ln();
        for ((v, m), var) in row.iter().zip(&self.means[c]).zip(&self.variances[c]) {
            lp -= 0.5 * ((std::f64::consts::TAU * var).ln() + (v - m) * (v - m) / var);
        }
        lp
    }

    /// Posterior P(class 1 | row) via log-sum-exp normalization.
    pub fn posterior(&self, row: &[f64]) -> f64 {
        let l0 = self.log_joint(row, 0);
        let l1 = self.log_joint(row, 1);
        let top = l0.max(l1);
        let z = top + ((l0 - top).exp() + (l1 - top).exp()).ln();
        (l1 - z).exp()
    }

    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        x.row_iter().map(|r| self.posterior(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(x: f64, m: f64, var: f64) -> f64 {
        (-(x - m).powi(2) / (2.0 * var)).exp() / (std::f64::consts::TAU * var).sqrt()
    }

    #[test]
    fn well_separated_classes() {
        let x = Matrix::column_vector(&[-11.0, -10.0, -9.0, 9.0, 10.0, 11.0]);
        let m = train(&x, &[0, 0, 0, 1, 1, 1], &NaiveBayesParams::default()).unwrap();
        assert!(m.posterior(&[9.0]) > 0.999);
    }

    #[test]
    fn priors_are_class_frequencies() {
        let x = Matrix::column_vector(&[1.0, 2.0, 3.0, 4.0]);
        let m = train(&x, &[1, 1, 0, 1], &NaiveBayesParams::default()).unwrap();
        assert_eq!(m.priors[1], 0.75);
        assert_eq!(m.priors[0], 0.25);
    }

    #[test]
    fn posterior_matches_closed_form() {
        let x = Matrix::from_rows(&[
            [1.0, 2.0],
            [2.0, 1.0],
            [1.5, 1.0],
            [4.0, 5.0],
            [5.0, 4.5],
            [4.5, 6.0],
        ])
        .unwrap();
        let y = [0, 0, 0, 1, 1, 1];
        let m = train(&x, &y, &NaiveBayesParams::default()).unwrap();
        // Hand statistics (MLE variances):
        // class 0: means (1.5, 4/3), vars (1/6, 2/9)
        // class 1: means (4.5, 31/6), vars (1/6, 7/18)
        let probe = [3.0, 3.5];
        let l0 = 0.5 * gauss(3.0, 1.5, 1.0 / 6.0) * gauss(3.5, 4.0 / 3.0, 2.0 / 9.0);
        let l1 = 0.5 * gauss(3.0, 4.5, 1.0 / 6.0) * gauss(3.5, 31.0 / 6.0, 7.0 / 18.0);
        let expected = l1 / (l0 + l1);
        assert!((m.posterior(&probe) - expected).abs() < 1e-9);
    }

    #[test]
    fn single_class_rejected() {
        let x = Matrix::column_vector(&[1.0, 2.0]);
        assert!(matches!(
            train(&x, &[1, 1], &NaiveBayesParams::default()),
            Err(ModelError::SingleClass)
        ));
    }

    #[test]
    fn constant_feature_uses_variance_floor() {
        let x = Matrix::from_rows(&[[1.0, 0.0], [1.0, 1.0], [1.0, 5.0], [1.0, 6.0]]).unwrap();
        let m = train(&x, &[0, 0, 1, 1], &NaiveBayesParams::default()).unwrap();
        assert_eq!(m.variances[0][0], 1e-9);
        let p = m.posterior(&[1.0, 5.5]);
        assert!(p.is_finite() && p > 0.5);
    }
}
