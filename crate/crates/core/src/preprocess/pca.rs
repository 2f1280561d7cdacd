use serde::{Deserialize, Serialize};

use crate::numerics::{covariance, eigh_symmetric, Matrix};

use super::PreprocessError;

/// Principal axes retained by [`fit_pca`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaBasis {
    /// Column means of the fitting data; subtracted before projection.
    pub center: Vec<f64>,
    /// `p x n_components`, orthonormal columns.
    pub components: Matrix,
    /// All eigenvalues of the covariance, descending, negatives clamped to 0.
    pub explained_variance: Vec<f64>,
    pub cumulative_explained_ratio: Vec<f64>,
    pub n_components: usize,
}

/// Fits PCA on (already standardized) data, keeping the smallest number of
/// components whose cumulative explained-variance ratio reaches
/// `variance_target`.
pub fn fit_pca(x: &Matrix, variance_target: f64) -> Result<PcaBasis, PreprocessError> {
    if !(variance_target > 0.0 && variance_target <= 1.0) {
        return Err(PreprocessError::InvalidConfig(format!(
            "PCA variance target {variance_target} outside (0, 1]"
        )));
    }
    if x.rows() < 2 {
        return Err(PreprocessError::TooFewRows(x.rows()));
    }
    let cov = covariance(x)?;
    let eig = eigh_symmetric(&cov)?;
    let explained_variance: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = explained_variance.iter().sum();
    if total <= 0.0 {
        return Err(PreprocessError::ZeroVariance);
    }
    let mut cumulative_explained_ratio = Vec::with_capacity(explained_variance.len());
    let mut acc = 0.0;
    for v in &explained_variance {
        acc += v / total;
        cumulative_explained_ratio.push(acc.min(1.0));
    }
    let p = x.cols();
    let n_components = cumulative_explained_ratio
        .iter()
        // Slack for the ratio summing to 1 - ulp when the target is 1.
        .position(|&c| c >= variance_target - 1e-12)
        .map_or(p, |i| i + 1);
    let keep: Vec<usize> = (0..n_components).collect();
    let components = eig.vectors.select_columns(&keep);
    Ok(PcaBasis {
        center: x.column_means(),
        components,
        explained_variance,
        cumulative_explained_ratio,
        n_components,
    })
}

impl PcaBasis {
    pub fn input_dim(&self) -> usize {
        self.components.rows()
    }

    pub fn project(&self, x: &Matrix) -> Result<Matrix, PreprocessError> {
        if x.cols() != self.input_dim() {
            return Err(PreprocessError::ColumnMismatch {
                expected: self.input_dim(),
                found: x.cols(),
            });
        }
        let mut centered = x.clone();
        for i in 0..centered.rows() {
            for (v, c) in centered.row_mut(i).iter_mut().zip(&self.center) {
                *v -= c;
            }
        }
        Ok(centered.matmul(&self.components)?)
    }

    /// Maps component scores back to the input space.
    pub fn reconstruct(&self, scores: &Matrix) -> Result<Matrix, PreprocessError> {
        let mut x = scores.matmul(&self.components.transpose())?;
        for i in 0..x.rows() {
            for (v, c) in x.row_mut(i).iter_mut().zip(&self.center) {
                *v += c;
            }
        }
        Ok(x)
    }
}
