use crate::numerics::Matrix;

use super::PreprocessError;

/// Pearson correlation matrix together with the columns found to be constant.
#[derive(Debug, Clone)]
pub struct Correlation {
    pub r: Matrix,
    pub constant: Vec<bool>,
}

/// Treats a column as constant when its spread is negligible relative to its
/// magnitude, which absorbs rounding in the mean of identical values.
pub(crate) fn is_constant(std: f64, column_scale: f64) -> bool {
    std <= 1e-12 * column_scale.max(1.0)
}

/// `r[i][j] = cov(i, j) / (std_i * std_j)`, diagonal exactly 1, clamped to
/// `[-1, 1]`. Constant columns get zero off-diagonal entries.
pub fn pearson_correlation(x: &Matrix) -> Result<Correlation, PreprocessError> {
    if x.rows() < 2 {
        return Err(PreprocessError::TooFewRows(x.rows()));
    }
    let p = x.cols();
    let cov = crate::numerics::covariance(x)?;
    let stds: Vec<f64> = (0..p).map(|i| cov[(i, i)].max(0.0).sqrt()).collect();
    let scales: Vec<f64> = (0..p)
        .map(|j| x.row_iter().map(|r| r[j].abs()).fold(0.0, f64::max))
        .collect();
    let constant: Vec<bool> = stds
        .iter()
        .zip(&scales)
        .map(|(&s, &scale)| is_constant(s, scale))
        .collect();
    let mut r = Matrix::zeros(p, p);
    for i in 0..p {
        r[(i, i)] = 1.0;
        for j in (i + 1)..p {
            let v = if constant[i] || constant[j] {
                0.0
            } else {
                (cov[(i, j)] / (stds[i] * stds[j])).clamp(-1.0, 1.0)
            };
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    Ok(Correlation { r, constant })
}

/// Greedy filter: scanning pairs `i < j` in index order, drop `j` whenever
/// both are still kept and `|r_ij| >= threshold`. Constant columns are always
/// dropped.
pub fn correlation_filter(x: &Matrix, threshold: f64) -> Result<Vec<bool>, PreprocessError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(PreprocessError::InvalidConfig(format!(
            "correlation threshold {threshold} outside (0, 1]"
        )));
    }
    let Correlation { r, constant } = pearson_correlation(x)?;
    let p = x.cols();
    let mut keep: Vec<bool> = constant.iter().map(|c| !c).collect();
    for i in 0..p {
        if !keep[i] {
            continue;
        }
        for j in (i + 1)..p {
            if keep[j] && r[(i, j)].abs() >= threshold {
                keep[j] = false;
            }
        }
    }
    if !keep.iter().any(|&k| k) {
        return Err(PreprocessError::AllFeaturesDropped);
    }
    Ok(keep)
}
