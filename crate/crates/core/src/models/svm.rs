use serde::{Deserialize, Serialize};

use crate::numerics::{Matrix, RandomSource};

use super::loss::sigmoid;
use super::spec::{Kernel, SvmParams};

/// Kernel with any default parameter resolved against the training data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum ResolvedKernel {
    Linear,
    Rbf { gamma: f64 },
}

impl ResolvedKernel {
    pub fn resolve(kernel: Kernel, n_features: usize) -> Self {
        match kernel {
            Kernel::Linear => Self::Linear,
            Kernel::Rbf { gamma } => Self::Rbf {
                gamma: gamma.unwrap_or(1.0 / n_features.max(1) as f64),
            },
        }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Self::Linear => a.iter().zip(b).map(|(u, v)| u * v).sum(),
            Self::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: ResolvedKernel,
    /// Training rows with nonzero α.
    pub support_vectors: Vec<Vec<f64>>,
    /// `α_i y_i` for each support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub passes: usize,
}

impl SvmModel {
    pub fn decision(&self, row: &[f64]) -> f64 {
        self.bias
            + self
                .support_vectors
                .iter()
                .zip(&self.coefficients)
                .map(|(sv, c)| c * self.kernel.eval(sv, row))
                .sum::<f64>()
    }

    /// `σ(f(x))`; monotone in the decision value but not calibrated.
    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        x.row_iter().map(|r| sigmoid(self.decision(r))).collect()
    }

    /// Primal weights, meaningful only for the linear kernel.
    pub fn linear_weights(&self) -> Option<Vec<f64>> {
        if self.kernel != ResolvedKernel::Linear {
            return None;
        }
        let p = self.support_vectors.first().map_or(0, Vec::len);
        let mut w = vec![0.0; p];
        for (sv, c) in self.support_vectors.iter().zip(&self.coefficients) {
            for (wj, v) in w.iter_mut().zip(sv) {
                *wj += c * v;
            }
        }
        Some(w)
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite()
            && self.coefficients.iter().all(|c| c.is_finite())
            && self.support_vectors.iter().flatten().all(|v| v.is_finite())
    }
}

/// Result of the dual solve, kept separate so the KKT conditions can be
/// checked on the full α vector.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub signs: Vec<f64>,
    pub bias: f64,
    pub passes: usize,
}

/// Simplified SMO: sweep rows in order, and for each row violating the KKT
/// conditions by more than the tolerance pair it with a random partner.
/// Stops after `max_passes` consecutive sweeps with no α change, or after
/// `max_total_passes` sweeps.
pub fn solve_dual(
    x: &Matrix,
    y: &[u8],
    kernel: ResolvedKernel,
    params: &SvmParams,
    rng: &mut RandomSource,
) -> DualSolution {
    let n = x.rows();
    let c = params.c;
    let tol = params.tolerance;
    let signs: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let k = kernel.eval(x.row(i), x.row(j));
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }
    let k = |i: usize, j: usize| gram[i * n + j];

    let mut alpha = vec![0.0; n];
    let mut bias = 0.0;
    // g[i] = Σ_j α_j y_j K(j, i), so f(x_i) = g[i] + b.
    let mut g = vec![0.0; n];
    let mut quiet = 0;
    let mut passes = 0;
    while quiet < params.max_passes && passes < params.max_total_passes && n > 1 {
        passes += 1;
        let mut changed = 0;
        for i in 0..n {
            let e_i = g[i] + bias - signs[i];
            let r = e_i * signs[i];
            if !((r < -tol && alpha[i] < c) || (r > tol && alpha[i] > 0.0)) {
                continue;
            }
            let mut j = rng.below(n - 1);
            if j >= i {
                j += 1;
            }
            let e_j = g[j] + bias - signs[j];
            let (ai_old, aj_old) = (alpha[i], alpha[j]);
            let (lo, hi) = if signs[i] != signs[j] {
                ((aj_old - ai_old).max(0.0), (c + aj_old - ai_old).min(c))
            } else {
                ((ai_old + aj_old - c).max(0.0), (ai_old + aj_old).min(c))
            };
            if hi - lo < 1e-12 {
                continue;
            }
            let eta = 2.0 * k(i, j) - k(i, i) - k(j, j);
            if eta >= 0.0 {
                continue;
            }
            let aj = (aj_old - signs[j] * (e_i - e_j) / eta).clamp(lo, hi);
            if (aj - aj_old).abs() < 1e-5 * (aj + aj_old + 1e-5) {
                continue;
            }
            let ai = (ai_old + signs[i] * signs[j] * (aj_old - aj)).clamp(0.0, c);
            let di = signs[i] * (ai - ai_old);
            let dj = signs[j] * (aj - aj_old);
            let b1 = bias - e_i - di * k(i, i) - dj * k(i, j);
            let b2 = bias - e_j - di * k(i, j) - dj * k(j, j);
            bias = if ai > 0.0 && ai < c {
                b1
            } else if aj > 0.0 && aj < c {
                b2
            } else {
                (b1 + b2) / 2.0
            };
            alpha[i] = ai;
            alpha[j] = aj;
            for (t, gt) in g.iter_mut().enumerate() {
                *gt += di * k(i, t) + dj * k(j, t);
            }
            changed += 1;
        }
        quiet = if changed == 0 { quiet + 1 } else { 0 };
    }
    if quiet < params.max_passes {
        log::debug!("SMO stopped at the pass limit ({passes}) before settling");
    }
    DualSolution {
        alpha,
        signs,
        bias,
        passes,
    }
}

pub fn train(x: &Matrix, y: &[u8], params: &SvmParams, seed: u64) -> SvmModel {
    let kernel = ResolvedKernel::resolve(params.kernel, x.cols());
    let sol = solve_dual(x, y, kernel, params, &mut RandomSource::new(seed));
    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for (i, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(x.row(i).to_vec());
            coefficients.push(a * sol.signs[i]);
        }
    }
    SvmModel {
        kernel,
        support_vectors,
        coefficients,
        bias: sol.bias,
        passes: sol.passes,
    }
}
