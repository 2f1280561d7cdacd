use serde::{Deserialize, Serialize};

use crate::numerics::Matrix;

use super::loss::{clamp_probability, sigmoid};
use super::spec::LogisticParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl LogisticModel {
    pub fn decision(&self, row: &[f64]) -> f64 {
        self.bias + row.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>()
    }

    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        x.row_iter().map(|r| sigmoid(self.decision(r))).collect()
    }
}

/// Objective `mean BCE(σ(w·x + b), y) + λ‖w‖²` and its gradient
/// `(∂/∂w, ∂/∂b)`.
pub fn objective_and_gradient(
    weights: &[f64],
    bias: f64,
    x: &Matrix,
    y: &[u8],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.rows() as f64;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    let mut loss = 0.0;
    for (row, &label) in x.row_iter().zip(y) {
        let z = bias + row.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>();
        let p = sigmoid(z);
        let pc = clamp_probability(p);
        loss -= if label == 1 { pc.ln() } else { (1.0 - pc).ln() };
        let r = p - f64::from(label);
        for (g, a) in grad_w.iter_mut().zip(row) {
            *g += r * a;
        }
        grad_b += r;
    }
    let penalty: f64 = weights.iter().map(|w| w * w).sum();
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + 2.0 * l2 * w;
    }
    (loss / n + l2 * penalty, grad_w, grad_b / n)
}

/// Full-batch gradient descent from zero weights with step `1/L`, where
/// `L = mean‖[x, 1]‖² / 4 + 2λ` bounds the Hessian's spectral norm.
/// Returns the model and per-iteration objective values.
pub fn train(x: &Matrix, y: &[u8], params: &LogisticParams) -> (LogisticModel, Vec<f64>) {
    let p = x.cols();
    let mean_sq_norm =
        x.row_iter().map(|r| 1.0 + r.iter().map(|v| v * v).sum::<f64>()).sum::<f64>()
            / x.rows().max(1) as f64;
    let lipschitz = 0.25 * mean_sq_norm + 2.0 * params.l2;
    let step = 1.0 / lipschitz;

    let mut weights = vec![0.0; p];
    let mut bias = 0.0;
    let mut log = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..params.max_iters {
        let (loss, gw, gb) = objective_and_gradient(&weights, bias, x, y, params.l2);
        log.push(loss);
        let max_grad = gw.iter().fold(gb.abs(), |acc, g| acc.max(g.abs()));
        iterations = it;
        if max_grad <= params.tolerance {
            converged = true;
            break;
        }
        for (w, g) in weights.iter_mut().zip(&gw) {
            *w -= step * g;
        }
        bias -= step * gb;
        iterations = it + 1;
    }
    if !converged {
        log::debug!(
            "logistic regression stopped after {} iterations without reaching tolerance {}",
            params.max_iters,
            params.tolerance
        );
    }
    (
        LogisticModel {
            weights,
            bias,
            iterations,
            converged,
        },
        log,
    )
}
