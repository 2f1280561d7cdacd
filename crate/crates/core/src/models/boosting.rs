use serde::{Deserialize, Serialize};

use crate::numerics::Matrix;

use super::loss::{bce_loss, sigmoid};
use super::spec::BoostingParams;
use super::tree::{build_regressor, RegressionConfig, Tree};

/// Additive log-odds model `F(x) = F0 + shrinkage · Σ tree(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostingModel {
    pub initial_score: f64,
    pub shrinkage: f64,
    pub trees: Vec<Tree>,
}

impl BoostingModel {
    pub fn decision(&self, row: &[f64]) -> f64 {
        self.initial_score + self.shrinkage * self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }

    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        x.row_iter().map(|r| sigmoid(self.decision(r))).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.initial_score.is_finite() && self.trees.iter().all(Tree::is_finite)
    }
}

/// Requires both classes in `y`. Returns the model and the training BCE
/// before the first round and after each round.
pub fn train(x: &Matrix, y: &[u8], params: &BoostingParams) -> (BoostingModel, Vec<f64>) {
    let n = y.len();
    let rate = y.iter().filter(|&&v| v == 1).count() as f64 / n as f64;
    let initial_score = (rate / (1.0 - rate)).ln();
    let config = RegressionConfig {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf,
    };

    let mut scores = vec![initial_score; n];
    let mut probs: Vec<f64> = scores.iter().map(|&f| sigmoid(f)).collect();
    let mut log = vec![bce_loss(y, &probs).expect("labels and scores align")];
    let mut trees = Vec::with_capacity(params.n_rounds);
    for _ in 0..params.n_rounds {
        let residuals: Vec<f64> = y.iter().zip(&probs).map(|(&l, p)| f64::from(l) - p).collect();
        let hessians: Vec<f64> = probs.iter().map(|p| p * (1.0 - p)).collect();
        let tree = build_regressor(x, &residuals, &hessians, &config);
        for (i, row) in x.row_iter().enumerate() {
            scores[i] += params.shrinkage * tree.predict_row(row);
            probs[i] = sigmoid(scores[i]);
        }
        log.push(bce_loss(y, &probs).expect("labels and scores align"));
        trees.push(tree);
    }
    (
        BoostingModel {
            initial_score,
            shrinkage: params.shrinkage,
            trees,
        },
        log,
    )
}
