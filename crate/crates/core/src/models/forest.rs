use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numerics::{derive_seed, Matrix, RandomSource};

use super::spec::ForestParams;
use super::tree::{build_classifier, ClassifierConfig, Tree};

const TREE_SEED_ROLE: u64 = 0x7265_6573;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    /// Accuracy on out-of-bag rows; `None` without bootstrap or when no
    /// row was ever left out.
    pub oob_accuracy: Option<f64>,
}

impl ForestModel {
    /// Mean of the trees' leaf probabilities.
    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        let k = self.trees.len() as f64;
        x.row_iter()
            .map(|r| self.trees.iter().map(|t| t.predict_row(r)).sum::<f64>() / k)
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.trees.iter().all(Tree::is_finite)
    }
}

pub fn subset_size(params: &ForestParams, p: usize) -> usize {
    params
        .max_features
        .unwrap_or_else(|| (p as f64).sqrt().floor() as usize)
        .clamp(1, p.max(1))
}

/// Trees are grown in parallel; each draws from its own stream seeded by
/// `(seed, tree index)`, so the result does not depend on scheduling.
pub fn train(x: &Matrix, y: &[u8], params: &ForestParams, seed: u64) -> ForestModel {
    let n = x.rows();
    let config = ClassifierConfig {
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        max_features: subset_size(params, x.cols()),
    };
    let grown: Vec<(Tree, Vec<usize>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = RandomSource::new(derive_seed(seed, TREE_SEED_ROLE, t as u64));
            let idx = if params.bootstrap {
                rng.bootstrap_indices(n).expect("training data is non-empty")
            } else {
                (0..n).collect()
            };
            let tree = build_classifier(x, y, &idx, &config, &mut rng);
            (tree, idx)
        })
        .collect();

    let oob_accuracy = params.bootstrap.then(|| out_of_bag_accuracy(x, y, &grown)).flatten();
    ForestModel {
        trees: grown.into_iter().map(|(t, _)| t).collect(),
        oob_accuracy,
    }
}

fn out_of_bag_accuracy(x: &Matrix, y: &[u8], grown: &[(Tree, Vec<usize>)]) -> Option<f64> {
    let n = x.rows();
    let mut sum = vec![0.0; n];
    let mut votes = vec![0usize; n];
    for (tree, idx) in grown {
        let mut in_bag = vec![false; n];
        for &i in idx {
            in_bag[i] = true;
        }
        for i in (0..n).filter(|&i| !in_bag[i]) {
            sum[i] += tree.predict_row(x.row(i));
            votes[i] += 1;
        }
    }
    let scored: Vec<usize> = (0..n).filter(|&i| votes[i] > 0).collect();
    if scored.is_empty() {
        return None;
    }
    let correct = scored
        .iter()
        .filter(|&&i| u8::from(sum[i] / votes[i] as f64 >= 0.5) == y[i])
        .count();
    Some(correct as f64 / scored.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn threshold_data(n: usize, seed: u64) -> (Matrix, Vec<u8>) {
        let mut rng = RandomSource::new(seed);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let row = [rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0), rng.normal()];
            y.push(u8::from(row[0] > 5.0));
            rows.push(row);
        }
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn default_subset_is_floor_sqrt() {
        let p = ForestParams::default();
        assert_eq!(subset_size(&p, 21), 4);
        assert_eq!(subset_size(&p, 1), 1);
        assert_eq!(subset_size(&ForestParams { max_features: Some(50), ..p }, 21), 21);
    }

    #[test]
    fn one_perfect_split_gives_high_oob_accuracy() {
        let (x, y) = threshold_data(200, 5);
        let m = train(&x, &y, &ForestParams::default(), 42);
        assert!(m.oob_accuracy.unwrap() >= 0.95, "{:?}", m.oob_accuracy);
    }

    #[test]
    fn single_full_tree_without_bootstrap_is_cart() {
        let mut rng = RandomSource::new(8);
        let data: Vec<f64> = (0..400).map(|_| rng.normal()).collect();
        let x = Matrix::from_vec(100, 4, data).unwrap();
        let y: Vec<u8> = x.row_iter().map(|r| u8::from(r[0] + 0.5 * r[1] + 0.3 * r[3] > 0.1)).collect();
        let params = ForestParams {
            n_trees: 1,
            max_features: Some(4),
            bootstrap: false,
            ..ForestParams::default()
        };
        let forest = train(&x, &y, &params, 99);
        let idx: Vec<usize> = (0..100).collect();
        let cart = build_classifier(
            &x,
            &y,
            &idx,
            &ClassifierConfig {
                max_depth: params.max_depth,
                min_samples_split: params.min_samples_split,
                max_features: 4,
            },
            &mut RandomSource::new(0),
        );
        assert_eq!(forest.trees[0], cart);
        assert_eq!(forest.predict_proba(&x), cart.predict(&x));
        assert_eq!(forest.oob_accuracy, None);
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = threshold_data(80, 2);
        let params = ForestParams {
            n_trees: 10,
            ..ForestParams::default()
        };
        assert_eq!(train(&x, &y, &params, 7), train(&x, &y, &params, 7));
        assert_ne!(train(&x, &y, &params, 7), train(&x, &y, &params, 8));
    }
}
