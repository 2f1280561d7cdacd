use serde::{Deserialize, Serialize};

use crate::numerics::{Matrix, RandomSource};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "node")]
pub enum TreeNode {
    Split {
        feature_index: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Binary tree stored as an arena; the root is node 0. Rows with
/// `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature_index,
                    threshold,
                    left,
                    right,
                } => i = if row[feature_index] <= threshold { left } else { right },
            }
        }
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        x.row_iter().map(|r| self.predict_row(r)).collect()
    }

    /// Number of splits on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }

    pub fn is_finite(&self) -> bool {
        self.nodes.iter().all(|n| match *n {
            TreeNode::Leaf { value } => value.is_finite(),
            TreeNode::Split { threshold, .. } => threshold.is_finite(),
        })
    }

    fn push(&mut self, node: TreeNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

pub fn gini_impurity(n_pos: f64, n: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    let p = n_pos / n;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

/// Impurity decrease `G(parent) - Σ (n_child / n) G(child)`, with counts
/// given as `(positives, total)`.
pub fn gini_gain(parent: (f64, f64), left: (f64, f64), right: (f64, f64)) -> f64 {
    let n = parent.1;
    gini_impurity(parent.0, parent.1)
        - left.1 / n * gini_impurity(left.0, left.1)
        - right.1 / n * gini_impurity(right.0, right.1)
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifierConfig {
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features examined per split; values `>= p` examine every feature in
    /// index order.
    pub max_features: usize,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: f64,
}

/// Rows of `idx` sorted by feature `f`, as (value, row) pairs.
fn sorted_by_feature(x: &Matrix, idx: &[usize], f: usize) -> Vec<(f64, usize)> {
    let mut v: Vec<(f64, usize)> = idx.iter().map(|&i| (x[(i, f)], i)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

fn feature_order(p: usize, max_features: usize, rng: &mut RandomSource) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p).collect();
    if max_features < p {
        rng.shuffle(&mut order);
    }
    order
}

/// Grows a Gini classification tree on the rows listed in `idx`
/// (duplicates allowed, as from a bootstrap sample). Leaves hold the
/// class-1 fraction of their rows.
pub fn build_classifier(
    x: &Matrix,
    y: &[u8],
    idx: &[usize],
    config: &ClassifierConfig,
    rng: &mut RandomSource,
) -> Tree {
    let mut tree = Tree { nodes: Vec::new() };
    grow_classifier(&mut tree, x, y, idx.to_vec(), 0, config, rng);
    tree
}

fn grow_classifier(
    tree: &mut Tree,
    x: &Matrix,
    y: &[u8],
    idx: Vec<usize>,
    depth: usize,
    config: &ClassifierConfig,
    rng: &mut RandomSource,
) -> usize {
    let n = idx.len() as f64;
    let n_pos = idx.iter().filter(|&&i| y[i] == 1).count() as f64;
    let leaf = TreeNode::Leaf { value: n_pos / n };
    if depth >= config.max_depth
        || idx.len() < config.min_samples_split
        || n_pos == 0.0
        || n_pos == n
    {
        return tree.push(leaf);
    }

    let mut best: Option<BestSplit> = None;
    let mut examined = 0;
    for f in feature_order(x.cols(), config.max_features, rng) {
        if examined >= config.max_features {
            break;
        }
        let sorted = sorted_by_feature(x, &idx, f);
        if sorted[0].0 == sorted[sorted.len() - 1].0 {
            continue;
        }
        examined += 1;
        let mut left_pos = 0.0;
        for k in 0..sorted.len() - 1 {
            left_pos += f64::from(y[sorted[k].1]);
            let (a, b) = (sorted[k].0, sorted[k + 1].0);
            if a == b {
                continue;
            }
            let nl = (k + 1) as f64;
            let gain = gini_gain((n_pos, n), (left_pos, nl), (n_pos - left_pos, n - nl));
            if best.as_ref().map_or(true, |s| gain > s.score) {
                best = Some(BestSplit {
                    feature: f,
                    threshold: midpoint(a, b),
                    score: gain,
                });
            }
        }
    }

    let Some(split) = best else {
        return tree.push(leaf);
    };
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
        idx.iter().partition(|&&i| x[(i, split.feature)] <= split.threshold);
    let node = tree.push(leaf);
    let left = grow_classifier(tree, x, y, left_idx, depth + 1, config, rng);
    let right = grow_classifier(tree, x, y, right_idx, depth + 1, config, rng);
    tree.nodes[node] = TreeNode::Split {
        feature_index: split.feature,
        threshold: split.threshold,
        left,
        right,
    };
    node
}

/// Midpoint that stays strictly below `b`, so `a <= t < b` even when the
/// two values are adjacent floats.
fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m < b {
        m
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RegressionConfig {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

/// Grows a least-squares regression tree on `targets`; each leaf stores the
/// Newton value `Σ target / Σ hessian` over its rows.
pub fn build_regressor(
    x: &Matrix,
    targets: &[f64],
    hessians: &[f64],
    config: &RegressionConfig,
) -> Tree {
    let mut tree = Tree { nodes: Vec::new() };
    let idx: Vec<usize> = (0..x.rows()).collect();
    grow_regressor(&mut tree, x, targets, hessians, idx, 0, config);
    tree
}

fn newton_value(idx: &[usize], targets: &[f64], hessians: &[f64]) -> f64 {
    let num: f64 = idx.iter().map(|&i| targets[i]).sum();
    let den: f64 = idx.iter().map(|&i| hessians[i]).sum();
    if den.abs() < 1e-150 {
        0.0
    } else {
        num / den
    }
}

fn grow_regressor(
    tree: &mut Tree,
    x: &Matrix,
    targets: &[f64],
    hessians: &[f64],
    idx: Vec<usize>,
    depth: usize,
    config: &RegressionConfig,
) -> usize {
    let leaf = TreeNode::Leaf {
        value: newton_value(&idx, targets, hessians),
    };
    let min_leaf = config.min_samples_leaf.max(1);
    if depth >= config.max_depth || idx.len() < 2 * min_leaf {
        return tree.push(leaf);
    }

    let n = idx.len() as f64;
    let total: f64 = idx.iter().map(|&i| targets[i]).sum();
    let parent_score = total * total / n;
    let mut best: Option<BestSplit> = None;
    for f in 0..x.cols() {
        let sorted = sorted_by_feature(x, &idx, f);
        let mut left_sum = 0.0;
        for k in 0..sorted.len() - 1 {
            left_sum += targets[sorted[k].1];
            let nl = k + 1;
            let (a, b) = (sorted[k].0, sorted[k + 1].0);
            if a == b || nl < min_leaf || idx.len() - nl < min_leaf {
                continue;
            }
            let right_sum = total - left_sum;
            // Squared-error reduction up to the constant parent term.
            let score = left_sum * left_sum / nl as f64
                + right_sum * right_sum / (n - nl as f64);
            if best.as_ref().map_or(true, |s| score > s.score) {
                best = Some(BestSplit {
                    feature: f,
                    threshold: midpoint(a, b),
                    score,
                });
            }
        }
    }

    let Some(split) = best.filter(|s| s.score > parent_score * (1.0 + 1e-12)) else {
        return tree.push(leaf);
    };
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
        idx.iter().partition(|&&i| x[(i, split.feature)] <= split.threshold);
    let node = tree.push(leaf);
    let left = grow_regressor(tree, x, targets, hessians, left_idx, depth + 1, config);
    let right = grow_regressor(tree, x, targets, hessians, right_idx, depth + 1, config);
    tree.nodes[node] = TreeNode::Split {
        feature_index: split.feature,
        threshold: split.threshold,
        left,
        right,
    };
    node
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_config(p: usize) -> ClassifierConfig {
        ClassifierConfig {
            max_depth: 16,
            min_samples_split: 2,
            max_features: p,
        }
    }

    #[test]
    fn gini_gain_of_perfect_split() {
        // 8 points, 4 per class; the split separates them exactly.
        assert_eq!(gini_impurity(4.0, 8.0), 0.5);
        assert_eq!(gini_gain((4.0, 8.0), (0.0, 4.0), (4.0, 4.0)), 0.5);
    }

    #[test]
    fn gini_gain_of_useless_split() {
        assert_eq!(gini_gain((4.0, 8.0), (2.0, 4.0), (2.0, 4.0)), 0.0);
    }

    #[test]
    fn eight_point_tree_finds_the_split() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let x = Matrix::column_vector(&xs);
        let y = [0, 0, 0, 0, 1, 1, 1, 1];
        let idx: Vec<usize> = (0..8).collect();
        let tree = build_classifier(&x, &y, &idx, &full_config(1), &mut RandomSource::new(0));
        assert_eq!(
            tree.nodes[0],
            TreeNode::Split {
                feature_index: 0,
                threshold: 4.5,
                left: 1,
                right: 2
            }
        );
        assert_eq!(tree.predict(&x), vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn depth_limit_is_respected() {
        let mut rng = RandomSource::new(3);
        let data: Vec<f64> = (0..300).map(|_| rng.normal()).collect();
        let x = Matrix::from_vec(100, 3, data).unwrap();
        let y: Vec<u8> = (0..100).map(|_| u8::from(rng.uniform01() < 0.4)).collect();
        let idx: Vec<usize> = (0..100).collect();
        for d in 1..5 {
            let cfg = ClassifierConfig {
                max_depth: d,
                ..full_config(3)
            };
            let t = build_classifier(&x, &y, &idx, &cfg, &mut rng);
            assert!(t.depth() <= d);
            let r = build_regressor(
                &x,
                &y.iter().map(|&v| f64::from(v)).collect::<Vec<_>>(),
                &[1.0; 100],
                &RegressionConfig {
                    max_depth: d,
                    min_samples_leaf: 5,
                },
            );
            assert!(r.depth() <= d);
        }
    }

    #[test]
    fn regressor_leaf_is_newton_step() {
        let x = Matrix::column_vector(&[0.0, 1.0, 2.0, 3.0]);
        let tree = build_regressor(
            &x,
            &[1.0, 1.0, -1.0, -1.0],
            &[0.5, 0.5, 0.25, 0.25],
            &RegressionConfig {
                max_depth: 1,
                min_samples_leaf: 1,
            },
        );
        assert_eq!(tree.predict_row(&[0.5]), 2.0);
        assert_eq!(tree.predict_row(&[2.5]), -4.0);
    }

    #[test]
    fn regressor_respects_min_samples_leaf() {
        let x = Matrix::column_vector(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let t = build_regressor(
            &x,
            &[5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            &[1.0; 6],
            &RegressionConfig {
                max_depth: 3,
                min_samples_leaf: 3,
            },
        );
        assert_eq!(t.n_leaves(), 2);
        assert_eq!(t.predict_row(&[0.0]), 5.0 / 3.0);
    }

    #[test]
    fn constant_features_make_a_leaf() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]]).unwrap();
        let t = build_classifier(&x, &[0, 1, 1], &[0, 1, 2], &full_config(2), &mut RandomSource::new(1));
        assert_eq!(t.nodes.len(), 1);
        assert!((t.predict_row(&[1.0, 2.0]) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn midpoint_stays_below_upper_value() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let t = midpoint(a, b);
        assert!(a <= t && t < b);
        assert_eq!(midpoint(2.0, 3.0), 2.5);
    }
}
