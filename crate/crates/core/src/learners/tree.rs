//! CART classification tree with Gini splits on numeric features.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{AseError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum TreeNode {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        positives: usize,
        total: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
    dim: usize,
}

/// `n * gini` for a node with `pos` positives out of `n`.
fn weighted_gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    2.0 * pos as f64 * (n - pos) as f64 / n as f64
}

struct BestSplit {
    cost: f64,
    feature: usize,
    threshold: f64,
}

impl DecisionTree {
    /// Greedy CART growth. Stops at `max_depth`, at nodes with fewer than two rows,
    /// at pure nodes, and where no feature varies.
    ///
    /// Candidate thresholds are midpoints between consecutive distinct values; ties in
    /// cost go to the lowest feature index, then the lowest threshold.
    pub fn fit(subset: &Dataset, max_depth: usize) -> Result<Self> {
        if subset.is_empty() {
            return Err(AseError::EmptyDataset);
        }
        let mut tree = DecisionTree {
            nodes: Vec::new(),
            dim: subset.dim(),
        };
        let mut idx: Vec<usize> = (0..subset.len()).collect();
        tree.grow(subset, &mut idx, 0, max_depth);
        Ok(tree)
    }

    fn grow(&mut self, data: &Dataset, idx: &mut [usize], depth: usize, max_depth: usize) -> usize {
        let id = self.nodes.len();
        let positives = idx.iter().filter(|&&i| data.label(i).is_positive()).count();
        self.nodes.push(TreeNode::Leaf {
            positives,
            total: idx.len(),
        });
        if depth >= max_depth || idx.len() < 2 || positives == 0 || positives == idx.len() {
            return id;
        }
        let Some(best) = best_split(data, idx, positives) else {
            return id;
        };

        let mut split = 0;
        for k in 0..idx.len() {
            if data.row(idx[k])[best.feature] <= best.threshold {
                idx.swap(k, split);
                split += 1;
            }
        }
        let (l, r) = idx.split_at_mut(split);
        let left = self.grow(data, l, depth + 1, max_depth);
        let right = self.grow(data, r, depth + 1, max_depth);
        self.nodes[id] = TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    /// Positive fraction of the leaf `x` falls into.
    pub fn score(&self, x: &[f64]) -> f64 {
        let mut id = 0;
        loop {
            match self.nodes[id] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if x[feature] <= threshold { left } else { right },
                TreeNode::Leaf { positives, total } => return positives as f64 / total as f64,
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], id: usize) -> usize {
            match nodes[id] {
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
                TreeNode::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }
}

fn best_split(data: &Dataset, idx: &[usize], positives: usize) -> Option<BestSplit> {
    let n = idx.len();
    let mut best: Option<BestSplit> = None;
    let mut column: Vec<(f64, bool)> = Vec::with_capacity(n);
    for feature in 0..data.dim() {
        column.clear();
        column.extend(idx.iter().map(|&i| (data.row(i)[feature], data.label(i).is_positive())));
        column.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left_pos = 0;
        for cut in 1..n {
            left_pos += usize::from(column[cut - 1].1);
            let (lo, hi) = (column[cut - 1].0, column[cut].0);
            if lo == hi {
                continue;
            }
            let cost = weighted_gini(left_pos, cut) + weighted_gini(positives - left_pos, n - cut);
            if best.as_ref().is_none_or(|b| cost < b.cost) {
                let mid = lo + (hi - lo) / 2.0;
                let threshold = if mid < hi { mid } else { lo };
                best = Some(BestSplit {
                    cost,
                    feature,
                    threshold,
                });
            }
        }
    }
    best
}
