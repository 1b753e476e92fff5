//! Isolation forest: random axis-parallel partitioning, scored by average path length.

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{AseError, Result};
use crate::seed;

pub const EULER_GAMMA: f64 = 0.577_215_664_9;

/// `H(i) ~ ln(i) + gamma`.
pub fn harmonic_approx(i: f64) -> f64 {
    i.ln() + EULER_GAMMA
}

/// `2 H(n-1) - 2(n-1)/n` evaluated for any `n > 1`, without the small-`n` overrides.
pub fn average_path_length_formula(n: f64) -> f64 {
    2.0 * harmonic_approx(n - 1.0) - 2.0 * (n - 1.0) / n
}

/// Average unsuccessful-search path length of a BST with `n` nodes, `c(n)`.
/// `c(1) = 0` and `c(2) = 1` by convention.
pub fn average_path_length(n: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => average_path_length_formula(n as f64),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Split {
        feature: usize,
        value: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        size: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolationTree {
    nodes: Vec<Node>,
}

impl IsolationTree {
    fn fit(data: &Dataset, mut sample: Vec<usize>, height_limit: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut tree = IsolationTree { nodes: Vec::new() };
        tree.grow(data, &mut sample, 0, height_limit, rng);
        tree
    }

    fn grow(
        &mut self,
        data: &Dataset,
        idx: &mut [usize],
        depth: usize,
        height_limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { size: idx.len() });
        if depth >= height_limit || idx.len() <= 1 {
            return id;
        }

        // candidate features are those not constant within the node
        let ranges: Vec<(usize, f64, f64)> = (0..data.dim())
            .filter_map(|f| {
                let (lo, hi) = idx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let v = data.row(i)[f];
                    (lo.min(v), hi.max(v))
                });
                (lo < hi).then_some((f, lo, hi))
            })
            .collect();
        if ranges.is_empty() {
            return id;
        }
        let (feature, lo, hi) = ranges[rng.gen_range(0..ranges.len())];
        let mut value = rng.gen_range(lo..hi);
        if value <= lo {
            value = lo + (hi - lo) / 2.0;
        }

        // in-place partition: [< value | >= value]
        let mut split = 0;
        for k in 0..idx.len() {
            if data.row(idx[k])[feature] < value {
                idx.swap(k, split);
                split += 1;
            }
        }
        let (l, r) = idx.split_at_mut(split);
        let left = self.grow(data, l, depth + 1, height_limit, rng);
        let right = self.grow(data, r, depth + 1, height_limit, rng);
        self.nodes[id] = Node::Split {
            feature,
            value,
            left,
            right,
        };
        id
    }

    /// Path length `h(x)`: edges to the leaf plus `c(leaf size)`.
    pub fn path_length(&self, x: &[f64]) -> f64 {
        let mut id = 0;
        let mut depth = 0usize;
        loop {
            match self.nodes[id] {
                Node::Split {
                    feature,
                    value,
                    left,
                    right,
                } => {
                    id = if x[feature] < value { left } else { right };
                    depth += 1;
                }
                Node::Leaf { size } => return depth as f64 + average_path_length(size),
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Checks that every split value lies strictly inside its node's feature range.
    #[cfg(test)]
    fn splits_within_range(&self, data: &Dataset, idx: &[usize], id: usize) -> bool {
        match self.nodes[id] {
            Node::Leaf { size } => size == idx.len(),
            Node::Split {
                feature,
                value,
                left,
                right,
            } => {
                let vals: Vec<f64> = idx.iter().map(|&i| data.row(i)[feature]).collect();
                let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| data.row(i)[feature] < value);
                lo < value
                    && value < hi
                    && self.splits_within_range(data, &l, left)
                    && self.splits_within_range(data, &r, right)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsolationForestParams {
    pub trees: usize,
    /// Requested subsample size; capped at the training set size.
    pub subsample: usize,
}

impl Default for IsolationForestParams {
    fn default() -> Self {
        IsolationForestParams {
            trees: 100,
            subsample: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolationForest {
    trees: Vec<IsolationTree>,
    subsample: usize,
    height_limit: usize,
    dim: usize,
}

impl IsolationForest {
    pub fn fit(train: &Dataset, params: IsolationForestParams, seed: u64) -> Result<Self> {
        if train.len() < 2 {
            return Err(AseError::TooFewSamples {
                class: "training",
                count: train.len(),
                required: 2,
            });
        }
        if params.subsample < 2 {
            return Err(AseError::invalid("isolation forest subsample size must be >= 2"));
        }
        if params.trees == 0 {
            return Err(AseError::invalid("isolation forest needs at least one tree"));
        }
        let psi = params.subsample.min(train.len());
        let height_limit = (psi as f64).log2().ceil() as usize;
        let mut rng = seed::rng(seed);
        let trees = (0..params.trees)
            .map(|_| {
                let sample = index::sample(&mut rng, train.len(), psi).into_vec();
                IsolationTree::fit(train, sample, height_limit, &mut rng)
            })
            .collect();
        Ok(IsolationForest {
            trees,
            subsample: psi,
            height_limit,
            dim: train.dim(),
        })
    }

    pub fn trees(&self) -> &[IsolationTree] {
        &self.trees
    }

    pub fn subsample(&self) -> usize {
        self.subsample
    }

    pub fn height_limit(&self) -> usize {
        self.height_limit
    }

    pub fn mean_path_length(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.path_length(x)).sum::<f64>() / self.trees.len() as f64
    }

    /// Raw anomaly score `2^(-E[h(x)] / c(psi))`, in (0, 1].
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(AseError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(score_from_path_length(self.mean_path_length(x), self.subsample))
    }
}

/// `2^(-h / c(psi))`.
pub fn score_from_path_length(mean_path: f64, subsample: usize) -> f64 {
    let c = average_path_length(subsample);
    if c == 0.0 {
        return 0.5;
    }
    2f64.powf(-mean_path / c)
}
