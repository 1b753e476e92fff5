//! Base classifiers sharing one train/score surface.

mod knn;
mod logistic;
mod tree;

pub use knn::KnnClassifier;
pub use logistic::{log_loss, log_loss_gradient, sigmoid, LogisticParams, LogisticRegression};
pub use tree::DecisionTree;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::error::{AseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierConfig {
    DecisionTree { max_depth: usize },
    LogisticRegression(LogisticParams),
    Knn { neighbors: usize },
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig::DecisionTree { max_depth: 10 }
    }
}

impl ClassifierConfig {
    /// Short name used in reports.
    pub fn short_name(&self) -> &'static str {
        match self {
            ClassifierConfig::DecisionTree { .. } => "DT",
            ClassifierConfig::LogisticRegression(_) => "LR",
            ClassifierConfig::Knn { .. } => "KNN",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ClassifierConfig::LogisticRegression(p) if !(p.rate > 0.0 && p.rate.is_finite()) => Err(AseError::invalid(
                format!("learning rate must be a positive number, got {}", p.rate),
            )),
            ClassifierConfig::Knn { neighbors: 0 } => Err(AseError::invalid("KNN classifier needs neighbors >= 1")),
            _ => Ok(()),
        }
    }

    /// Trains on `subset`. A single-class subset yields a constant classifier, and the
    /// KNN neighbour count is capped at the subset size.
    pub fn fit(&self, subset: &Dataset) -> Result<BaseClassifier> {
        if subset.is_empty() {
            return Err(AseError::EmptyDataset);
        }
        let dim = subset.dim();
        if subset.positive_count() == 0 || subset.negative_count() == 0 {
            let score = if subset.positive_count() > 0 { 1.0 } else { 0.0 };
            return Ok(BaseClassifier::Constant { score, dim });
        }
        Ok(match *self {
            ClassifierConfig::DecisionTree { max_depth } => {
                BaseClassifier::DecisionTree(DecisionTree::fit(subset, max_depth)?)
            }
            ClassifierConfig::LogisticRegression(params) => {
                BaseClassifier::LogisticRegression(LogisticRegression::fit(subset, params)?)
            }
            ClassifierConfig::Knn { neighbors } => {
                BaseClassifier::Knn(KnnClassifier::fit(subset, neighbors.min(subset.len()))?)
            }
        })
    }
}

/// A fitted classifier producing scores in [0, 1]; class 1 iff score >= 0.5.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseClassifier {
    DecisionTree(DecisionTree),
    LogisticRegression(LogisticRegression),
    Knn(KnnClassifier),
    Constant { score: f64, dim: usize },
}

impl BaseClassifier {
    pub fn dim(&self) -> usize {
        match self {
            BaseClassifier::DecisionTree(t) => t.dim(),
            BaseClassifier::LogisticRegression(m) => m.dim(),
            BaseClassifier::Knn(m) => m.dim(),
            BaseClassifier::Constant { dim, .. } => *dim,
        }
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(AseError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.score_unchecked(x))
    }

    pub(crate) fn score_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            BaseClassifier::DecisionTree(t) => t.score(x),
            BaseClassifier::LogisticRegression(m) => m.score(x),
            BaseClassifier::Knn(m) => m.score(x),
            BaseClassifier::Constant { score, .. } => *score,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(crate::metrics::threshold(self.score(x)?))
    }
}
