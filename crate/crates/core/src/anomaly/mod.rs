//! Anomaly detectors and the contamination-thresholded scoring used to steer resampling.

mod iforest;
mod knn;

pub use iforest::{
    average_path_length, average_path_length_formula, harmonic_approx, score_from_path_length, IsolationForest,
    IsolationForestParams, IsolationTree, EULER_GAMMA,
};
pub(crate) use knn::squared_distance;
pub use knn::KnnDetector;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::error::{AseError, Result};
use crate::metrics::{confusion, ConfusionMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetectorConfig {
    IsolationForest(IsolationForestParams),
    Knn { k: usize },
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig::IsolationForest(IsolationForestParams::default())
    }
}

impl DetectorConfig {
    /// Whether the fitted scores depend on the seed.
    pub fn validate(&self) -> Result<()> {
        match *self {
            DetectorConfig::IsolationForest(p) if p.trees == 0 || p.subsample == 0 => Err(AseError::invalid(
                "isolation forest needs trees >= 1 and subsample >= 1",
            )),
            DetectorConfig::Knn { k: 0 } => Err(AseError::invalid("KNN detector needs k >= 1")),
            _ => Ok(()),
        }
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, DetectorConfig::IsolationForest(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            DetectorConfig::IsolationForest(_) => "iforest",
            DetectorConfig::Knn { .. } => "knn",
        }
    }

    /// Fits the detector on `train` and returns the raw score of every training row.
    pub fn training_scores(&self, train: &Dataset, seed: u64) -> Result<Vec<f64>> {
        match *self {
            DetectorConfig::IsolationForest(params) => {
                let forest = IsolationForest::fit(train, params, seed)?;
                Ok(train
                    .rows()
                    .map(|r| forest.mean_path_length(r))
                    .map(|h| score_from_path_length(h, forest.subsample()))
                    .collect())
            }
            DetectorConfig::Knn { k } => Ok(KnnDetector::fit(train, k)?.training_scores()),
        }
    }
}

/// Min-max normalization onto [0, 1]; a constant input maps to 0.5 everywhere.
pub fn normalize_scores(raw: &[f64]) -> Vec<f64> {
    let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return vec![0.5; raw.len()];
    }
    let span = hi - lo;
    raw.iter().map(|&s| ((s - lo) / span).clamp(0.0, 1.0)).collect()
}

/// Normalized training scores with the detector's outlier decision at contamination `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyScoring {
    pub scores: Vec<f64>,
    pub contamination: f64,
    pub threshold: f64,
    pub outlier_flags: Vec<bool>,
    /// Outlier taken as a positive prediction, against the true labels.
    pub train_cm: ConfusionMatrix,
}

impl AnomalyScoring {
    pub fn outlier_count(&self) -> usize {
        self.outlier_flags.iter().filter(|&&f| f).count()
    }
}

/// Flags every score at or above the `(1 - c)`-quantile as an outlier.
///
/// The quantile is the element at index `floor((1 - c) * n)` of the ascending sort.
pub fn apply_contamination(scores: &[f64], labels: &[Label], c: f64) -> Result<AnomalyScoring> {
    if !(c > 0.0 && c < 1.0) {
        return Err(AseError::invalid(format!("contamination must lie in (0, 1), got {c}")));
    }
    if scores.len() != labels.len() {
        return Err(AseError::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    if scores.is_empty() {
        return Err(AseError::EmptyDataset);
    }
    let n = scores.len();
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    // the epsilon absorbs representation error in (1 - c) * n, e.g. 0.8 * 10
    let pos = (((1.0 - c) * n as f64) + 1e-9).floor() as usize;
    let threshold = sorted[pos.min(n - 1)];

    let outlier_flags: Vec<bool> = scores.iter().map(|&s| s >= threshold).collect();
    let preds: Vec<Label> = outlier_flags.iter().map(|&f| Label::from_bool(f)).collect();
    Ok(AnomalyScoring {
        scores: scores.to_vec(),
        contamination: c,
        threshold,
        train_cm: confusion(labels, &preds)?,
        outlier_flags,
    })
}
