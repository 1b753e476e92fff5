//! Confusion matrices and the evaluation metric set.

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{AseError, Result};

/// Counts with the minority class as positive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn actual_positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn predicted_positives(&self) -> usize {
        self.tp + self.fp
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn confusion(labels: &[Label], predictions: &[Label]) -> Result<ConfusionMatrix> {
    if labels.len() != predictions.len() {
        return Err(AseError::LengthMismatch {
            left: labels.len(),
            right: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(AseError::EmptyDataset);
    }
    let mut cm = ConfusionMatrix::default();
    for (&y, &p) in labels.iter().zip(predictions) {
        match (y, p) {
            (Label::Positive, Label::Positive) => cm.tp += 1,
            (Label::Positive, Label::Negative) => cm.fn_ += 1,
            (Label::Negative, Label::Positive) => cm.fp += 1,
            (Label::Negative, Label::Negative) => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// Class decision for a score in [0, 1].
pub fn threshold(score: f64) -> Label {
    Label::from_bool(score >= 0.5)
}

/// Area under the ROC curve as the normalized Mann-Whitney U statistic.
///
/// Tied scores receive their average rank, which counts tied
/// positive/negative pairs as one half.
pub fn roc_auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(AseError::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let n_pos = labels.iter().filter(|l| l.is_positive()).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(AseError::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // sum of (1-based, tie-averaged) ranks of the positives
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        let tied_pos = order[i..=j].iter().filter(|&&k| labels[k].is_positive()).count();
        rank_sum += avg_rank * tied_pos as f64;
        i = j + 1;
    }
    let n_pos = n_pos as f64;
    let u = rank_sum - n_pos * (n_pos + 1.0) / 2.0;
    Ok(u / (n_pos * n_neg as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Absent when the evaluated labels hold a single class.
    pub auc: Option<f64>,
}

pub fn metrics(cm: &ConfusionMatrix, scores: &[f64], labels: &[Label]) -> MetricSet {
    MetricSet {
        accuracy: cm.accuracy(),
        precision: cm.precision(),
        recall: cm.recall(),
        f1: cm.f1(),
        auc: roc_auc(scores, labels).ok(),
    }
}

/// Thresholds `scores` at 0.5 and computes the confusion matrix and metrics.
pub fn evaluate_scores(scores: &[f64], labels: &[Label]) -> Result<(ConfusionMatrix, MetricSet)> {
    let preds: Vec<Label> = scores.iter().map(|&s| threshold(s)).collect();
    let cm = confusion(labels, &preds)?;
    Ok((cm, metrics(&cm, scores, labels)))
}
