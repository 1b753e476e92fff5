//! Member weights from the detector's training-set confusion matrix.
//!
//! The weight is the product of a recall term, `ln(|P| / FN)`, and the entropy of
//! the TP/FP split among flagged rows. A detector whose outliers are a balanced
//! mix of both classes has found the overlap region and earns a larger weight.

use serde::{Deserialize, Serialize};

use crate::metrics::ConfusionMatrix;

/// Floor on FN so a perfect-recall detector keeps a finite weight.
pub const FN_FLOOR: f64 = 0.5;

/// `ln(|P| / max(FN, 0.5))`, i.e. `ln(1 / (1 - recall))` with a half-count floor.
pub fn contamination_c(cm: &ConfusionMatrix, positive_total: usize) -> f64 {
    if positive_total == 0 {
        return 0.0;
    }
    let fn_ = (cm.fn_ as f64).max(FN_FLOOR);
    (positive_total as f64 / fn_).ln().max(0.0)
}

/// Binary entropy (nats) of `TP / (TP + FP)`; zero when nothing is flagged.
pub fn entropy_e(cm: &ConfusionMatrix) -> f64 {
    let flagged = cm.tp + cm.fp;
    if flagged == 0 {
        return 0.0;
    }
    let t = cm.tp as f64 / flagged as f64;
    -(xlnx(t) + xlnx(1.0 - t))
}

fn xlnx(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CewBreakdown {
    pub c_value: f64,
    pub e_value: f64,
    pub cew: f64,
    pub recall: f64,
    pub source_cm: ConfusionMatrix,
}

pub fn cew(cm: &ConfusionMatrix, positive_total: usize) -> CewBreakdown {
    let c_value = contamination_c(cm, positive_total);
    let e_value = entropy_e(cm);
    CewBreakdown {
        c_value,
        e_value,
        cew: c_value * e_value,
        recall: cm.recall(),
        source_cm: *cm,
    }
}
