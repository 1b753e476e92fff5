//! Logistic regression fitted by full-batch gradient descent on standardized features.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{AseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub rate: f64,
    pub epochs: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams { rate: 0.1, epochs: 500 }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn linear(w: &[f64], b: f64, x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + b
}

/// Mean log-loss of `sigmoid(w.x + b)` over `data`, features taken as given.
pub fn log_loss(data: &Dataset, w: &[f64], b: f64) -> f64 {
    let total: f64 = (0..data.len())
        .map(|i| {
            let z = linear(w, b, data.row(i));
            let y = f64::from(u8::from(data.label(i)));
            softplus(z) - y * z
        })
        .sum();
    total / data.len() as f64
}

/// Analytic gradient of [`log_loss`] with respect to `(w, b)`.
pub fn log_loss_gradient(data: &Dataset, w: &[f64], b: f64) -> (Vec<f64>, f64) {
    let n = data.len() as f64;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for i in 0..data.len() {
        let x = data.row(i);
        let y = f64::from(u8::from(data.label(i)));
        let r = sigmoid(linear(w, b, x)) - y;
        for (g, xi) in gw.iter_mut().zip(x) {
            *g += r * xi;
        }
        gb += r;
    }
    gw.iter_mut().for_each(|g| *g /= n);
    (gw, gb / n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    mean: Vec<f64>,
    scale: Vec<f64>,
    weights: Vec<f64>,
    bias: f64,
}

impl LogisticRegression {
    pub fn fit(subset: &Dataset, params: LogisticParams) -> Result<Self> {
        if subset.is_empty() {
            return Err(AseError::EmptyDataset);
        }
        if !(params.rate > 0.0 && params.rate.is_finite()) {
            return Err(AseError::invalid("learning rate must be positive"));
        }
        let (mean, scale) = column_stats(subset);
        let mut model = LogisticRegression {
            weights: vec![0.0; subset.dim()],
            bias: 0.0,
            mean,
            scale,
        };
        let standardized = model.standardize_all(subset);
        for _ in 0..params.epochs {
            let (gw, gb) = log_loss_gradient(&standardized, &model.weights, model.bias);
            for (w, g) in model.weights.iter_mut().zip(&gw) {
                *w -= params.rate * g;
            }
            model.bias -= params.rate * gb;
        }
        Ok(model)
    }

    pub fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    fn standardize_all(&self, data: &Dataset) -> Dataset {
        let values = data.rows().flat_map(|r| self.standardize(r)).collect();
        Dataset::from_flat(data.dim(), values, data.labels().to_vec())
            .expect("standardized values of finite inputs are finite")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(linear(&self.weights, self.bias, &self.standardize(x)))
    }
}

/// Per-column mean and standard deviation; a zero deviation is replaced by 1.
fn column_stats(data: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let n = data.len() as f64;
    let mut mean = vec![0.0; data.dim()];
    for r in data.rows() {
        mean.iter_mut().zip(r).for_each(|(m, v)| *m += v);
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; data.dim()];
    for r in data.rows() {
        var.iter_mut()
            .zip(r.iter().zip(&mean))
            .for_each(|(s, (v, m))| *s += (v - m) * (v - m));
    }
    let scale = var
        .into_iter()
        .map(|s| {
            let sd = (s / n).sqrt();
            if sd > 0.0 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    (mean, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Label;

    fn one_d(xs: &[f64], ys: &[u8]) -> Dataset {
        Dataset::new(
            xs.iter().map(|&x| vec![x]).collect(),
            ys.iter().map(|&y| Label::from_bool(y == 1)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_epochs_scores_half() {
        let d = one_d(&[1.0, 2.0, 3.0], &[0, 1, 1]);
        let m = LogisticRegression::fit(&d, LogisticParams { rate: 0.1, epochs: 0 }).unwrap();
        for x in [-5.0, 0.0, 2.0, 100.0] {
            assert_eq!(m.score(&[x]), 0.5);
        }
    }

    #[test]
    fn separable_reaches_full_accuracy() {
        let d = one_d(&[-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0], &[0, 0, 0, 0, 1, 1, 1, 1]);
        let m = LogisticRegression::fit(&d, LogisticParams::default()).unwrap();
        for i in 0..d.len() {
            assert_eq!(m.score(d.row(i)) >= 0.5, d.label(i).is_positive());
        }
    }

    #[test]
    fn gradient_at_origin_matches_finite_difference() {
        let d = one_d(&[1.0, -1.0], &[1, 0]);
        let (gw, gb) = log_loss_gradient(&d, &[0.0], 0.0);
        // r = 0.5 - y: (-0.5 * 1 + 0.5 * -1) / 2
        assert!((gw[0] + 0.5).abs() < 1e-15);
        assert!(gb.abs() < 1e-15);
        let h = 1e-5;
        let fd = (log_loss(&d, &[h], 0.0) - log_loss(&d, &[-h], 0.0)) / (2.0 * h);
        assert!((fd - gw[0]).abs() < 1e-6);
    }

    #[test]
    fn standardized_mean_scores_sigmoid_bias() {
        let d = one_d(&[1.0, 2.0, 3.0, 4.0], &[0, 0, 1, 1]);
        let m = LogisticRegression::fit(&d, LogisticParams::default()).unwrap();
        let at_mean = m.score(&[2.5]);
        assert!((at_mean - sigmoid(m.bias())).abs() < 1e-15);
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
        assert!(softplus(800.0).is_finite());
    }
}
