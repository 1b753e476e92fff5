//! Labelled numeric datasets and stratified splitting.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{AseError, Result};
use crate::seed;

/// Binary class tag. The minority class is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Label {
    Negative = 0,
    Positive = 1,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> u8 {
        l as u8
    }
}

impl TryFrom<u8> for Label {
    type Error = AseError;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Label::Negative),
            1 => Ok(Label::Positive),
            other => Err(AseError::invalid(format!("label must be 0 or 1, got {other}"))),
        }
    }
}

/// Borrowed view of one labelled row.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub features: &'a [f64],
    pub label: Label,
}

/// Immutable table of finite feature vectors with binary labels.
///
/// Rows are stored contiguously in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    labels: Vec<Label>,
    dim: usize,
    positives: usize,
}

impl Dataset {
    /// Builds a dataset from row vectors, rejecting ragged rows and non-finite values.
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(AseError::LengthMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        let dim = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(AseError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(dim, values, labels)
    }

    /// Builds a dataset from a row-major buffer of `labels.len() * dim` values.
    pub fn from_flat(dim: usize, values: Vec<f64>, labels: Vec<Label>) -> Result<Self> {
        if values.len() != labels.len() * dim {
            return Err(AseError::LengthMismatch {
                left: values.len(),
                right: labels.len() * dim,
            });
        }
        if dim == 0 && !labels.is_empty() {
            return Err(AseError::invalid("dataset must have at least one feature"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(AseError::NonFinite {
                row: pos / dim,
                column: pos % dim,
            });
        }
        let positives = labels.iter().filter(|l| l.is_positive()).count();
        Ok(Dataset {
            values,
            labels,
            dim,
            positives,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn positive_count(&self) -> usize {
        self.positives
    }

    pub fn negative_count(&self) -> usize {
        self.labels.len() - self.positives
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn sample(&self, i: usize) -> Sample<'_> {
        Sample {
            features: self.row(i),
            label: self.labels[i],
        }
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        // chunks_exact panics on 0; dim is only 0 for empty datasets
        self.values.chunks_exact(self.dim.max(1))
    }

    pub fn positive_indices(&self) -> Vec<usize> {
        self.class_indices(Label::Positive)
    }

    pub fn negative_indices(&self) -> Vec<usize> {
        self.class_indices(Label::Negative)
    }

    fn class_indices(&self, class: Label) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == class).collect()
    }

    /// New dataset holding the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut values = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        let positives = labels.iter().filter(|l| l.is_positive()).count();
        Dataset {
            values,
            labels,
            dim: self.dim,
            positives,
        }
    }

    pub(crate) fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(AseError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// `|N| / |P|`.
pub fn imbalance_ratio(ds: &Dataset) -> Result<f64> {
    if ds.positive_count() == 0 {
        return Err(AseError::NoPositives);
    }
    Ok(ds.negative_count() as f64 / ds.positive_count() as f64)
}

/// Per-class random split: `round(fraction * class_size)` rows of each class go to
/// the training side, clamped so each side keeps at least one row of each class.
/// Both sides keep the original row order.
pub fn stratified_split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(AseError::invalid(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    for (class, count) in [("positive", ds.positive_count()), ("negative", ds.negative_count())] {
        if count < 2 {
            return Err(AseError::TooFewSamples {
                class,
                count,
                required: 2,
            });
        }
    }

    let mut rng = seed::rng(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for mut class_idx in [ds.negative_indices(), ds.positive_indices()] {
        let n_train = ((train_fraction * class_idx.len() as f64).round() as usize).clamp(1, class_idx.len() - 1);
        class_idx.shuffle(&mut rng);
        train_idx.extend_from_slice(&class_idx[..n_train]);
        test_idx.extend_from_slice(&class_idx[n_train..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((ds.select(&train_idx), ds.select(&test_idx)))
}
