//! Distance-to-k-th-neighbour outlier detector (exact brute-force search, O(n^2) on the training set).

use crate::data::Dataset;
use crate::error::{AseError, Result};

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone)]
pub struct KnnDetector {
    train: Dataset,
    k: usize,
}

impl KnnDetector {
    pub fn fit(train: &Dataset, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(AseError::invalid("knn detector needs k >= 1"));
        }
        if k >= train.len() {
            return Err(AseError::invalid(format!(
                "knn detector needs more than k = {k} training samples, got {}",
                train.len()
            )));
        }
        Ok(KnnDetector {
            train: train.clone(),
            k,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Distance from `x` to its k-th nearest training point.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        self.train.check_dim(x)?;
        Ok(self.kth_distance(x, None))
    }

    /// Raw scores of the training points, each excluding itself.
    pub fn training_scores(&self) -> Vec<f64> {
        (0..self.train.len())
            .map(|i| self.kth_distance(self.train.row(i), Some(i)))
            .collect()
    }

    fn kth_distance(&self, x: &[f64], skip: Option<usize>) -> f64 {
        let mut d: Vec<f64> = (0..self.train.len())
            .filter(|&j| Some(j) != skip)
            .map(|j| squared_distance(x, self.train.row(j)))
            .collect();
        let (_, kth, _) = d.select_nth_unstable_by(self.k - 1, f64::total_cmp);
        kth.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Label;

    fn line(points: &[f64]) -> Dataset {
        Dataset::new(
            points.iter().map(|&p| vec![p]).collect(),
            vec![Label::Negative; points.len()],
        )
        .unwrap()
    }

    #[test]
    fn collinear_points() {
        let det = KnnDetector::fit(&line(&[0.0, 1.0, 10.0]), 1).unwrap();
        assert_eq!(det.training_scores(), vec![1.0, 1.0, 9.0]);
    }

    #[test]
    fn duplicate_probe_scores_zero() {
        let det = KnnDetector::fit(&line(&[0.0, 1.0, 10.0]), 1).unwrap();
        assert_eq!(det.score(&[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn scaling_doubles_scores() {
        let pts = [0.0, 0.7, 2.5, 3.1, 9.0, -4.0];
        let base = KnnDetector::fit(&line(&pts), 2).unwrap().training_scores();
        let doubled: Vec<f64> = pts.iter().map(|p| p * 2.0).collect();
        let scaled = KnnDetector::fit(&line(&doubled), 2).unwrap().training_scores();
        for (a, b) in base.iter().zip(&scaled) {
            assert!((2.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn k_must_be_below_sample_count() {
        assert!(KnnDetector::fit(&line(&[0.0, 1.0, 2.0]), 3).is_err());
        assert!(KnnDetector::fit(&line(&[0.0, 1.0, 2.0]), 0).is_err());
    }
}
