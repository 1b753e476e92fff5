use crate::anomaly::squared_distance;
use crate::data::Dataset;
use crate::error::{AseError, Result};

/// Vote-fraction k-nearest-neighbours classifier over a stored subset.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnClassifier {
    train: Dataset,
    neighbors: usize,
}

impl KnnClassifier {
    pub fn fit(subset: &Dataset, neighbors: usize) -> Result<Self> {
        if neighbors == 0 {
            return Err(AseError::invalid("knn classifier needs at least one neighbour"));
        }
        if neighbors > subset.len() {
            return Err(AseError::invalid(format!(
                "{neighbors} neighbours requested from a subset of {}",
                subset.len()
            )));
        }
        Ok(KnnClassifier {
            train: subset.clone(),
            neighbors,
        })
    }

    pub fn neighbors(&self) -> usize {
        self.neighbors
    }

    pub fn dim(&self) -> usize {
        self.train.dim()
    }

    /// Fraction of positives among the nearest points; equal distances go to the lower index.
    pub fn score(&self, x: &[f64]) -> f64 {
        let mut dist: Vec<(f64, usize)> = self
            .train
            .rows()
            .enumerate()
            .map(|(j, r)| (squared_distance(x, r), j))
            .collect();
        let k = self.neighbors;
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        let pos = dist[..k]
            .iter()
            .filter(|(_, j)| self.train.label(*j).is_positive())
            .count();
        pos as f64 / k as f64
    }
}
