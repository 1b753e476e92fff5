//! Score-interval binning and per-bin majority undersampling.
//!
//! The training set is cut into `k` equal-width intervals of the normalized
//! anomaly score. Each bin gets a weight from its size (`ln |B|` over the sum of
//! `ln |B|`), and a distance factor `d` from its midpoint to the contamination
//! boundary `1 - c`. The number of majority rows drawn from bin `l` is
//! `|N| * asw_l * d_l / sum(d)`, rounded and capped at what the bin holds.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::anomaly::AnomalyScoring;
use crate::data::Dataset;
use crate::error::{AseError, Result};
use crate::seed;

/// Clamp on the bin-to-boundary distance.
pub const D_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinPartition {
    pub k: usize,
    /// Training-set row indices per bin, ascending.
    pub bins: Vec<Vec<usize>>,
    pub majority_per_bin: Vec<usize>,
    pub asw: Vec<f64>,
    pub d: Vec<f64>,
    pub n: Vec<usize>,
}

impl BinPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.bins.iter().map(Vec::len).collect()
    }

    pub fn total_draw(&self) -> usize {
        self.n.iter().sum()
    }
}

/// Zero-based bin of a normalized score: `min(floor(s * k), k - 1)`.
pub fn bin_index(score: f64, k: usize) -> usize {
    ((score * k as f64).floor().max(0.0) as usize).min(k - 1)
}

/// Assigns every training row to its score interval. Weights and counts are left empty.
pub fn split_bins(scoring: &AnomalyScoring, train: &Dataset, k: usize) -> Result<BinPartition> {
    if k < 2 {
        return Err(AseError::invalid(format!("bin count must be >= 2, got {k}")));
    }
    if scoring.scores.len() != train.len() {
        return Err(AseError::LengthMismatch {
            left: scoring.scores.len(),
            right: train.len(),
        });
    }
    let mut bins = vec![Vec::new(); k];
    for (j, &s) in scoring.scores.iter().enumerate() {
        bins[bin_index(s, k)].push(j);
    }
    Ok(with_bins(bins, train))
}

/// Equal-frequency bins: rows sorted by score (ties by index) and cut into `k`
/// chunks whose sizes differ by at most one.
pub fn split_quantile_bins(scoring: &AnomalyScoring, train: &Dataset, k: usize) -> Result<BinPartition> {
    if k < 2 {
        return Err(AseError::invalid(format!("bin count must be >= 2, got {k}")));
    }
    let s = &scoring.scores;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(a.cmp(&b)));
    let bins = equal_shares(order.len(), k)
        .into_iter()
        .scan(0, |start, len| {
            let mut chunk = order[*start..*start + len].to_vec();
            chunk.sort_unstable();
            *start += len;
            Some(chunk)
        })
        .collect();
    Ok(with_bins(bins, train))
}

fn with_bins(bins: Vec<Vec<usize>>, train: &Dataset) -> BinPartition {
    let majority_per_bin = bins
        .iter()
        .map(|b| b.iter().filter(|&&j| !train.label(j).is_positive()).count())
        .collect();
    BinPartition {
        k: bins.len(),
        bins,
        majority_per_bin,
        asw: Vec::new(),
        d: Vec::new(),
        n: Vec::new(),
    }
}

/// `total` split into `parts` near-equal shares, larger shares first.
pub fn equal_shares(total: usize, parts: usize) -> Vec<usize> {
    (0..parts)
        .map(|i| total / parts + usize::from(i < total % parts))
        .collect()
}

/// Bin weights from bin sizes: `ln |B_l| / sum ln |B_l'|` over bins with at least
/// two rows; bins with zero or one row get weight 0.
///
/// When no bin holds two rows the weights fall back to uniform over non-empty bins.
pub fn compute_asw(sizes: &[usize]) -> Vec<f64> {
    let logs: Vec<f64> = sizes
        .iter()
        .map(|&s| if s >= 2 { (s as f64).ln() } else { 0.0 })
        .collect();
    let total: f64 = logs.iter().sum();
    if total > 0.0 {
        return logs.iter().map(|l| l / total).collect();
    }
    let nonempty = sizes.iter().filter(|&&s| s > 0).count();
    sizes
        .iter()
        .map(|&s| if s > 0 { 1.0 / nonempty as f64 } else { 0.0 })
        .collect()
}

/// Reciprocal distance from each bin midpoint `(l - 1/2) / k` to the boundary `1 - c`,
/// with the distance clamped at [`D_EPSILON`].
pub fn compute_d(k: usize, c: f64) -> Vec<f64> {
    let kf = k as f64;
    (1..=k)
        .map(|l| {
            let mid = l as f64 / kf - 1.0 / (2.0 * kf);
            1.0 / (mid - (1.0 - c)).abs().max(D_EPSILON)
        })
        .collect()
}

/// Unrounded draw counts `|N| * asw_l * d_l / sum(d)`.
pub fn raw_counts(asw: &[f64], d: &[f64], negative_total: usize) -> Vec<f64> {
    let d_sum: f64 = d.iter().sum();
    asw.iter()
        .zip(d)
        .map(|(a, dl)| negative_total as f64 * a * dl / d_sum)
        .collect()
}

/// Integer draw counts: rounded half-up, at least one for a weighted bin that holds
/// majority rows, and never more than the bin's majority count.
pub fn compute_n(asw: &[f64], d: &[f64], majority_per_bin: &[usize], negative_total: usize) -> Vec<usize> {
    raw_counts(asw, d, negative_total)
        .into_iter()
        .zip(asw)
        .zip(majority_per_bin)
        .map(|((raw, &w), &avail)| {
            let lower = usize::from(avail >= 1 && w > 0.0);
            ((raw + 0.5).floor() as usize).clamp(lower, avail.max(lower))
        })
        .collect()
}

/// Bins, weights, distances and counts for one contamination setting.
pub fn partition(scoring: &AnomalyScoring, train: &Dataset, k: usize) -> Result<BinPartition> {
    let mut p = split_bins(scoring, train, k)?;
    p.asw = compute_asw(&p.sizes());
    p.d = compute_d(k, scoring.contamination);
    p.n = compute_n(&p.asw, &p.d, &p.majority_per_bin, train.negative_count());
    Ok(p)
}

/// Quantile bins with a fixed total majority draw spread evenly over bins.
///
/// A bin that cannot supply its share passes the remainder to bins with spare rows.
pub fn quantile_partition(
    scoring: &AnomalyScoring,
    train: &Dataset,
    k: usize,
    total_draw: usize,
) -> Result<BinPartition> {
    let mut p = split_quantile_bins(scoring, train, k)?;
    let mut n = equal_shares(total_draw.min(train.negative_count()), k);
    let mut spill = 0;
    for (nl, &avail) in n.iter_mut().zip(&p.majority_per_bin) {
        if *nl > avail {
            spill += *nl - avail;
            *nl = avail;
        }
    }
    while spill > 0 {
        let before = spill;
        for (nl, &avail) in n.iter_mut().zip(&p.majority_per_bin) {
            if spill > 0 && *nl < avail {
                *nl += 1;
                spill -= 1;
            }
        }
        if spill == before {
            break;
        }
    }
    p.asw = vec![1.0 / k as f64; k];
    p.d = vec![1.0; k];
    p.n = n;
    Ok(p)
}

/// Row indices (ascending) of the undersampled subset: `n_l` majority rows drawn
/// without replacement from each bin, plus every minority row.
pub fn subset_indices(p: &BinPartition, train: &Dataset, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    let mut chosen: Vec<usize> = train.positive_indices();
    for (bin, &take) in p.bins.iter().zip(&p.n) {
        let majority: Vec<usize> = bin.iter().copied().filter(|&j| !train.label(j).is_positive()).collect();
        let take = take.min(majority.len());
        chosen.extend(
            index::sample(&mut rng, majority.len(), take)
                .into_iter()
                .map(|i| majority[i]),
        );
    }
    chosen.sort_unstable();
    chosen
}

pub fn build_subset(p: &BinPartition, train: &Dataset, seed: u64) -> Dataset {
    train.select(&subset_indices(p, train, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anomaly::apply_contamination;
    use crate::data::Label;

    fn scored(scores: &[f64], labels: &[Label], c: f64) -> (AnomalyScoring, Dataset) {
        let rows = scores.iter().map(|&s| vec![s]).collect();
        let ds = Dataset::new(rows, labels.to_vec()).unwrap();
        (apply_contamination(scores, labels, c).unwrap(), ds)
    }

    #[test]
    fn bin_index_examples() {
        assert_eq!(bin_index(0.55, 5) + 1, 3);
        assert_eq!(bin_index(1.0, 5) + 1, 5);
        assert_eq!(bin_index(0.0, 5), 0);
        assert_eq!(bin_index(0.2, 5), 1);
    }

    #[test]
    fn uniform_scores_two_per_bin() {
        let scores: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
        let (s, ds) = scored(&scores, &[Label::Negative; 10], 0.2);
        let p = split_bins(&s, &ds, 5).unwrap();
        assert_eq!(p.sizes(), vec![2; 5]);
        assert!(split_bins(&s, &ds, 1).is_err());
    }

    #[test]
    fn asw_powers_of_two() {
        let w = compute_asw(&[2, 4, 8]);
        for (a, b) in w.iter().zip([1.0 / 6.0, 1.0 / 3.0, 0.5]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(compute_asw(&[7, 7]), vec![0.5, 0.5]);
    }

    #[test]
    fn asw_skips_small_bins() {
        let w = compute_asw(&[1, 10, 0, 100, 5]);
        let total = 10f64.ln() + 100f64.ln() + 5f64.ln();
        let want = [0.0, 10f64.ln() / total, 0.0, 100f64.ln() / total, 5f64.ln() / total];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn asw_degenerate_fallback() {
        assert_eq!(compute_asw(&[1, 0, 1, 1]), vec![1.0 / 3.0, 0.0, 1.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn d_examples() {
        assert!((compute_d(5, 0.2)[0] - 1.0 / 0.7).abs() < 1e-12);
        assert!((compute_d(5, 0.1)[4] - 1e6).abs() < 1e-3);
        let d = compute_d(2, 0.5);
        assert!((d[0] - 4.0).abs() < 1e-9 && (d[1] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn n_examples() {
        let raw = raw_counts(&[0.25, 0.75], &[1.0, 3.0], 100);
        assert!((raw[0] - 6.25).abs() < 1e-12 && (raw[1] - 56.25).abs() < 1e-12);
        assert_eq!(compute_n(&[0.25, 0.75], &[1.0, 3.0], &[100, 100], 100), vec![6, 56]);
        // caps: empty bin and limited bin
        assert_eq!(compute_n(&[0.25, 0.75], &[1.0, 3.0], &[0, 10], 100), vec![0, 10]);
        // floor of one for a weighted bin with majority rows
        assert_eq!(compute_n(&[0.001, 0.999], &[1.0, 1.0], &[5, 100], 100), vec![1, 50]);
    }

    #[test]
    fn subset_extremes() {
        let labels: Vec<Label> = (0..25).map(|i| Label::from_bool(i % 5 == 0)).collect();
        let scores: Vec<f64> = (0..25).map(|i| i as f64 / 24.0).collect();
        let (s, ds) = scored(&scores, &labels, 0.2);
        let mut p = partition(&s, &ds, 5).unwrap();

        p.n = vec![0; 5];
        let sub = build_subset(&p, &ds, 1);
        assert_eq!((sub.len(), sub.positive_count()), (5, 5));

        p.n = p.majority_per_bin.clone();
        assert_eq!(build_subset(&p, &ds, 1), ds);
    }

    #[test]
    fn quantile_bins_equal_shares() {
        let labels: Vec<Label> = (0..53).map(|i| Label::from_bool(i % 9 == 0)).collect();
        let scores: Vec<f64> = (0..53).map(|i| ((i * 37) % 53) as f64 / 52.0).collect();
        let (s, ds) = scored(&scores, &labels, 0.1);
        let p = quantile_partition(&s, &ds, 5, 20).unwrap();
        let sizes = p.sizes();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert_eq!(p.total_draw(), 20);
        assert!(p.n.iter().max().unwrap() - p.n.iter().min().unwrap() <= 1);
    }

    #[test]
    fn quantile_draw_spills_over_short_bins() {
        let labels: Vec<Label> = (0..20).map(|i| Label::from_bool(i >= 16)).collect();
        let scores: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
        let (s, ds) = scored(&scores, &labels, 0.1);
        // last bin holds only positives
        let p = quantile_partition(&s, &ds, 5, 16).unwrap();
        assert_eq!(p.n, vec![4, 4, 4, 4, 0]);
    }
}
