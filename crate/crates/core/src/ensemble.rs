//! The anomaly-scored undersampling ensemble, its ablations, and the
//! random-undersampling baseline.
//!
//! Member `i` of `b` runs one pipeline: fit the detector, normalize its training
//! scores, flag the top `c_i` fraction, bin by score, draw majority rows per bin,
//! add every minority row, fit the base classifier, and weight it by the
//! detector's training confusion matrix. Members are independent and are trained
//! in parallel; results are collected in member order.

use std::time::{Duration, Instant};

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anomaly::{apply_contamination, normalize_scores, AnomalyScoring, DetectorConfig};
use crate::data::{imbalance_ratio, Dataset};
use crate::error::{AseError, Result};
use crate::learners::{BaseClassifier, ClassifierConfig};
use crate::sampler::{self, BinPartition};
use crate::seed::{self, Stream};
use crate::weighting::{self, CewBreakdown};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AseConfig {
    pub bins: usize,
    pub members: usize,
    pub contamination_min: f64,
    pub contamination_max: f64,
    pub detector: DetectorConfig,
    pub classifier: ClassifierConfig,
    pub seed: u64,
}

impl Default for AseConfig {
    fn default() -> Self {
        AseConfig {
            bins: 5,
            members: 50,
            contamination_min: 0.05,
            contamination_max: 0.40,
            detector: DetectorConfig::default(),
            classifier: ClassifierConfig::default(),
            seed: 0,
        }
    }
}

impl AseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(AseError::invalid(format!("bins must be >= 2, got {}", self.bins)));
        }
        if self.members == 0 {
            return Err(AseError::invalid("members must be >= 1"));
        }
        let (lo, hi) = (self.contamination_min, self.contamination_max);
        if !(lo > 0.0 && lo <= hi && hi < 1.0) {
            return Err(AseError::invalid(format!(
                "contamination range must satisfy 0 < min <= max < 1, got {lo}:{hi}"
            )));
        }
        self.detector.validate()?;
        self.classifier.validate()
    }
}

/// Linear ramp from `c_min` to `c_max` over `b` members; one member gets the midpoint.
pub fn contamination_schedule(b: usize, c_min: f64, c_max: f64) -> Vec<f64> {
    match b {
        0 => Vec::new(),
        1 => vec![(c_min + c_max) / 2.0],
        _ => (0..b)
            .map(|i| c_min + i as f64 / (b - 1) as f64 * (c_max - c_min))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Full,
    NoAsw,
    NoCew,
    NoBoth,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Full, Variant::NoAsw, Variant::NoCew, Variant::NoBoth];

    pub fn uses_asw(self) -> bool {
        matches!(self, Variant::Full | Variant::NoCew)
    }

    pub fn uses_cew(self) -> bool {
        matches!(self, Variant::Full | Variant::NoAsw)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::NoAsw => "no_asw",
            Variant::NoCew => "no_cew",
            Variant::NoBoth => "no_both",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = AseError;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| AseError::invalid(format!("unknown variant {s:?}")))
    }
}

/// Wall-clock time spent per pipeline stage, summed over members.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub detector: Duration,
    pub sampling: Duration,
    pub classifier: Duration,
}

impl std::ops::AddAssign for StageTimings {
    fn add_assign(&mut self, o: Self) {
        self.detector += o.detector;
        self.sampling += o.sampling;
        self.classifier += o.classifier;
    }
}

/// Everything needed to inspect how one member was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberProvenance {
    pub index: usize,
    pub seed: u64,
    pub contamination: f64,
    pub threshold: f64,
    pub outliers: usize,
    pub cew: CewBreakdown,
    pub weight: f64,
    pub bin_sizes: Vec<usize>,
    pub majority_per_bin: Vec<usize>,
    pub asw: Vec<f64>,
    pub d: Vec<f64>,
    pub n: Vec<usize>,
    pub subset_size: usize,
    pub subset_positives: usize,
    /// Absent when the subset has no positives.
    pub subset_ir: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct WeightedMember {
    pub classifier: BaseClassifier,
    pub weight: f64,
    pub provenance: MemberProvenance,
}

#[derive(Debug, Clone)]
pub struct AseModel {
    pub members: Vec<WeightedMember>,
    pub config: AseConfig,
    pub variant: Variant,
    pub timings: StageTimings,
}

/// Common scoring surface of every trained model.
pub trait Scorer: Sync {
    fn dim(&self) -> usize;

    fn score_unchecked(&self, x: &[f64]) -> f64;

    fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(AseError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.score_unchecked(x))
    }

    fn score_dataset(&self, ds: &Dataset) -> Result<Vec<f64>> {
        if ds.dim() != self.dim() && !ds.is_empty() {
            return Err(AseError::DimensionMismatch {
                expected: self.dim(),
                got: ds.dim(),
            });
        }
        Ok((0..ds.len())
            .into_par_iter()
            .map(|i| self.score_unchecked(ds.row(i)))
            .collect())
    }
}

impl Scorer for BaseClassifier {
    fn dim(&self) -> usize {
        BaseClassifier::dim(self)
    }

    fn score_unchecked(&self, x: &[f64]) -> f64 {
        BaseClassifier::score_unchecked(self, x)
    }
}

/// Weighted average `sum(w * s) / sum(w)`, or the plain mean when the weights sum to zero.
pub fn soft_vote(scores: &[f64], weights: &[f64]) -> f64 {
    let (mut num, mut den, mut plain) = (0.0, 0.0, 0.0);
    for (&s, &w) in scores.iter().zip(weights) {
        num += w * s;
        den += w;
        plain += s;
    }
    if den > 0.0 {
        num / den
    } else {
        plain / scores.len() as f64
    }
}

impl AseModel {
    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.weight).collect()
    }

    pub fn provenance(&self) -> Vec<MemberProvenance> {
        self.members.iter().map(|m| m.provenance.clone()).collect()
    }

    /// Scores of every member on every row, member-major.
    pub fn member_scores(&self, ds: &Dataset) -> Result<Vec<Vec<f64>>> {
        self.members.iter().map(|m| m.classifier.score_dataset(ds)).collect()
    }

    /// Ensemble scores of the first `m` members for `m = 1..=b`, outer index `m - 1`.
    pub fn prefix_scores(&self, ds: &Dataset) -> Result<Vec<Vec<f64>>> {
        let per_member = self.member_scores(ds)?;
        let rows = ds.len();
        let mut num = vec![0.0; rows];
        let mut den = 0.0;
        let mut plain = vec![0.0; rows];
        let mut out = Vec::with_capacity(self.members.len());
        for (m, (member, scores)) in self.members.iter().zip(&per_member).enumerate() {
            den += member.weight;
            for j in 0..rows {
                num[j] += member.weight * scores[j];
                plain[j] += scores[j];
            }
            let count = (m + 1) as f64;
            out.push(
                (0..rows)
                    .map(|j| if den > 0.0 { num[j] / den } else { plain[j] / count })
                    .collect(),
            );
        }
        Ok(out)
    }
}

impl Scorer for AseModel {
    fn dim(&self) -> usize {
        self.members[0].classifier.dim()
    }

    fn score_unchecked(&self, x: &[f64]) -> f64 {
        let scores: Vec<f64> = self.members.iter().map(|m| m.classifier.score_unchecked(x)).collect();
        let weights: Vec<f64> = self.members.iter().map(|m| m.weight).collect();
        soft_vote(&scores, &weights)
    }
}

/// Ensemble score of `x` in [0, 1].
pub fn predict_score(model: &AseModel, x: &[f64]) -> Result<f64> {
    model.score(x)
}

fn check_trainable(train: &Dataset) -> Result<()> {
    for (class, count) in [
        ("positive", train.positive_count()),
        ("negative", train.negative_count()),
    ] {
        if count < 2 {
            return Err(AseError::TooFewSamples {
                class,
                count,
                required: 2,
            });
        }
    }
    Ok(())
}

pub fn train_ase(train: &Dataset, config: &AseConfig) -> Result<AseModel> {
    train_ablated(train, config, Variant::Full)
}

struct Scored {
    scoring: AnomalyScoring,
    partition: BinPartition,
    elapsed: Duration,
}

/// Trains the ensemble with ASW binning and/or CEW weighting switched off.
///
/// Without ASW, each member bins at score quantiles and draws an equal number of
/// majority rows per bin, with the total set to the mean draw the full rule would
/// have made across members. Without CEW, every member weighs `1 / b`.
pub fn train_ablated(train: &Dataset, config: &AseConfig, variant: Variant) -> Result<AseModel> {
    config.validate()?;
    check_trainable(train)?;
    let b = config.members;
    let schedule = contamination_schedule(b, config.contamination_min, config.contamination_max);
    let member_seeds: Vec<u64> = (0..b).map(|i| seed::derive(config.seed, i as u64)).collect();

    // a seed-independent detector is fitted once and shared
    let shared_raw = if config.detector.is_randomized() {
        None
    } else {
        let start = Instant::now();
        Some((config.detector.training_scores(train, 0)?, start.elapsed()))
    };

    let mut scored: Vec<Scored> = (0..b)
        .into_par_iter()
        .map(|i| {
            let start = Instant::now();
            let normalized = match &shared_raw {
                Some((raw, _)) => normalize_scores(raw),
                None => {
                    let raw = config
                        .detector
                        .training_scores(train, seed::stream(member_seeds[i], Stream::Detector))?;
                    normalize_scores(&raw)
                }
            };
            let scoring = apply_contamination(&normalized, train.labels(), schedule[i])?;
            let partition = sampler::partition(&scoring, train, config.bins)?;
            Ok(Scored {
                scoring,
                partition,
                elapsed: start.elapsed(),
            })
        })
        .enumerate()
        .map(|(i, r): (usize, Result<Scored>)| r.map_err(|e| e.in_member(i)))
        .collect::<Result<_>>()?;

    if !variant.uses_asw() {
        let mean_draw = scored.iter().map(|s| s.partition.total_draw()).sum::<usize>() as f64 / b as f64;
        let target = mean_draw.round() as usize;
        for (i, s) in scored.iter_mut().enumerate() {
            s.partition =
                sampler::quantile_partition(&s.scoring, train, config.bins, target).map_err(|e| e.in_member(i))?;
        }
    }

    let positive_total = train.positive_count();
    let built: Vec<(WeightedMember, StageTimings)> = scored
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| {
            let t0 = Instant::now();
            let idx = sampler::subset_indices(&s.partition, train, seed::stream(member_seeds[i], Stream::Sampler));
            let subset = train.select(&idx);
            let t1 = Instant::now();
            let classifier = config.classifier.fit(&subset).map_err(|e| e.in_member(i))?;
            let t2 = Instant::now();

            let cew = weighting::cew(&s.scoring.train_cm, positive_total);
            let weight = if variant.uses_cew() { cew.cew } else { 1.0 / b as f64 };
            let provenance = MemberProvenance {
                index: i,
                seed: member_seeds[i],
                contamination: schedule[i],
                threshold: s.scoring.threshold,
                outliers: s.scoring.outlier_count(),
                cew,
                weight,
                bin_sizes: s.partition.sizes(),
                majority_per_bin: s.partition.majority_per_bin.clone(),
                asw: s.partition.asw.clone(),
                d: s.partition.d.clone(),
                n: s.partition.n.clone(),
                subset_size: subset.len(),
                subset_positives: subset.positive_count(),
                subset_ir: imbalance_ratio(&subset).ok(),
            };
            let timings = StageTimings {
                detector: s.elapsed,
                sampling: t1 - t0,
                classifier: t2 - t1,
            };
            Ok((
                WeightedMember {
                    classifier,
                    weight,
                    provenance,
                },
                timings,
            ))
        })
        .collect::<Result<_>>()?;

    let mut timings = StageTimings::default();
    if let Some((_, elapsed)) = shared_raw {
        timings.detector += elapsed;
    }
    let mut members = Vec::with_capacity(b);
    for (m, t) in built {
        timings += t;
        members.push(m);
    }
    Ok(AseModel {
        members,
        config: config.clone(),
        variant,
        timings,
    })
}

/// Bagging over balanced random undersamples, uniformly weighted.
#[derive(Debug, Clone)]
pub struct UnderBaggingModel {
    pub members: Vec<BaseClassifier>,
    pub subset_sizes: Vec<usize>,
}

impl Scorer for UnderBaggingModel {
    fn dim(&self) -> usize {
        self.members[0].dim()
    }

    fn score_unchecked(&self, x: &[f64]) -> f64 {
        self.members.iter().map(|m| m.score_unchecked(x)).sum::<f64>() / self.members.len() as f64
    }
}

/// Each member sees `|P|` majority rows drawn without replacement plus every minority row.
pub fn train_underbagging(
    train: &Dataset,
    members: usize,
    classifier: &ClassifierConfig,
    seed: u64,
) -> Result<UnderBaggingModel> {
    check_trainable(train)?;
    if members == 0 {
        return Err(AseError::invalid("members must be >= 1"));
    }
    let negatives = train.negative_indices();
    let positives = train.positive_indices();
    let take = positives.len().min(negatives.len());
    let built: Vec<(BaseClassifier, usize)> = (0..members)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng(seed::stream(seed::derive(seed, i as u64), Stream::Sampler));
            let mut idx = positives.clone();
            idx.extend(
                index::sample(&mut rng, negatives.len(), take)
                    .into_iter()
                    .map(|k| negatives[k]),
            );
            idx.sort_unstable();
            let subset = train.select(&idx);
            let model = classifier.fit(&subset).map_err(|e| e.in_member(i))?;
            Ok((model, subset.len()))
        })
        .collect::<Result<_>>()?;
    let (members, subset_sizes) = built.into_iter().unzip();
    Ok(UnderBaggingModel { members, subset_sizes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{generate_synth, SynthSpec};

    fn synth(seed: u64) -> Dataset {
        generate_synth(&SynthSpec {
            negatives: 300,
            positives: 20,
            dim: 3,
            separation: 2.5,
            seed,
        })
        .unwrap()
    }

    fn small_config() -> AseConfig {
        AseConfig {
            members: 8,
            ..AseConfig::default()
        }
    }

    #[test]
    fn schedule_examples() {
        let s = contamination_schedule(50, 0.05, 0.40);
        assert_eq!(s.len(), 50);
        assert!((s[0] - 0.05).abs() < 1e-15 && (s[49] - 0.40).abs() < 1e-15);
        assert!((s[1] - s[0] - 0.35 / 49.0).abs() < 1e-12);
        assert_eq!(contamination_schedule(2, 0.05, 0.40), vec![0.05, 0.40]);
        assert!((contamination_schedule(1, 0.05, 0.40)[0] - 0.225).abs() < 1e-15);
    }

    #[test]
    fn soft_vote_examples() {
        assert!((soft_vote(&[0.2, 0.6], &[1.0, 3.0]) - 0.5).abs() < 1e-15);
        assert_eq!(soft_vote(&[0.3, 0.3, 0.3], &[0.1, 5.0, 2.0]), 0.3);
        assert!((soft_vote(&[0.2, 0.6], &[0.0, 0.0]) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn single_member_keeps_minority() {
        let ds = synth(1);
        let cfg = AseConfig {
            members: 1,
            ..AseConfig::default()
        };
        let model = train_ase(&ds, &cfg).unwrap();
        assert_eq!(model.members.len(), 1);
        assert_eq!(model.members[0].provenance.subset_positives, ds.positive_count());
        assert!((model.members[0].provenance.contamination - 0.225).abs() < 1e-15);
    }

    #[test]
    fn training_is_reproducible() {
        let ds = synth(2);
        let a = train_ase(&ds, &small_config()).unwrap();
        let b = train_ase(&ds, &small_config()).unwrap();
        assert_eq!(a.weights(), b.weights());
        assert_eq!(a.provenance(), b.provenance());
        assert_eq!(a.score_dataset(&ds).unwrap(), b.score_dataset(&ds).unwrap());
    }

    #[test]
    fn weights_rescale_invariant() {
        let ds = synth(3);
        let mut model = train_ase(&ds, &small_config()).unwrap();
        let before = model.score_dataset(&ds).unwrap();
        for m in &mut model.members {
            m.weight *= 4.0;
        }
        let after = model.score_dataset(&ds).unwrap();
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn no_cew_weights_uniform() {
        let ds = synth(4);
        let model = train_ablated(&ds, &small_config(), Variant::NoCew).unwrap();
        assert!(model.weights().iter().all(|&w| w == 1.0 / 8.0));
    }

    #[test]
    fn no_asw_equal_draws() {
        let ds = synth(5);
        let model = train_ablated(&ds, &small_config(), Variant::NoAsw).unwrap();
        for m in &model.members {
            let n = &m.provenance.n;
            assert!(n.iter().max().unwrap() - n.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn prefix_scores_end_at_full_ensemble() {
        let ds = synth(6);
        let model = train_ase(&ds, &small_config()).unwrap();
        let prefix = model.prefix_scores(&ds).unwrap();
        assert_eq!(prefix.len(), 8);
        assert_eq!(prefix[7], model.score_dataset(&ds).unwrap());
        assert_eq!(prefix[0], model.members[0].classifier.score_dataset(&ds).unwrap());
    }

    #[test]
    fn underbagging_balanced_subsets() {
        let ds = synth(7);
        let model = train_underbagging(&ds, 5, &ClassifierConfig::default(), 3).unwrap();
        assert!(model.subset_sizes.iter().all(|&s| s == 2 * ds.positive_count()));
        let again = train_underbagging(&ds, 5, &ClassifierConfig::default(), 3).unwrap();
        assert_eq!(model.score_dataset(&ds).unwrap(), again.score_dataset(&ds).unwrap());
    }

    #[test]
    fn invalid_config_rejected() {
        let ds = synth(8);
        for cfg in [
            AseConfig {
                bins: 1,
                ..small_config()
            },
            AseConfig {
                members: 0,
                ..small_config()
            },
            AseConfig {
                contamination_min: 0.5,
                contamination_max: 0.2,
                ..small_config()
            },
        ] {
            assert!(train_ase(&ds, &cfg).is_err());
        }
    }

    #[test]
    fn knn_detector_pipeline() {
        let ds = synth(9);
        let cfg = AseConfig {
            detector: DetectorConfig::Knn { k: 5 },
            ..small_config()
        };
        let model = train_ase(&ds, &cfg).unwrap();
        assert_eq!(model.members.len(), 8);
        assert!(model.weights().iter().all(|&w| w >= 0.0));
    }
}
