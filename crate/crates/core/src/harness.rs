//! Repeated split/train/evaluate runs and their JSON reports.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{stratified_split, Dataset, Label};
use crate::datasets::{summarize, DatasetSummary};
use crate::ensemble::{train_ablated, train_underbagging, AseConfig, MemberProvenance, Scorer, Variant};
use crate::error::{AseError, Result};
use crate::metrics::{evaluate_scores, metrics, ConfusionMatrix, MetricSet};
use crate::seed::{self, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub ase: AseConfig,
    pub train_fraction: f64,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            ase: AseConfig::default(),
            train_fraction: 0.8,
            repeats: 1,
            seed: 0,
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<()> {
        self.ase.validate()?;
        if self.repeats == 0 {
            return Err(AseError::invalid("repeats must be >= 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(AseError::invalid("train fraction must lie in (0, 1)"));
        }
        Ok(())
    }

    /// `(split seed, model seed)` of repeat `r`.
    pub fn repeat_seeds(&self, r: usize) -> (u64, u64) {
        let base = seed::derive(self.seed, r as u64);
        (seed::stream(base, Stream::Split), seed::stream(base, Stream::Model))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// The anomaly-scored ensemble with the configured detector and base classifier.
    Ase,
    /// The base classifier trained once on the whole training split.
    Base,
    /// Balanced random-undersampling bagging with the same base classifier and member count.
    UnderBagging,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Ase, ModelKind::Base, ModelKind::UnderBagging];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub name: String,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricSet,
    /// Test-split scores, aligned with the run's `test_labels`.
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub detector_ms: f64,
    pub sampling_ms: f64,
    pub classifier_ms: f64,
    pub eval_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub repeat: usize,
    pub split_seed: u64,
    pub model_seed: u64,
    pub train: DatasetSummary,
    pub test: DatasetSummary,
    pub test_labels: Vec<Label>,
    pub models: Vec<ModelResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Vec<MemberProvenance>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Mean over runs where AUC is defined.
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRow {
    pub name: String,
    pub runs: usize,
    pub metrics: MeanMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub source: String,
    #[serde(flatten)]
    pub summary: DatasetSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: HarnessConfig,
    pub models: Vec<String>,
    pub dataset: DatasetInfo,
    pub runs: Vec<SeedRun>,
    pub means: Vec<MeanRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_ms: Option<f64>,
}

impl RunReport {
    pub fn mean(&self, name: &str) -> Option<&MeanMetrics> {
        self.means.iter().find(|m| m.name == name).map(|m| &m.metrics)
    }

    /// Copy with every wall-clock field removed.
    pub fn without_timings(&self) -> RunReport {
        let mut r = self.clone();
        r.total_ms = None;
        r.runs.iter_mut().for_each(|run| run.timings = None);
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks that every stored metric equals its recomputation from the stored
    /// confusion matrix, scores and labels.
    pub fn verify(&self) -> Result<()> {
        for run in &self.runs {
            for m in &run.models {
                let (cm, _) = evaluate_scores(&m.scores, &run.test_labels)?;
                let again = metrics(&m.confusion, &m.scores, &run.test_labels);
                if cm != m.confusion || again != m.metrics {
                    return Err(AseError::invalid(format!(
                        "report metrics for {} (repeat {}) do not recompute",
                        m.name, run.repeat
                    )));
                }
            }
        }
        Ok(())
    }
}

fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn evaluate(name: String, model: &dyn Scorer, test: &Dataset) -> Result<ModelResult> {
    let scores = model.score_dataset(test)?;
    let (confusion, metrics) = evaluate_scores(&scores, test.labels())?;
    Ok(ModelResult {
        name,
        confusion,
        metrics,
        scores,
    })
}

fn mean_rows(runs: &[SeedRun]) -> Vec<MeanRow> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    first
        .models
        .iter()
        .map(|m| {
            let rows: Vec<&MetricSet> = runs
                .iter()
                .filter_map(|r| r.models.iter().find(|x| x.name == m.name))
                .map(|x| &x.metrics)
                .collect();
            let n = rows.len() as f64;
            let avg = |f: fn(&MetricSet) -> f64| rows.iter().map(|m| f(m)).sum::<f64>() / n;
            let aucs: Vec<f64> = rows.iter().filter_map(|m| m.auc).collect();
            MeanRow {
                name: m.name.clone(),
                runs: rows.len(),
                metrics: MeanMetrics {
                    accuracy: avg(|m| m.accuracy),
                    precision: avg(|m| m.precision),
                    recall: avg(|m| m.recall),
                    f1: avg(|m| m.f1),
                    auc: (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64),
                },
            }
        })
        .collect()
}

fn model_label(kind: ModelKind, cfg: &AseConfig) -> String {
    match kind {
        ModelKind::Ase => "ASE".into(),
        ModelKind::Base => cfg.classifier.short_name().into(),
        ModelKind::UnderBagging => "UnderBagging".into(),
    }
}

fn run_repeats<F>(ds: &Dataset, cfg: &HarnessConfig, mut per_run: F) -> Result<Vec<SeedRun>>
where
    F: FnMut(&Dataset, &Dataset, u64, &mut Timings, &mut Option<Vec<MemberProvenance>>) -> Result<Vec<ModelResult>>,
{
    cfg.validate()?;
    (0..cfg.repeats)
        .map(|r| {
            let (split_seed, model_seed) = cfg.repeat_seeds(r);
            let (train, test) = stratified_split(ds, cfg.train_fraction, split_seed)?;
            let mut timings = Timings::default();
            let mut provenance = None;
            let models = per_run(&train, &test, model_seed, &mut timings, &mut provenance)?;
            Ok(SeedRun {
                repeat: r,
                split_seed,
                model_seed,
                train: summarize(&train),
                test: summarize(&test),
                test_labels: test.labels().to_vec(),
                models,
                provenance,
                timings: Some(timings),
            })
        })
        .collect()
}

/// Stratified split per repeat, then each requested model trained and scored on the test side.
pub fn run_benchmark(ds: &Dataset, source: &str, cfg: &HarnessConfig, models: &[ModelKind]) -> Result<RunReport> {
    let start = Instant::now();
    let runs = run_repeats(ds, cfg, |train, test, model_seed, timings, provenance| {
        let ase_cfg = AseConfig {
            seed: model_seed,
            ..cfg.ase.clone()
        };
        let mut out = Vec::new();
        for &kind in models {
            let name = model_label(kind, &ase_cfg);
            let result = match kind {
                ModelKind::Ase => {
                    let model = train_ablated(train, &ase_cfg, Variant::Full)?;
                    timings.detector_ms += ms(model.timings.detector);
                    timings.sampling_ms += ms(model.timings.sampling);
                    timings.classifier_ms += ms(model.timings.classifier);
                    *provenance = Some(model.provenance());
                    let t = Instant::now();
                    let r = evaluate(name, &model, test)?;
                    timings.eval_ms += ms(t.elapsed());
                    r
                }
                ModelKind::Base => {
                    let t = Instant::now();
                    let model = ase_cfg.classifier.fit(train)?;
                    timings.classifier_ms += ms(t.elapsed());
                    let t = Instant::now();
                    let r = evaluate(name, &model, test)?;
                    timings.eval_ms += ms(t.elapsed());
                    r
                }
                ModelKind::UnderBagging => {
                    let t = Instant::now();
                    let model = train_underbagging(train, ase_cfg.members, &ase_cfg.classifier, model_seed)?;
                    timings.classifier_ms += ms(t.elapsed());
                    let t = Instant::now();
                    let r = evaluate(name, &model, test)?;
                    timings.eval_ms += ms(t.elapsed());
                    r
                }
            };
            out.push(result);
        }
        Ok(out)
    })?;
    Ok(RunReport {
        command: "benchmark".into(),
        config: cfg.clone(),
        models: models.iter().map(|&k| model_label(k, &cfg.ase)).collect(),
        dataset: DatasetInfo {
            source: source.into(),
            summary: summarize(ds),
        },
        means: mean_rows(&runs),
        runs,
        total_ms: Some(ms(start.elapsed())),
    })
}

/// Each variant trained on the same splits and model seeds; rows are named by variant.
pub fn run_ablation(ds: &Dataset, source: &str, cfg: &HarnessConfig, variants: &[Variant]) -> Result<RunReport> {
    let start = Instant::now();
    let runs = run_repeats(ds, cfg, |train, test, model_seed, timings, _| {
        let ase_cfg = AseConfig {
            seed: model_seed,
            ..cfg.ase.clone()
        };
        variants
            .iter()
            .map(|&v| {
                let model = train_ablated(train, &ase_cfg, v)?;
                timings.detector_ms += ms(model.timings.detector);
                timings.sampling_ms += ms(model.timings.sampling);
                timings.classifier_ms += ms(model.timings.classifier);
                let t = Instant::now();
                let r = evaluate(v.name().into(), &model, test)?;
                timings.eval_ms += ms(t.elapsed());
                Ok(r)
            })
            .collect()
    })?;
    Ok(RunReport {
        command: "ablate".into(),
        config: cfg.clone(),
        models: variants.iter().map(|v| v.name().to_string()).collect(),
        dataset: DatasetInfo {
            source: source.into(),
            summary: summarize(ds),
        },
        means: mean_rows(&runs),
        runs,
        total_ms: Some(ms(start.elapsed())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub members: usize,
    pub auc: Option<f64>,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub config: HarnessConfig,
    pub dataset: DatasetInfo,
    pub points: Vec<CurvePoint>,
}

impl CurveReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("members,auc,f1\n");
        for p in &self.points {
            let auc = p.auc.map_or_else(String::new, |a| format!("{a:?}"));
            s.push_str(&format!("{},{},{:?}\n", p.members, auc, p.f1));
        }
        s
    }
}

/// Trains once with `cfg.ase.members` members on the first repeat's split and scores
/// every prefix ensemble of the first `m` members.
pub fn run_curve(ds: &Dataset, source: &str, cfg: &HarnessConfig) -> Result<CurveReport> {
    cfg.validate()?;
    let (split_seed, model_seed) = cfg.repeat_seeds(0);
    let (train, test) = stratified_split(ds, cfg.train_fraction, split_seed)?;
    let ase_cfg = AseConfig {
        seed: model_seed,
        ..cfg.ase.clone()
    };
    let model = train_ablated(&train, &ase_cfg, Variant::Full)?;
    let points = model
        .prefix_scores(&test)?
        .into_iter()
        .enumerate()
        .map(|(m, scores)| {
            let (_, metrics) = evaluate_scores(&scores, test.labels())?;
            Ok(CurvePoint {
                members: m + 1,
                auc: metrics.auc,
                f1: metrics.f1,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CurveReport {
        config: cfg.clone(),
        dataset: DatasetInfo {
            source: source.into(),
            summary: summarize(ds),
        },
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{generate_synth, SynthSpec};

    fn data() -> Dataset {
        generate_synth(&SynthSpec {
            negatives: 400,
            positives: 30,
            dim: 3,
            separation: 2.0,
            seed: 1,
        })
        .unwrap()
    }

    fn cfg(repeats: usize) -> HarnessConfig {
        HarnessConfig {
            ase: AseConfig {
                members: 6,
                ..AseConfig::default()
            },
            repeats,
            seed: 5,
            ..HarnessConfig::default()
        }
    }

    #[test]
    fn benchmark_structure() {
        let report = run_benchmark(&data(), "synth", &cfg(3), &ModelKind::ALL).unwrap();
        assert_eq!(report.runs.len(), 3);
        assert_eq!(report.models, vec!["ASE", "DT", "UnderBagging"]);
        assert_eq!(report.means.len(), 3);
        assert!(report
            .runs
            .iter()
            .all(|r| r.provenance.as_ref().map(Vec::len) == Some(6)));
        report.verify().unwrap();
    }

    #[test]
    fn benchmark_deterministic_modulo_timings() {
        let a = run_benchmark(&data(), "synth", &cfg(2), &ModelKind::ALL).unwrap();
        let b = run_benchmark(&data(), "synth", &cfg(2), &ModelKind::ALL).unwrap();
        assert_eq!(
            a.without_timings().to_json().unwrap(),
            b.without_timings().to_json().unwrap()
        );
    }

    #[test]
    fn tampered_report_fails_verification() {
        let mut report = run_benchmark(&data(), "synth", &cfg(1), &[ModelKind::Base]).unwrap();
        report.runs[0].models[0].metrics.f1 += 0.01;
        assert!(report.verify().is_err());
    }

    #[test]
    fn curve_matches_benchmark_at_full_size() {
        let c = cfg(1);
        let curve = run_curve(&data(), "synth", &c).unwrap();
        assert_eq!(curve.points.len(), 6);
        let bench = run_benchmark(&data(), "synth", &c, &[ModelKind::Ase]).unwrap();
        assert_eq!(curve.points[5].auc, bench.runs[0].models[0].metrics.auc);
        assert_eq!(curve.points[5].f1, bench.runs[0].models[0].metrics.f1);
        assert!(curve.to_csv().starts_with("members,auc,f1\n1,"));
    }

    #[test]
    fn single_member_curve() {
        let mut c = cfg(1);
        c.ase.members = 1;
        let curve = run_curve(&data(), "synth", &c).unwrap();
        assert_eq!(curve.points.len(), 1);
    }

    #[test]
    fn ablation_rows_per_variant() {
        let report = run_ablation(&data(), "synth", &cfg(2), &Variant::ALL).unwrap();
        assert_eq!(report.models, vec!["full", "no_asw", "no_cew", "no_both"]);
        assert!(report.runs.iter().all(|r| r.models.len() == 4));
        report.verify().unwrap();
        let single = run_ablation(&data(), "synth", &cfg(1), &[Variant::Full]).unwrap();
        assert_eq!(single.means.len(), 1);
    }
}
