use std::path::PathBuf;

use ase_core::anomaly::{DetectorConfig, IsolationForestParams};
use ase_core::datasets::SynthSpec;
use ase_core::harness::{HarnessConfig, ModelKind};
use ase_core::learners::{ClassifierConfig, LogisticParams};
use ase_core::{AseConfig, Variant};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ase",
    version,
    about = "Anomaly-scoring based ensembles for imbalanced binary classification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare ASE with the plain base classifier and UnderBagging over repeated splits.
    Benchmark {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Number of ensemble members.
        #[arg(long, default_value_t = 50)]
        members: usize,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Models to run; repeat or comma-separate.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ModelArg::Ase, ModelArg::Base, ModelArg::Underbagging])]
        models: Vec<ModelArg>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Train ASE with components removed and report F1 per variant.
    Ablate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 20)]
        members: usize,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Variants to run; repeat or comma-separate. Defaults to all four.
        #[arg(long, value_enum, value_delimiter = ',')]
        variant: Vec<VariantArg>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Metric series of the partial ensembles built from the first 1..B members.
    Curve {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "max-members", default_value_t = 50)]
        max_members: usize,
        #[arg(long, value_enum, default_value_t = SeriesFormat::Csv)]
        format: SeriesFormat,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write a two-Gaussian synthetic dataset as CSV with a `label` column.
    GenSynth {
        #[arg(long, default_value_t = 1000)]
        negatives: usize,
        #[arg(long, default_value_t = 50)]
        positives: usize,
        #[arg(long, default_value_t = 5)]
        dim: usize,
        #[arg(long, default_value_t = 3.0)]
        separation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: String,
    },
    /// Print instance, feature and class counts of a dataset.
    Summarize {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value_t = SummaryFormat::Text)]
        format: SummaryFormat,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV file to load.
    #[arg(long, required_unless_present = "synth", conflicts_with = "synth")]
    pub data: Option<PathBuf>,
    /// Generate data instead: NEG:POS:DIM:SEPARATION.
    #[arg(long, value_parser = parse_synth)]
    pub synth: Option<(usize, usize, usize, f64)>,
    #[arg(long, default_value_t = 0)]
    pub synth_seed: u64,
    /// Label column, by header name or zero-based index.
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Label value treated as the positive class.
    #[arg(long, default_value = "1", conflicts_with = "positive_if")]
    pub positive_label: String,
    /// Numeric predicate on a column, e.g. "quality >= 7"; replaces --label-column.
    #[arg(long)]
    pub positive_if: Option<String>,
    #[arg(long)]
    pub no_header: bool,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 5)]
    pub bins: usize,
    #[arg(long, default_value_t = 10)]
    pub max_depth: usize,
    /// Contamination schedule range MIN:MAX.
    #[arg(long, default_value = "0.05:0.40", value_parser = parse_range)]
    pub contamination: (f64, f64),
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, value_enum, default_value_t = DetectorArg::Iforest)]
    pub detector: DetectorArg,
    #[arg(long, default_value_t = 100)]
    pub iforest_trees: usize,
    #[arg(long, default_value_t = 256)]
    pub iforest_subsample: usize,
    /// Neighbour rank used by the KNN detector.
    #[arg(long, default_value_t = 5)]
    pub detector_k: usize,
    #[arg(long, value_enum, default_value_t = ClassifierArg::Dt)]
    pub base_classifier: ClassifierArg,
    #[arg(long, default_value_t = 0.1)]
    pub lr_rate: f64,
    #[arg(long, default_value_t = 500)]
    pub lr_epochs: usize,
    /// Neighbours voting in the KNN classifier.
    #[arg(long, default_value_t = 5)]
    pub neighbors: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output path; `-` writes to standard output.
    #[arg(long, short, default_value = "-")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Ase,
    Base,
    Underbagging,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ase => ModelKind::Ase,
            ModelArg::Base => ModelKind::Base,
            ModelArg::Underbagging => ModelKind::UnderBagging,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum VariantArg {
    Full,
    NoAsw,
    NoCew,
    NoBoth,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Full => Variant::Full,
            VariantArg::NoAsw => Variant::NoAsw,
            VariantArg::NoCew => Variant::NoCew,
            VariantArg::NoBoth => Variant::NoBoth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorArg {
    Iforest,
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierArg {
    Dt,
    Lr,
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SummaryFormat {
    Text,
    Json,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected MIN:MAX")?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("{a:?} is not a number"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("{b:?} is not a number"))?;
    Ok((lo, hi))
}

fn parse_synth(s: &str) -> Result<(usize, usize, usize, f64), String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let [neg, pos, dim, sep] = parts.as_slice() else {
        return Err("expected NEG:POS:DIM:SEPARATION".into());
    };
    let int = |v: &str| v.parse::<usize>().map_err(|_| format!("{v:?} is not a count"));
    let sep: f64 = sep.parse().map_err(|_| format!("{sep:?} is not a number"))?;
    Ok((int(neg)?, int(pos)?, int(dim)?, sep))
}

impl DataArgs {
    pub fn synth_spec(&self) -> Option<SynthSpec> {
        self.synth.map(|(negatives, positives, dim, separation)| SynthSpec {
            negatives,
            positives,
            dim,
            separation,
            seed: self.synth_seed,
        })
    }
}

impl ModelArgs {
    pub fn harness(&self, members: usize, repeats: usize) -> HarnessConfig {
        let detector = match self.detector {
            DetectorArg::Iforest => DetectorConfig::IsolationForest(IsolationForestParams {
                trees: self.iforest_trees,
                subsample: self.iforest_subsample,
            }),
            DetectorArg::Knn => DetectorConfig::Knn { k: self.detector_k },
        };
        let classifier = match self.base_classifier {
            ClassifierArg::Dt => ClassifierConfig::DecisionTree {
                max_depth: self.max_depth,
            },
            ClassifierArg::Lr => ClassifierConfig::LogisticRegression(LogisticParams {
                rate: self.lr_rate,
                epochs: self.lr_epochs,
            }),
            ClassifierArg::Knn => ClassifierConfig::Knn {
                neighbors: self.neighbors,
            },
        };
        HarnessConfig {
            ase: AseConfig {
                bins: self.bins,
                members,
                contamination_min: self.contamination.0,
                contamination_max: self.contamination.1,
                detector,
                classifier,
                seed: self.seed,
            },
            train_fraction: self.train_fraction,
            repeats,
            seed: self.seed,
        }
    }
}
