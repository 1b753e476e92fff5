//! Anomaly-scoring based undersampling ensembles for highly imbalanced binary
//! classification.
//!
//! An anomaly detector scores every training row; rows are binned by normalized
//! score, majority rows are undersampled per bin, and each ensemble member is
//! weighted by how well its detector isolates the minority class and the class
//! overlap region. See [`ensemble::train_ase`] for the end-to-end pipeline.
//!
//! ```
//! use ase_core::datasets::{generate_synth, SynthSpec};
//! use ase_core::{stratified_split, train_ase, AseConfig, Scorer};
//!
//! # fn main() -> ase_core::Result<()> {
//! let ds = generate_synth(&SynthSpec { negatives: 400, positives: 30, dim: 3, separation: 3.0, seed: 7 })?;
//! let (train, test) = stratified_split(&ds, 0.8, 1)?;
//! let model = train_ase(&train, &AseConfig { members: 10, ..AseConfig::default() })?;
//! let scores = model.score_dataset(&test)?;
//! assert_eq!(scores.len(), test.len());
//! # Ok(())
//! # }
//! ```

pub mod anomaly;
pub mod data;
pub mod datasets;
pub mod ensemble;
pub mod error;
pub mod harness;
pub mod learners;
pub mod metrics;
pub mod sampler;
pub mod seed;
pub mod weighting;

pub use data::{imbalance_ratio, stratified_split, Dataset, Label, Sample};
pub use ensemble::{
    contamination_schedule, predict_score, train_ablated, train_ase, train_underbagging, AseConfig, AseModel, Scorer,
    Variant,
};
pub use error::{AseError, Result};
pub use metrics::{confusion, metrics, roc_auc, ConfusionMatrix, MetricSet};
