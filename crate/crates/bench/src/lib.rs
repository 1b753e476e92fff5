//! Fixtures shared by the benchmarks.

use ase_core::data::Dataset;
use ase_core::datasets::{generate_synth, SynthSpec};

/// Overlapping Gaussian classes at the given imbalance ratio.
pub fn imbalanced(negatives: usize, ir: usize, dim: usize, seed: u64) -> Dataset {
    generate_synth(&SynthSpec {
        negatives,
        positives: (negatives / ir).max(2),
        dim,
        separation: 2.0,
        seed,
    })
    .expect("valid synthetic spec")
}
