//! Density-threshold combinatorics: the base-case LP family, the witness
//! search for decreasing density matrices, and the small-modulus checks.

mod adversary;
mod local;
mod lpgen;
mod matrix;
mod thresholds;

pub use adversary::{
    adversary_lp, adversary_modulus, small_moduli_adversary_check, AdversaryCase, AdversaryReport, BindingRow,
};
pub use local::{
    best_decompositions, local_theorem_property_test, theorem82_property_test, Decomposition, LocalFailure,
    LocalPropertyReport, UnitSquareFunctions,
};
pub use lpgen::*;
pub use matrix::{
    lemma71_property_test, lemma72_property_test, lemma_conclusion_search, mix_toward_ones, sample_hypothesis_matrix,
    trial_seed, DensityMatrix, MatrixFailure, MatrixPropertyReport, SamplerMode,
};
pub use thresholds::{threshold_big_d, threshold_d, ThresholdTable};
