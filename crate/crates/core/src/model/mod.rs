//! The lambda-model: interactions, Hamiltonians, finite-volume measures, their
//! compatibility, and the Markov-chain view along paths.

mod lambda;
mod markov;
mod measure;
mod profile;

pub use lambda::{EdgeWeights, Interaction, LambdaSpec, LambdaTable, Spin};
pub use markov::{
    default_path_window, marginal_path_measure, oriented_table, path_matrices, stationary_vector,
    transition_matrix, Normalization, TransitionMatrix,
};
pub use measure::{
    check_compatibility, check_family, finite_volume_measure, finite_volume_measure_with_cap, hamiltonian,
    tilted_hamiltonian, tilted_hamiltonian_domain_check, CompatibilityReport, DomainReport,
    FiniteVolumeMeasure, SpinConfiguration, DEFAULT_ENUMERATION_CAP,
};
pub use profile::{marginal_sweep, measure_norm_profile, MarginalNorms, MeasureNorms, NormProfile, Verdict};
