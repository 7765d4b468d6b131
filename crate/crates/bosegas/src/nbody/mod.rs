//! Exact N-boson dynamics, the excitation map around the condensate, the
//! assembled approximation to the full wavefunction, and the norm-error
//! comparison pipeline.

pub mod compare;
pub mod excitation;
pub mod hamiltonian;
pub mod residual;

pub use compare::{norm_error, run_comparison, ComparisonSetup, ErrorRecord, FluctBackend, NormError};
pub use excitation::{
    blocks_from_fock_state, condensate_ladder, condensate_power, excitation_join,
    excitation_split, CondensateLadder, ExcitationDecomposition,
};
pub use hamiltonian::{
    assemble_hn, evolve_nbody, total_momentum, NBodyEvolveOptions, NBodyTrajectory, NBodyVector,
};
pub use residual::{
    assemble_transformed, excitation_flow, transformed_residual, TransformedOperators,
};
