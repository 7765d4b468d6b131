//! Bogoliubov fluctuation dynamics in the one-body picture: the generator
//! kernels, the (gamma, alpha) flow of quasi-free states, and the quadratic
//! ground-state-energy bound.

pub mod gse;
pub mod kernels;
pub mod pair;

pub use gse::{gse_lower_bound, random_admissible_pair, GseBound};
pub use kernels::{build_kernels, KernelSet};
pub use pair::{
    condensate_orthogonality, evolve_pair, kinetic_diagnostic, pair_rhs, PairEvolveOptions,
    PairState, PairTrajectory,
};
