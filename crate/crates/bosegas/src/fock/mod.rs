//! Truncated bosonic Fock space: occupation basis, ladder operators and
//! second quantization, direct evolution under the quadratic fluctuation
//! Hamiltonian, Gaussian state construction, and Wick diagnostics.

mod basis;
mod evolve;
mod gaussian;
mod ops;
mod state;
mod wick;

pub use basis::{binomial, shell_dimension, FockBasis};
pub use evolve::{evolve_fock, hamiltonian_along, FockEvolveOptions, FockSample, FockTrajectory};
pub use gaussian::{extract_one_body, quasifree_from_pair, quasifree_from_pair_with_gate};
pub use ops::{assemble_quadratic, dgamma, ladder_matrices, number_diagonal, pair_create, LadderOps};
pub use state::FockVector;
pub use wick::{moment_check, wick_check, MomentCheck, MomentOutcome, WickReport, WickSampleSpec};
