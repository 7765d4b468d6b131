//! Spectral simulator for the dynamics of N weakly interacting bosons on a
//! torus.
//!
//! The crate integrates three coupled descriptions of the same gas and
//! benchmarks them against each other:
//!
//! * [`hartree`] — the condensate wavefunction u(t) under the nonlinear
//!   Hartree equation with the energy-compatible phase;
//! * [`bogoliubov`] and [`fock`] — the fluctuations around the condensate,
//!   either as the (gamma, alpha) one-body/pairing matrices of a quasi-free
//!   state or as a full vector on a particle-number-truncated Fock space
//!   driven by the quadratic fluctuation Hamiltonian;
//! * [`nbody`] — the exact N-boson Schrodinger evolution on the same mode
//!   basis, the unitary excitation map that splits an N-body state into
//!   condensate powers times orthogonal excitation blocks, and the norm
//!   error between the exact state and the condensate + fluctuation ansatz.
//!
//! [`harness`] drives parameter sweeps over (N, beta), fits the decay of
//! the squared norm error in N, and writes CSV / JSON-lines / plot-data
//! reports. Everything is deterministic given a seed.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `bosegas` binary for the command-line interface.

pub mod error;
pub mod linalg;
pub mod ode;
pub mod sparse;
pub mod spectral;
pub mod hartree;
pub mod bogoliubov;
pub mod fock;
pub mod nbody;
pub mod harness;

pub use error::{Error, Result};
