//! End-to-end comparison of the exact N-body evolution against the
//! condensate + fluctuation ansatz: evolve both, reassemble the approximate
//! wavefunction at sample times, and record the squared norm error together
//! with every diagnostic.

use std::sync::Arc;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bogoliubov::{
    evolve_pair, kinetic_diagnostic, PairEvolveOptions, PairState,
};
use crate::error::{Error, Result};
use crate::fock::{
    evolve_fock, extract_one_body, hamiltonian_along, quasifree_from_pair_with_gate, FockBasis,
    FockEvolveOptions, FockVector,
};
use crate::hartree::{evolve_hartree, HartreeOptions};
use crate::linalg;
use crate::nbody::excitation::{blocks_from_fock_state, excitation_join};
use crate::nbody::hamiltonian::{
    assemble_hn, evolve_nbody, NBodyEvolveOptions, NBodyVector,
};
use crate::spectral::{ModeBasis, ScaledPotential};

#[derive(Debug, Clone, Copy)]
pub struct NormError {
    /// Squared Hilbert-space distance, the raw benchmark quantity.
    pub error_sq: f64,
    /// Same with the approximate state renormalized first.
    pub error_sq_normalized: f64,
    /// |<exact, approx>|.
    pub overlap_abs: f64,
    /// The ansatz is reported unnormalized; its norm is part of the record.
    pub approx_norm: f64,
}

/// || exact - approx ||^2 plus overlap and norm bookkeeping. The
/// approximate state is deliberately not renormalized in the raw number.
pub fn norm_error(exact: &NBodyVector, approx: &NBodyVector) -> Result<NormError> {
    if exact.amps.len() != approx.amps.len() || exact.n_particles != approx.n_particles {
        return Err(Error::ShapeMismatch("states live in different sectors".into()));
    }
    let diff_sq: f64 = exact
        .amps
        .iter()
        .zip(approx.amps.iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let overlap = exact.inner(approx);
    let approx_norm = approx.norm();
    let exact_norm = exact.norm();
    let error_sq_normalized = if approx_norm > 0.0 {
        let scale = 1.0 / approx_norm;
        exact_norm * exact_norm + 1.0 - 2.0 * (overlap.re * scale)
    } else {
        exact_norm * exact_norm
    };
    Ok(NormError {
        error_sq: diff_sq,
        error_sq_normalized,
        overlap_abs: overlap.norm(),
        approx_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FluctBackend {
    Fock,
    Pair,
}

impl std::str::FromStr for FluctBackend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fock" => Ok(FluctBackend::Fock),
            "pair" => Ok(FluctBackend::Pair),
            other => Err(Error::Config(format!("unknown backend '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonSetup<'a> {
    pub mode_basis: &'a ModeBasis,
    pub potential: &'a ScaledPotential,
    pub n_particles: usize,
    /// Normalized condensate at t = 0.
    pub u0: Array1<C64>,
    /// Pure pair data of the initial fluctuation state ((0,0) = vacuum).
    pub fluct_initial: PairState,
    /// Particle cutoff for the fluctuation Fock evolution.
    pub fluct_nmax: usize,
    pub t_samples: &'a [f64],
    pub dt_hartree: f64,
    pub dt_fluct: f64,
    pub dt_nbody: f64,
    pub step_check_tol: Option<f64>,
    pub leak_budget: f64,
    pub backend: FluctBackend,
    /// Cap on the N-sector dimension.
    pub sector_budget: usize,
}

/// One benchmark sample: all fields that the sweep reports carry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub t: f64,
    pub n_particles: usize,
    pub beta: f64,
    pub error_sq: f64,
    pub error_sq_normalized: f64,
    pub overlap: f64,
    pub approx_norm: f64,
    pub tr_gamma: f64,
    pub kinetic: f64,
    pub leak_flag: bool,
    pub reprojection_residual: f64,
    pub initial_particles: f64,
    pub initial_kinetic: f64,
    pub status: String,
}

/// Run the full pipeline for one (N, beta) cell.
pub fn run_comparison(setup: &ComparisonSetup) -> Result<Vec<ErrorRecord>> {
    let basis = setup.mode_basis;
    let pot = setup.potential;
    pot.ensure_basis(basis)?;
    let n = setup.n_particles;
    if setup.t_samples.is_empty() {
        return Err(Error::InsufficientSamples("no sample times".into()));
    }
    if setup.t_samples.windows(2).any(|w| w[1] <= w[0]) || setup.t_samples[0] < 0.0 {
        return Err(Error::InsufficientSamples(
            "sample times must be ascending and nonnegative".into(),
        ));
    }
    let t_max = *setup.t_samples.last().unwrap();

    // condensate
    let hartree = evolve_hartree(
        &setup.u0,
        t_max.max(setup.dt_hartree),
        &HartreeOptions {
            dt: setup.dt_hartree,
            step_check_tol: setup.step_check_tol,
            ..Default::default()
        },
        pot,
        basis,
    )?;

    // fluctuation state at t = 0 and its diagnostics
    let fluct_basis = Arc::new(FockBasis::new(basis.n_modes(), setup.fluct_nmax)?);
    let phi0 = quasifree_from_pair_with_gate(&setup.fluct_initial, fluct_basis.clone(), 1e-8)?;
    let initial_particles = setup.fluct_initial.trace_gamma();
    let initial_kinetic = kinetic_diagnostic(&setup.fluct_initial, basis);

    // initial N-body state from the truncated fluctuation vector
    let sector_basis = Arc::new(FockBasis::new(basis.n_modes(), n)?);
    let mut decomp0 = blocks_from_fock_state(&phi0, &setup.u0, n, sector_basis.clone())?;
    let mut reprojection_residual = decomp0.annihilation_check();
    decomp0.project_blocks();
    let psi0 = excitation_join(&decomp0)?;

    // exact evolution, stored at the requested times
    let hn = assemble_hn(n, basis, pot, &sector_basis, setup.sector_budget)?;
    let nbody_traj = evolve_nbody(
        &psi0,
        &hn,
        setup.t_samples,
        &NBodyEvolveOptions { dt: setup.dt_nbody, step_check_tol: setup.step_check_tol },
    )?;

    // fluctuation evolution, segment by segment so samples land exactly
    enum FluctState {
        Fock(FockVector),
        Pair(PairState),
    }
    let mut fluct = match setup.backend {
        FluctBackend::Fock => FluctState::Fock(phi0),
        FluctBackend::Pair => {
            let mut p = setup.fluct_initial.clone();
            p.time = 0.0;
            FluctState::Pair(p)
        }
    };
    let mut leak_flag = false;
    let mut t_prev = 0.0_f64;
    let mut records = Vec::with_capacity(setup.t_samples.len());
    for &t in setup.t_samples.iter() {
        // advance the fluctuation state to t
        if t > t_prev {
            match &mut fluct {
                FluctState::Fock(phi) => {
                    let mut gen =
                        hamiltonian_along(&hartree, pot, basis, fluct_basis.clone());
                    let mut shifted = |tau: f64| gen(tau + t_prev);
                    let traj = evolve_fock(
                        phi,
                        t - t_prev,
                        &FockEvolveOptions {
                            dt: setup.dt_fluct,
                            step_check_tol: setup.step_check_tol,
                            leak_budget: setup.leak_budget,
                        },
                        &mut shifted,
                    )?;
                    leak_flag |= traj.leak_flagged;
                    *phi = traj.final_state();
                }
                FluctState::Pair(pair) => {
                    let traj = evolve_pair(
                        pair,
                        (t_prev, t),
                        &hartree,
                        pot,
                        basis,
                        &PairEvolveOptions {
                            dt: setup.dt_fluct,
                            step_check_tol: setup.step_check_tol,
                        },
                    )?;
                    *pair = traj.final_state().clone();
                }
            }
            t_prev = t;
        }

        // assemble the approximate wavefunction and compare
        let record = (|| -> Result<ErrorRecord> {
            let u_t_raw = hartree.interpolate(t)?;
            let u_norm = linalg::norm(&u_t_raw);
            let u_t = u_t_raw.mapv(|z| z / u_norm);
            let (phi_t, tr_gamma, kinetic) = match &fluct {
                FluctState::Fock(phi) => {
                    let pair = extract_one_body(phi);
                    let tr = pair.trace_gamma();
                    let kin = kinetic_diagnostic(&pair, basis);
                    (phi.clone(), tr, kin)
                }
                FluctState::Pair(pair) => {
                    let gate = 1e-6 * (1.0 + t);
                    let phi = quasifree_from_pair_with_gate(pair, fluct_basis.clone(), gate)?;
                    (phi, pair.trace_gamma(), kinetic_diagnostic(pair, basis))
                }
            };
            let mut decomp = blocks_from_fock_state(&phi_t, &u_t, n, sector_basis.clone())?;
            reprojection_residual = reprojection_residual.max(decomp.annihilation_check());
            decomp.project_blocks();
            let approx = excitation_join(&decomp)?;
            let exact = nbody_traj.state_at(t)?;
            let err = norm_error(&exact, &approx)?;
            Ok(ErrorRecord {
                t,
                n_particles: n,
                beta: pot.beta(),
                error_sq: err.error_sq,
                error_sq_normalized: err.error_sq_normalized,
                overlap: err.overlap_abs,
                approx_norm: err.approx_norm,
                tr_gamma,
                kinetic,
                leak_flag,
                reprojection_residual,
                initial_particles,
                initial_kinetic,
                status: "ok".into(),
            })
        })();
        match record {
            Ok(r) => records.push(r),
            Err(e) => records.push(ErrorRecord {
                t,
                n_particles: n,
                beta: pot.beta(),
                error_sq: f64::NAN,
                error_sq_normalized: f64::NAN,
                overlap: f64::NAN,
                approx_norm: f64::NAN,
                tr_gamma: f64::NAN,
                kinetic: f64::NAN,
                leak_flag,
                reprojection_residual,
                initial_particles,
                initial_kinetic,
                status: format!("failed: {e}"),
            }),
        }
    }
    Ok(records)
}
