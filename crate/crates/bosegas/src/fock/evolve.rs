//! Direct integration of the fluctuation dynamics on the truncated Fock
//! space, with a cutoff-leakage monitor on the top particle-number shell.

use std::sync::Arc;

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::bogoliubov::kernels::build_kernels;
use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::fock::ops::assemble_quadratic;
use crate::fock::state::FockVector;
use crate::hartree::HartreeTrajectory;
use crate::ode;
use crate::sparse::SparseOp;
use crate::spectral::{ModeBasis, ScaledPotential};

#[derive(Debug, Clone)]
pub struct FockEvolveOptions {
    pub dt: f64,
    pub step_check_tol: Option<f64>,
    /// Budget for the probability weight in the top shell; exceeding it
    /// flags the run as under-truncated.
    pub leak_budget: f64,
}

impl Default for FockEvolveOptions {
    fn default() -> Self {
        FockEvolveOptions { dt: 1e-3, step_check_tol: Some(1e-9), leak_budget: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct FockSample {
    pub time: f64,
    pub amps: Array1<C64>,
    pub top_shell_weight: f64,
}

#[derive(Debug, Clone)]
pub struct FockTrajectory {
    pub basis: Arc<FockBasis>,
    pub samples: Vec<FockSample>,
    pub max_leak: f64,
    /// True when the top-shell weight exceeded the leak budget at any
    /// macro step: results are reported but the truncation is suspect.
    pub leak_flagged: bool,
}

impl FockTrajectory {
    pub fn final_state(&self) -> FockVector {
        let last = self.samples.last().expect("non-empty");
        FockVector { basis: self.basis.clone(), amps: last.amps.clone() }
    }

    pub fn state_at_sample(&self, i: usize) -> FockVector {
        FockVector { basis: self.basis.clone(), amps: self.samples[i].amps.clone() }
    }

    /// Closest stored sample to time t.
    pub fn sample_index_at(&self, t: f64) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (i, s) in self.samples.iter().enumerate() {
            let d = (s.time - t).abs();
            if d < dist {
                dist = d;
                best = i;
            }
        }
        best
    }
}

/// Integrate i dPhi/dt = H(t) Phi with the operator rebuilt at every
/// integrator stage by `op_at`.
pub fn evolve_fock(
    phi0: &FockVector,
    t_final: f64,
    options: &FockEvolveOptions,
    op_at: &mut dyn FnMut(f64) -> Result<SparseOp>,
) -> Result<FockTrajectory> {
    let norm = phi0.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized((norm - 1.0).abs()));
    }
    let basis = phi0.basis.clone();
    let top_shell = basis.nmax();
    let steps = ode::step_count(t_final, options.dt);
    let dt = t_final / steps as f64;

    let mut cached: Option<(f64, SparseOp)> = None;
    let mut f = |t: f64, y: &Array1<C64>| -> Result<Array1<C64>> {
        let rebuild = match &cached {
            Some((tc, _)) => *tc != t,
            None => true,
        };
        if rebuild {
            cached = Some((t, op_at(t)?));
        }
        let op = &cached.as_ref().unwrap().1;
        let mut out = op.apply(y);
        out.mapv_inplace(|z| -C64::i() * z);
        Ok(out)
    };

    let weight_top = |amps: &Array1<C64>| -> f64 {
        basis.shell_range(top_shell).map(|i| amps[i].norm_sqr()).sum()
    };

    let mut amps = phi0.amps.clone();
    let mut samples = Vec::with_capacity(steps + 1);
    let mut max_leak = weight_top(&amps);
    samples.push(FockSample { time: 0.0, amps: amps.clone(), top_shell_weight: max_leak });
    for n in 0..steps {
        let t = n as f64 * dt;
        amps = ode::rk4_macro_step(&mut f, t, dt, &amps, options.step_check_tol)?;
        let leak = weight_top(&amps);
        max_leak = max_leak.max(leak);
        samples.push(FockSample {
            time: (n + 1) as f64 * dt,
            amps: amps.clone(),
            top_shell_weight: leak,
        });
    }

    Ok(FockTrajectory {
        basis,
        samples,
        max_leak,
        leak_flagged: max_leak > options.leak_budget,
    })
}

/// Generator closure for the fluctuation Hamiltonian along a condensate
/// trajectory: kernels are rebuilt from the interpolated condensate and
/// assembled on the Fock basis.
pub fn hamiltonian_along<'a>(
    hartree: &'a HartreeTrajectory,
    potential: &'a ScaledPotential,
    mode_basis: &'a ModeBasis,
    fock_basis: Arc<FockBasis>,
) -> impl FnMut(f64) -> Result<SparseOp> + 'a {
    move |t: f64| {
        let u = hartree.interpolate(t)?;
        let kernels = build_kernels(&u, potential, mode_basis)?;
        assemble_quadratic(&kernels.h, &kernels.k2, &fock_basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use ndarray::{array, Array2};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn number_eigenvector_acquires_pure_phase() {
        // K2 = 0, diagonal h: |n> evolves by exp(-i E_n t)
        let basis = Arc::new(FockBasis::new(2, 4).unwrap());
        let h = array![[c(0.9), c(0.0)], [c(0.0), c(1.7)]];
        let k2: Array2<C64> = Array2::zeros((2, 2));
        let op = assemble_quadratic(&h, &k2, &basis).unwrap();
        let occ = [2u32, 1u32];
        let energy = 2.0 * 0.9 + 1.7;
        let mut amps: Array1<C64> = Array1::zeros(basis.len());
        amps[basis.index_of(&occ).unwrap()] = c(1.0);
        let phi0 = FockVector::new(basis.clone(), amps).unwrap();
        let t_final = 0.8;
        let traj = evolve_fock(
            &phi0,
            t_final,
            &FockEvolveOptions::default(),
            &mut |_t| Ok(op.clone()),
        )
        .unwrap();
        let expect = (-C64::i() * (energy * t_final)).exp();
        let got = traj.final_state().amps[basis.index_of(&occ).unwrap()];
        assert!((got - expect).norm() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn squeezed_vacuum_occupation_closed_form() {
        // static one-mode generator h a^dag a + kappa/2 (a^dag2 + a2) from
        // the vacuum: <N>(t) = (kappa/omega)^2 sin^2(omega t),
        // omega = sqrt(h^2 - kappa^2)
        let basis = Arc::new(FockBasis::new(1, 24).unwrap());
        let h_val = 1.3;
        let kappa = 0.6;
        let h = array![[c(h_val)]];
        let k2 = array![[c(kappa)]];
        let op = assemble_quadratic(&h, &k2, &basis).unwrap();
        let phi0 = FockVector::vacuum(basis.clone());
        let t_final = 1.5;
        let traj = evolve_fock(
            &phi0,
            t_final,
            &FockEvolveOptions::default(),
            &mut |_t| Ok(op.clone()),
        )
        .unwrap();
        assert!(!traj.leak_flagged, "leak {}", traj.max_leak);
        let omega = (h_val * h_val - kappa * kappa).sqrt();
        for i in [traj.samples.len() / 3, traj.samples.len() - 1] {
            let s = &traj.samples[i];
            let state = FockVector { basis: basis.clone(), amps: s.amps.clone() };
            let expect = (kappa / omega).powi(2) * (omega * s.time).sin().powi(2);
            let got = state.mean_particle_number();
            assert!(
                (got - expect).abs() < 1e-7,
                "t={}: <N> {got} vs {expect}",
                s.time
            );
        }
    }

    #[test]
    fn norm_drift_within_budget() {
        let basis = Arc::new(FockBasis::new(1, 16).unwrap());
        let h = array![[c(1.0)]];
        let k2 = array![[c(0.5)]];
        let op = assemble_quadratic(&h, &k2, &basis).unwrap();
        let phi0 = FockVector::vacuum(basis.clone());
        let traj = evolve_fock(
            &phi0,
            1.0,
            &FockEvolveOptions::default(),
            &mut |_t| Ok(op.clone()),
        )
        .unwrap();
        let n = linalg::norm(&traj.samples.last().unwrap().amps);
        assert!((n - 1.0).abs() < 1e-8);
    }

    #[test]
    fn under_truncation_is_flagged() {
        let basis = Arc::new(FockBasis::new(1, 4).unwrap());
        let h = array![[c(1.0)]];
        let k2 = array![[c(0.9)]]; // strong squeezing against a tiny cutoff
        let op = assemble_quadratic(&h, &k2, &basis).unwrap();
        let phi0 = FockVector::vacuum(basis.clone());
        let traj = evolve_fock(
            &phi0,
            2.0,
            &FockEvolveOptions { step_check_tol: None, ..Default::default() },
            &mut |_t| Ok(op.clone()),
        )
        .unwrap();
        assert!(traj.leak_flagged);
    }
}
