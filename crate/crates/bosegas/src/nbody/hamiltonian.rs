//! Exact N-boson dynamics on the momentum-truncated torus.
//!
//! The Hamiltonian sum_j -Lap_j + 1/(N-1) sum_{j<k} w_N(x_j - x_k) is
//! assembled in second-quantized form on the N-particle shell of the
//! occupation basis: dGamma(-Lap) plus the momentum-conserving quartic
//! sum (1 / 2(N-1)) sum_{j+k=l+m} L^{-d} w_hat(j-l) a^dag_j a^dag_k a_l a_m.

use std::sync::Arc;

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::linalg;
use crate::ode;
use crate::sparse::{SparseBuilder, SparseOp};
use crate::spectral::{ModeBasis, ScaledPotential};

/// Amplitudes on the N-particle sector (the top shell of a graded basis
/// with nmax = N).
#[derive(Debug, Clone)]
pub struct NBodyVector {
    pub basis: Arc<FockBasis>,
    pub n_particles: usize,
    pub amps: Array1<C64>,
}

impl NBodyVector {
    pub fn new(basis: Arc<FockBasis>, n_particles: usize, amps: Array1<C64>) -> Result<Self> {
        if basis.nmax() < n_particles {
            return Err(Error::ShapeMismatch(format!(
                "basis cutoff {} below particle number {n_particles}",
                basis.nmax()
            )));
        }
        if amps.len() != basis.shell_dim(n_particles) {
            return Err(Error::ShapeMismatch(format!(
                "sector dimension {} but got {} amplitudes",
                basis.shell_dim(n_particles),
                amps.len()
            )));
        }
        Ok(NBodyVector { basis, n_particles, amps })
    }

    pub fn zeros(basis: Arc<FockBasis>, n_particles: usize) -> Result<Self> {
        let dim = basis.shell_dim(n_particles);
        Self::new(basis, n_particles, Array1::zeros(dim))
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amps)
    }

    pub fn inner(&self, other: &NBodyVector) -> C64 {
        linalg::inner(&self.amps, &other.amps)
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amps.mapv_inplace(|z| z / n);
        }
        self
    }

    /// Global (graded-basis) index of local sector entry i.
    pub fn global_index(&self, i: usize) -> usize {
        self.basis.shell_range(self.n_particles).start + i
    }
}

/// Interaction quartets (j, k, l, m) with j + k = l + m, grouped by the
/// annihilated pair (l, m), each with its coefficient w_hat(j - l) / L^d.
fn quartet_table(
    mode_basis: &ModeBasis,
    potential: &ScaledPotential,
) -> Vec<Vec<(usize, usize, f64)>> {
    let m_count = mode_basis.n_modes();
    let inv_vol = 1.0 / mode_basis.volume();
    let mut table = vec![Vec::new(); m_count * m_count];
    let mut sum = vec![0i64; mode_basis.dimension()];
    for l in 0..m_count {
        for m in 0..m_count {
            let entry = &mut table[l * m_count + m];
            for (s, (a, b)) in sum
                .iter_mut()
                .zip(mode_basis.mode(l).iter().zip(mode_basis.mode(m).iter()))
            {
                *s = a + b;
            }
            for j in 0..m_count {
                let kvec: Vec<i64> = sum
                    .iter()
                    .zip(mode_basis.mode(j).iter())
                    .map(|(s, kj)| s - kj)
                    .collect();
                if let Some(k) = mode_basis.index_of(&kvec) {
                    let coeff = inv_vol * potential.w_hat_at(mode_basis.transfer(j, l));
                    if coeff != 0.0 {
                        entry.push((j, k, coeff));
                    }
                }
            }
        }
    }
    table
}

/// Assemble H_N on the N-particle sector.
pub fn assemble_hn(
    n_particles: usize,
    mode_basis: &ModeBasis,
    potential: &ScaledPotential,
    basis: &Arc<FockBasis>,
    budget: usize,
) -> Result<SparseOp> {
    if n_particles < 2 {
        return Err(Error::InvalidParameter("N must be >= 2".into()));
    }
    potential.ensure_basis(mode_basis)?;
    if basis.n_modes() != mode_basis.n_modes() {
        return Err(Error::BasisMismatch(
            "Fock basis mode count differs from the mode basis".into(),
        ));
    }
    let dim = basis.shell_dim(n_particles);
    if dim > budget {
        return Err(Error::MemoryBudget { requested: dim, budget });
    }
    let shell = basis.shell_range(n_particles);
    let offset = shell.start;
    let m_count = mode_basis.n_modes();
    let table = quartet_table(mode_basis, potential);
    let coupling = 1.0 / (2.0 * (n_particles as f64 - 1.0));

    let mut b = SparseBuilder::new(dim, dim);
    let mut scratch: Vec<u32> = vec![0; m_count];
    for local in 0..dim {
        let occ = basis.occupation(offset + local);
        // kinetic diagonal
        let kin: f64 = occ
            .iter()
            .enumerate()
            .map(|(k, &n)| n as f64 * mode_basis.kinetic(k))
            .sum();
        b.push(local, local, C64::new(kin, 0.0));
        // quartic interaction
        for l in 0..m_count {
            if occ[l] == 0 {
                continue;
            }
            for m in 0..m_count {
                if occ[m] == 0 || (m == l && occ[l] < 2) {
                    continue;
                }
                for &(j, k, coeff) in &table[l * m_count + m] {
                    scratch.copy_from_slice(occ);
                    let mut amp = (scratch[m] as f64).sqrt();
                    scratch[m] -= 1;
                    amp *= (scratch[l] as f64).sqrt();
                    scratch[l] -= 1;
                    amp *= (scratch[k] as f64 + 1.0).sqrt();
                    scratch[k] += 1;
                    amp *= (scratch[j] as f64 + 1.0).sqrt();
                    scratch[j] += 1;
                    let target = basis.index_of(&scratch).expect("momentum conserving");
                    b.push(target - offset, local, C64::new(coupling * coeff * amp, 0.0));
                }
            }
        }
    }
    Ok(b.build())
}

#[derive(Debug, Clone)]
pub struct NBodyEvolveOptions {
    pub dt: f64,
    pub step_check_tol: Option<f64>,
}

impl Default for NBodyEvolveOptions {
    fn default() -> Self {
        NBodyEvolveOptions { dt: 2e-3, step_check_tol: Some(1e-8) }
    }
}

#[derive(Debug, Clone)]
pub struct NBodyTrajectory {
    pub basis: Arc<FockBasis>,
    pub n_particles: usize,
    pub times: Vec<f64>,
    pub states: Vec<Array1<C64>>,
    pub max_norm_drift: f64,
    pub max_energy_drift: f64,
}

impl NBodyTrajectory {
    pub fn state_at(&self, t: f64) -> Result<NBodyVector> {
        let i = self
            .times
            .iter()
            .position(|&ti| (ti - t).abs() < 1e-9)
            .ok_or(Error::TrajectoryOutOfRange(t))?;
        NBodyVector::new(self.basis.clone(), self.n_particles, self.states[i].clone())
    }
}

/// Evolve psi0 under the (time-independent) sector Hamiltonian, storing
/// the state at exactly the requested times (ascending, >= 0). Norm and
/// energy drift relative to the initial state are monitored.
pub fn evolve_nbody(
    psi0: &NBodyVector,
    hn: &SparseOp,
    store_times: &[f64],
    options: &NBodyEvolveOptions,
) -> Result<NBodyTrajectory> {
    if store_times.is_empty() {
        return Err(Error::InsufficientSamples("no store times requested".into()));
    }
    if store_times.windows(2).any(|w| w[1] <= w[0]) || store_times[0] < 0.0 {
        return Err(Error::InsufficientSamples(
            "store times must be ascending and nonnegative".into(),
        ));
    }
    if hn.rows != psi0.amps.len() {
        return Err(Error::ShapeMismatch("operator does not match sector".into()));
    }
    let norm0 = psi0.norm();
    if norm0 == 0.0 {
        return Err(Error::NotNormalized(1.0));
    }
    let energy = |amps: &Array1<C64>| -> f64 {
        let h_amps = hn.apply(amps);
        let num = linalg::inner(amps, &h_amps).re;
        let den: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        num / den
    };
    let e0 = energy(&psi0.amps);
    let e_scale = e0.abs().max(1.0);

    let mut f = |_t: f64, y: &Array1<C64>| -> Result<Array1<C64>> {
        let mut out = hn.apply(y);
        out.mapv_inplace(|z| -C64::i() * z);
        Ok(out)
    };

    let mut amps = psi0.amps.clone();
    let mut t = 0.0;
    let mut times = Vec::with_capacity(store_times.len());
    let mut states = Vec::with_capacity(store_times.len());
    let mut max_norm_drift = 0.0_f64;
    let mut max_energy_drift = 0.0_f64;
    for &target in store_times {
        let span = target - t;
        if span > 0.0 {
            let steps = ode::step_count(span, options.dt);
            let dt = span / steps as f64;
            for s in 0..steps {
                amps = ode::rk4_macro_step(
                    &mut f,
                    t + s as f64 * dt,
                    dt,
                    &amps,
                    options.step_check_tol,
                )?;
            }
            t = target;
        }
        max_norm_drift = max_norm_drift.max((linalg::norm(&amps) - norm0).abs());
        max_energy_drift = max_energy_drift.max(((energy(&amps) - e0) / e_scale).abs());
        times.push(target);
        states.push(amps.clone());
    }

    Ok(NBodyTrajectory {
        basis: psi0.basis.clone(),
        n_particles: psi0.n_particles,
        times,
        states,
        max_norm_drift,
        max_energy_drift,
    })
}

/// Expectation of the total momentum (component-wise), a conserved vector.
pub fn total_momentum(psi: &NBodyVector, mode_basis: &ModeBasis) -> Vec<f64> {
    let d = mode_basis.dimension();
    let shell = psi.basis.shell_range(psi.n_particles);
    let mut p = vec![0.0; d];
    for (local, global) in shell.enumerate() {
        let w = psi.amps[local].norm_sqr();
        if w == 0.0 {
            continue;
        }
        let occ = psi.basis.occupation(global);
        for (k, &n) in occ.iter().enumerate() {
            for (axis, pk) in p.iter_mut().enumerate() {
                *pk += w * n as f64 * mode_basis.mode(k)[axis] as f64;
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::CosineBump;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn setup(kmax: i64, amplitude: f64, n: usize) -> (ModeBasis, ScaledPotential, Arc<FockBasis>) {
        let basis = ModeBasis::new(1, TAU, kmax).unwrap();
        let pot = ScaledPotential::build(
            Arc::new(CosineBump::new(amplitude, 1.0).unwrap()),
            0.0,
            n,
            &basis,
        )
        .unwrap();
        let fock = Arc::new(FockBasis::new(basis.n_modes(), n).unwrap());
        (basis, pot, fock)
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn free_hamiltonian_is_kinetic_diagonal() {
        let (basis, pot, fock) = setup(1, 0.0, 3);
        let hn = assemble_hn(3, &basis, &pot, &fock, usize::MAX).unwrap();
        let dense = hn.to_dense();
        let shell = fock.shell_range(3);
        let offset = shell.start;
        for local in 0..fock.shell_dim(3) {
            let occ = fock.occupation(offset + local);
            let expect: f64 = occ
                .iter()
                .enumerate()
                .map(|(k, &n)| n as f64 * basis.kinetic(k))
                .sum();
            for other in 0..fock.shell_dim(3) {
                let want = if other == local { c(expect) } else { c(0.0) };
                assert!((dense[(other, local)] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn hermitian_and_momentum_conserving() {
        let (basis, pot, fock) = setup(1, 1.0, 4);
        let hn = assemble_hn(4, &basis, &pot, &fock, usize::MAX).unwrap();
        let dense = hn.to_dense();
        assert!(linalg::hermiticity_residual(&dense) < 1e-12);
        let offset = fock.shell_range(4).start;
        let momentum = |idx: usize| -> i64 {
            fock.occupation(offset + idx)
                .iter()
                .enumerate()
                .map(|(k, &n)| n as i64 * basis.mode(k)[0])
                .sum()
        };
        for (r, col, v) in hn.iter_entries() {
            if v.norm() > 0.0 {
                assert_eq!(momentum(r), momentum(col), "momentum block violated");
            }
        }
    }

    #[test]
    fn two_body_elements_match_first_quantized_quadrature() {
        // N = 2, M = 3: interaction elements against the first-quantized
        // double integral <phi_{j'k'}|w_N(x - y)|phi_{jk}> on the torus
        let (basis, pot, fock) = setup(1, 1.0, 2);
        let hn = assemble_hn(2, &basis, &pot, &fock, usize::MAX).unwrap();
        let dense = hn.to_dense();
        let shell = fock.shell_range(2);
        let offset = shell.start;
        let dim = fock.shell_dim(2);
        let l = basis.length();

        // symmetrized two-body wavefunction for occupation (n_0, n_1, n_2)
        let wavefn = |occ: &[u32], x: f64, y: f64| -> C64 {
            let modes: Vec<usize> = occ
                .iter()
                .enumerate()
                .flat_map(|(k, &n)| std::iter::repeat(k).take(n as usize))
                .collect();
            let (a, b) = (modes[0], modes[1]);
            if a == b {
                basis.eval_mode(a, &[x]) * basis.eval_mode(b, &[y])
            } else {
                (basis.eval_mode(a, &[x]) * basis.eval_mode(b, &[y])
                    + basis.eval_mode(b, &[x]) * basis.eval_mode(a, &[y]))
                    / 2.0_f64.sqrt()
            }
        };

        // substitute z = x - y: the z-integral runs over the C^1 bump
        // support (composite Simpson), the x-integral over an analytic
        // periodic function (trapezoid, spectrally exact)
        let n_x = 64;
        let n_z = 512;
        let r_support = 1.0;
        for col in 0..dim {
            for row in 0..dim {
                // quadrature of the interaction part only (kinetic is exact)
                let occ_c = fock.occupation(offset + col).to_vec();
                let occ_r = fock.occupation(offset + row).to_vec();
                let x_integral = |z: f64| -> C64 {
                    let mut acc = C64::new(0.0, 0.0);
                    for gx in 0..n_x {
                        let x = l * gx as f64 / n_x as f64;
                        acc += wavefn(&occ_r, x, x - z).conj() * wavefn(&occ_c, x, x - z);
                    }
                    acc * (l / n_x as f64)
                };
                let h = 2.0 * r_support / n_z as f64;
                let f = |z: f64| pot.eval_position(&[z]) * x_integral(z);
                let mut acc = f(-r_support) + f(r_support);
                for i in 1..n_z {
                    let z = -r_support + i as f64 * h;
                    acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(z);
                }
                acc *= h / 3.0;
                // coupling 1/(N-1) = 1 at N = 2
                let mut expect = acc;
                if row == col {
                    let occ = fock.occupation(offset + col);
                    let kin: f64 = occ
                        .iter()
                        .enumerate()
                        .map(|(k, &n)| n as f64 * basis.kinetic(k))
                        .sum();
                    expect += kin;
                }
                assert!(
                    (dense[(row, col)] - expect).norm() < 1e-6,
                    "element ({row},{col}): {} vs {expect}",
                    dense[(row, col)]
                );
            }
        }
    }

    #[test]
    fn eigenvector_evolves_by_phase() {
        let (basis, pot, fock) = setup(1, 1.0, 3);
        let hn = assemble_hn(3, &basis, &pot, &fock, usize::MAX).unwrap();
        let dense = hn.to_dense();
        let (w, v) = linalg::eigh(&dense);
        let idx = 1;
        let psi0 = NBodyVector::new(fock.clone(), 3, v.column(idx).to_owned()).unwrap();
        let t_final = 0.9;
        let traj = evolve_nbody(&psi0, &hn, &[t_final], &NBodyEvolveOptions::default()).unwrap();
        let expect = psi0.amps.mapv(|z| z * (-C64::i() * (w[idx] * t_final)).exp());
        let d: f64 = traj.states[0]
            .iter()
            .zip(expect.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(d < 1e-9, "phase evolution error {d}");
    }

    #[test]
    fn rk4_matches_dense_exponential() {
        let (basis, pot, fock) = setup(1, 1.0, 3);
        let hn = assemble_hn(3, &basis, &pot, &fock, usize::MAX).unwrap();
        let dense = hn.to_dense();
        // generic initial state: equal superposition, normalized
        let dim = fock.shell_dim(3);
        let amps = Array1::from_elem(dim, c(1.0 / (dim as f64).sqrt()));
        let psi0 = NBodyVector::new(fock.clone(), 3, amps).unwrap();
        let t_final = 0.6;
        let traj = evolve_nbody(&psi0, &hn, &[t_final], &NBodyEvolveOptions::default()).unwrap();
        let propagator = linalg::expm_hermitian(&dense, -C64::i() * t_final);
        let expect = propagator.dot(&psi0.amps);
        let d: f64 = traj.states[0]
            .iter()
            .zip(expect.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(d < 1e-7, "propagator mismatch {d}");
        assert!(traj.max_norm_drift < 1e-8);
        assert!(traj.max_energy_drift < 1e-7);
    }

    #[test]
    fn momentum_expectation_conserved() {
        let (basis, pot, fock) = setup(1, 1.0, 3);
        let hn = assemble_hn(3, &basis, &pot, &fock, usize::MAX).unwrap();
        // superpose states with nonzero total momentum
        let dim = fock.shell_dim(3);
        let mut amps: Array1<C64> = Array1::zeros(dim);
        for i in 0..dim {
            amps[i] = C64::new(1.0 + i as f64 * 0.1, 0.2);
        }
        let psi0 = NBodyVector::new(fock.clone(), 3, amps).unwrap().normalized();
        let p0 = total_momentum(&psi0, &basis);
        let traj =
            evolve_nbody(&psi0, &hn, &[0.5], &NBodyEvolveOptions::default()).unwrap();
        let psi1 = traj.state_at(0.5).unwrap();
        let p1 = total_momentum(&psi1, &basis);
        for (a, b) in p0.iter().zip(p1.iter()) {
            assert!((a - b).abs() < 1e-9, "momentum drift {a} -> {b}");
        }
    }

    #[test]
    fn budget_guard() {
        let (basis, pot, fock) = setup(1, 1.0, 4);
        assert!(matches!(
            assemble_hn(4, &basis, &pot, &fock, 3),
            Err(Error::MemoryBudget { .. })
        ));
    }
}
