//! Quasi-free pair data (gamma, alpha) and its flow under the quadratic
//! fluctuation generator.
//!
//! Conventions: gamma_jk = <a^dag_k a_j> (Hermitian, PSD) and
//! alpha_jk = <a_j a_k> (symmetric). For a pure quasi-free state the purity
//! relation alpha alpha^dag = gamma (1 + gamma) holds and is preserved by
//! the flow. The evolution reads, in matrices,
//!
//! ```text
//! i d/dt gamma = h gamma - gamma h + K2 alpha^dag - alpha K2^dag,
//! i d/dt alpha = h alpha + alpha h^T + K2 + K2 gamma^T + gamma K2,
//! ```
//!
//! the conjugate placements fixed empirically by the Fock-space oracle (see
//! the cross checks in this module's tests and the acceptance suite).

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::bogoliubov::kernels::{build_kernels, KernelSet};
use crate::error::{Error, Result};
use crate::hartree::HartreeTrajectory;
use crate::linalg;
use crate::ode::{self, OdeState};
use crate::spectral::{ModeBasis, ScaledPotential};

#[derive(Debug, Clone)]
pub struct PairState {
    pub time: f64,
    pub gamma: Array2<C64>,
    pub alpha: Array2<C64>,
}

impl PairState {
    pub fn vacuum(n_modes: usize) -> Self {
        PairState {
            time: 0.0,
            gamma: Array2::zeros((n_modes, n_modes)),
            alpha: Array2::zeros((n_modes, n_modes)),
        }
    }

    /// One squeezed mode: gamma = sinh^2 r, alpha = cosh r sinh r.
    pub fn one_mode_squeezed(r: f64) -> Self {
        let mut s = PairState::vacuum(1);
        s.gamma[(0, 0)] = C64::new(r.sinh().powi(2), 0.0);
        s.alpha[(0, 0)] = C64::new(r.cosh() * r.sinh(), 0.0);
        s
    }

    /// Embed a squeezed pair on one mode of a larger basis.
    pub fn squeezed_mode(n_modes: usize, mode: usize, r: f64) -> Self {
        let mut s = PairState::vacuum(n_modes);
        s.gamma[(mode, mode)] = C64::new(r.sinh().powi(2), 0.0);
        s.alpha[(mode, mode)] = C64::new(r.cosh() * r.sinh(), 0.0);
        s
    }

    pub fn n_modes(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn trace_gamma(&self) -> f64 {
        linalg::trace(&self.gamma).re
    }

    pub fn hermiticity_residual(&self) -> f64 {
        linalg::hermiticity_residual(&self.gamma)
    }

    pub fn symmetry_residual(&self) -> f64 {
        linalg::symmetry_residual(&self.alpha)
    }

    /// Max-norm of alpha alpha^dag - gamma (1 + gamma); zero on pure states.
    pub fn purity_residual(&self) -> f64 {
        let ah = linalg::conj_transpose(&self.alpha);
        let aa = self.alpha.dot(&ah);
        let mut gg = self.gamma.dot(&self.gamma);
        gg += &self.gamma;
        linalg::max_abs_diff(&aa, &gg)
    }

    pub fn min_gamma_eigenvalue(&self) -> f64 {
        let (w, _) = linalg::eigh(&self.gamma);
        w[0]
    }

    pub fn check_invariants(&self) -> Result<()> {
        let h = self.hermiticity_residual();
        if h > 1e-8 {
            return Err(Error::ShapeMismatch(format!(
                "gamma not Hermitian: residual {h:e}"
            )));
        }
        let s = self.symmetry_residual();
        if s > 1e-8 {
            return Err(Error::ShapeMismatch(format!(
                "alpha not symmetric: residual {s:e}"
            )));
        }
        let min = self.min_gamma_eigenvalue();
        if min < -1e-8 {
            return Err(Error::ShapeMismatch(format!(
                "gamma not PSD: min eigenvalue {min:e}"
            )));
        }
        Ok(())
    }
}

impl OdeState for PairState {
    fn scaled_add(&mut self, a: f64, other: &Self) {
        self.gamma.zip_mut_with(&other.gamma, |x, y| *x += a * y);
        self.alpha.zip_mut_with(&other.alpha, |x, y| *x += a * y);
        self.time += a * other.time;
    }
    fn dist(&self, other: &Self) -> f64 {
        let dg: f64 = self
            .gamma
            .iter()
            .zip(other.gamma.iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        let da: f64 = self
            .alpha
            .iter()
            .zip(other.alpha.iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        (dg + da).sqrt()
    }
}

/// Right-hand side of the (gamma, alpha) system for the given kernels.
/// The returned pair keeps gamma Hermitian and alpha symmetric.
pub fn pair_rhs(pair: &PairState, kernels: &KernelSet) -> Result<PairState> {
    let m = pair.n_modes();
    if kernels.h.nrows() != m {
        return Err(Error::ShapeMismatch(format!(
            "kernels are {}x{}, pair is {m}x{m}",
            kernels.h.nrows(),
            kernels.h.ncols()
        )));
    }
    let h = &kernels.h;
    let k2 = &kernels.k2;
    let gamma = &pair.gamma;
    let alpha = &pair.alpha;
    let alpha_dag = linalg::conj_transpose(alpha);
    let k2_dag = linalg::conj_transpose(k2);
    let gamma_t = linalg::transpose(gamma);

    // i gamma' = h gamma - gamma h + K2 alpha^dag - alpha K2^dag
    let mut ig = h.dot(gamma);
    ig -= &gamma.dot(h);
    ig += &k2.dot(&alpha_dag);
    ig -= &alpha.dot(&k2_dag);

    // i alpha' = h alpha + alpha h^T + K2 + K2 gamma^T + gamma K2
    let h_t = linalg::transpose(h);
    let mut ia = h.dot(alpha);
    ia += &alpha.dot(&h_t);
    ia += k2;
    ia += &k2.dot(&gamma_t);
    ia += &gamma.dot(k2);

    let minus_i = -C64::i();
    Ok(PairState {
        time: 1.0, // d(time)/dt
        gamma: ig.mapv(|z| minus_i * z),
        alpha: ia.mapv(|z| minus_i * z),
    })
}

#[derive(Debug, Clone)]
pub struct PairEvolveOptions {
    pub dt: f64,
    pub step_check_tol: Option<f64>,
}

impl Default for PairEvolveOptions {
    fn default() -> Self {
        PairEvolveOptions { dt: 1e-3, step_check_tol: Some(1e-9) }
    }
}

#[derive(Debug, Clone)]
pub struct PairTrajectory {
    pub samples: Vec<PairState>,
}

impl PairTrajectory {
    pub fn final_state(&self) -> &PairState {
        self.samples.last().expect("non-empty")
    }

    /// Closest stored sample to time t.
    pub fn sample_at(&self, t: f64) -> &PairState {
        self.samples
            .iter()
            .min_by(|a, b| {
                (a.time - t).abs().partial_cmp(&(b.time - t).abs()).unwrap()
            })
            .expect("non-empty")
    }
}

/// Integrate the (gamma, alpha) system along a condensate trajectory from
/// t_span.0 to t_span.1 (absolute times within the trajectory), rebuilding
/// the kernels from the interpolated condensate at every integrator stage.
pub fn evolve_pair(
    pair0: &PairState,
    t_span: (f64, f64),
    hartree: &HartreeTrajectory,
    potential: &ScaledPotential,
    basis: &ModeBasis,
    options: &PairEvolveOptions,
) -> Result<PairTrajectory> {
    potential.ensure_basis(basis)?;
    if pair0.n_modes() != basis.n_modes() {
        return Err(Error::ShapeMismatch(format!(
            "pair has {} modes, basis has {}",
            pair0.n_modes(),
            basis.n_modes()
        )));
    }
    pair0.check_invariants()?;
    let (t0, t1) = t_span;
    let lo = t0.min(t1);
    let hi = t0.max(t1);
    if hi > hartree.t_end() + 1e-9 || lo < hartree.t_start() - 1e-9 {
        return Err(Error::TrajectoryOutOfRange(t1));
    }

    let steps = ode::step_count(t1 - t0, options.dt);
    let dt = (t1 - t0) / steps as f64;
    let mut f = |t: f64, y: &PairState| -> Result<PairState> {
        let u = hartree.interpolate(t)?;
        let kernels = build_kernels(&u, potential, basis)?;
        pair_rhs(y, &kernels)
    };

    let mut state = pair0.clone();
    state.time = t0;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(state.clone());
    for n in 0..steps {
        let t = t0 + n as f64 * dt;
        state = ode::rk4_macro_step(&mut f, t, dt, &state, options.step_check_tol)?;
        state.time = t0 + (n + 1) as f64 * dt;
        samples.push(state.clone());
    }
    Ok(PairTrajectory { samples })
}

/// Kinetic diagnostic tr[(1 + |2 pi k / L|^2) gamma], the quasi-free
/// expectation of dGamma(1 - Laplacian).
pub fn kinetic_diagnostic(pair: &PairState, basis: &ModeBasis) -> f64 {
    (0..pair.n_modes())
        .map(|k| (1.0 + basis.kinetic(k)) * pair.gamma[(k, k)].re)
        .sum()
}

/// Norms of gamma u and alpha conj(u): both vanish when the pair state
/// lives in the excitation space orthogonal to the condensate.
pub fn condensate_orthogonality(pair: &PairState, u_hat: &Array1<C64>) -> (f64, f64) {
    let gu = pair.gamma.dot(u_hat);
    let ubar = u_hat.mapv(|z| z.conj());
    let au = pair.alpha.dot(&ubar);
    (linalg::norm(&gu), linalg::norm(&au))
}

// Export: per-time-sample matrices in a binary container plus CSV summary.

const PAIR_MAGIC: &[u8; 8] = b"BGPR\x00\x00\x00\x01";

impl PairTrajectory {
    pub fn write_binary(&self, path: &std::path::Path) -> Result<()> {
        let m = self.samples.first().map_or(0, |s| s.n_modes());
        let mut buf: Vec<u8> = Vec::new();
        buf.extend_from_slice(PAIR_MAGIC);
        buf.extend_from_slice(&(m as u64).to_le_bytes());
        buf.extend_from_slice(&(self.samples.len() as u64).to_le_bytes());
        for s in &self.samples {
            buf.extend_from_slice(&s.time.to_le_bytes());
            for z in s.gamma.iter().chain(s.alpha.iter()) {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn read_binary(path: &std::path::Path) -> Result<Self> {
        let data =
            std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        if data.len() < 24 || &data[0..8] != PAIR_MAGIC {
            return Err(Error::Config("bad magic in pair trajectory file".into()));
        }
        let m = u64::from_le_bytes(data[8..16].try_into().unwrap()) as usize;
        let n_samples = u64::from_le_bytes(data[16..24].try_into().unwrap()) as usize;
        let per = 8 + 2 * 2 * m * m * 8;
        if data.len() != 24 + n_samples * per {
            return Err(Error::Config("truncated pair trajectory file".into()));
        }
        let mut samples = Vec::with_capacity(n_samples);
        let mut cur = 24;
        let f64_next = |cur: &mut usize| {
            let v = f64::from_le_bytes(data[*cur..*cur + 8].try_into().unwrap());
            *cur += 8;
            v
        };
        for _ in 0..n_samples {
            let time = f64_next(&mut cur);
            let mut gamma = Array2::zeros((m, m));
            let mut alpha = Array2::zeros((m, m));
            for target in [&mut gamma, &mut alpha] {
                for i in 0..m {
                    for j in 0..m {
                        let re = f64_next(&mut cur);
                        let im = f64_next(&mut cur);
                        target[(i, j)] = C64::new(re, im);
                    }
                }
            }
            samples.push(PairState { time, gamma, alpha });
        }
        Ok(PairTrajectory { samples })
    }

    /// CSV summary (t, tr gamma, kinetic diagnostic, purity residual).
    pub fn write_csv_summary(&self, path: &std::path::Path, basis: &ModeBasis) -> Result<()> {
        let mut out = String::from("# schema: bosegas.pair.v1\nt,tr_gamma,kinetic,purity_residual\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.time,
                s.trace_gamma(),
                kinetic_diagnostic(s, basis),
                s.purity_residual()
            ));
        }
        std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{
        assemble_quadratic, evolve_fock, extract_one_body, hamiltonian_along, pair_create,
        FockBasis, FockEvolveOptions, FockVector,
    };
    use crate::hartree::{constant_condensate, evolve_hartree, two_mode_condensate, HartreeOptions};
    use crate::spectral::CosineBump;
    use std::sync::Arc;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn setup(amplitude: f64) -> (ModeBasis, ScaledPotential) {
        let basis = ModeBasis::new(1, TAU, 1).unwrap();
        let pot = ScaledPotential::build(
            Arc::new(CosineBump::new(amplitude, 1.0).unwrap()),
            0.0,
            6,
            &basis,
        )
        .unwrap();
        (basis, pot)
    }

    /// Gaussian Fock state from a symmetric pairing seed Z, plus its
    /// one-body data.
    fn gaussian_from_seed(
        z: &Array2<C64>,
        fock: &Arc<FockBasis>,
    ) -> (FockVector, PairState) {
        let creator = pair_create(z, fock).unwrap();
        let mut amps: Array1<C64> = Array1::zeros(fock.len());
        amps[fock.vacuum_index()] = c(1.0);
        let mut term = amps.clone();
        for p in 1..=(fock.nmax() / 2 + 1) {
            term = creator.apply(&term);
            term.mapv_inplace(|v| v / p as f64);
            if linalg::norm(&term) == 0.0 {
                break;
            }
            amps.zip_mut_with(&term, |x, y| *x += y);
        }
        let phi = FockVector::new(fock.clone(), amps).unwrap().normalized();
        let pair = extract_one_body(&phi);
        (phi, pair)
    }

    #[test]
    fn rhs_free_flow_matches_closed_form_derivative() {
        // K2 = 0: gamma(t) = e^{-iht} gamma0 e^{iht}, so at t = 0
        // gamma' = -i(h gamma - gamma h), alpha' = -i(h alpha + alpha h^T)
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(8);
        let m = 3;
        let mut h: Array2<C64> = Array2::zeros((m, m));
        for i in 0..m {
            for j in 0..i {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
            h[(i, i)] = c(rng.random_range(-1.0..1.0));
        }
        let fock = Arc::new(FockBasis::new(m, 10).unwrap());
        let mut z: Array2<C64> = Array2::zeros((m, m));
        for i in 0..m {
            for j in 0..=i {
                let v = C64::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2));
                z[(i, j)] = v;
                z[(j, i)] = v;
            }
        }
        let (_phi, pair) = gaussian_from_seed(&z, &fock);
        let kernels = KernelSet::bare(h.clone());
        let rhs = pair_rhs(&pair, &kernels).unwrap();
        let mi = -C64::i();
        let expect_g = (h.dot(&pair.gamma) - pair.gamma.dot(&h)).mapv(|v| mi * v);
        let ht = linalg::transpose(&h);
        let expect_a = (h.dot(&pair.alpha) + pair.alpha.dot(&ht)).mapv(|v| mi * v);
        assert!(linalg::max_abs_diff(&rhs.gamma, &expect_g) < 1e-10);
        assert!(linalg::max_abs_diff(&rhs.alpha, &expect_a) < 1e-10);
        // structure preservation of the returned derivative
        assert!(linalg::hermiticity_residual(&rhs.gamma) < 1e-12);
        assert!(linalg::symmetry_residual(&rhs.alpha) < 1e-12);
    }

    #[test]
    fn rhs_vacuum_seeds_pairing() {
        let (basis, pot) = setup(1.0);
        let u = constant_condensate(&basis);
        let kernels = build_kernels(&u, &pot, &basis).unwrap();
        let pair = PairState::vacuum(basis.n_modes());
        let rhs = pair_rhs(&pair, &kernels).unwrap();
        assert_eq!(linalg::max_abs(&rhs.gamma), 0.0);
        let expect = kernels.k2.mapv(|v| -C64::i() * v);
        assert!(linalg::max_abs_diff(&rhs.alpha, &expect) < 1e-14);
    }

    #[test]
    fn rhs_matches_fock_finite_difference() {
        // central difference of the Fock evolution's extracted one-body
        // data is the empirical arbiter for the conjugate placements
        use rand::{Rng, SeedableRng};
        let (basis, pot) = setup(1.0);
        let u = constant_condensate(&basis);
        let kernels = build_kernels(&u, &pot, &basis).unwrap();
        let m = basis.n_modes();
        let fock = Arc::new(FockBasis::new(m, 12).unwrap());
        let h_op = assemble_quadratic(&kernels.h, &kernels.k2, &fock).unwrap();

        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(99);
        let mut z: Array2<C64> = Array2::zeros((m, m));
        for i in 0..m {
            for j in 0..=i {
                let v = C64::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1));
                z[(i, j)] = v;
                z[(j, i)] = v;
            }
        }
        let (phi, pair) = gaussian_from_seed(&z, &fock);
        let rhs = pair_rhs(&pair, &kernels).unwrap();

        let delta = 1e-3;
        let evolve_to = |t: f64| {
            let traj = evolve_fock(
                &phi,
                t,
                &FockEvolveOptions { dt: delta / 8.0, ..Default::default() },
                &mut |_| Ok(h_op.clone()),
            )
            .unwrap();
            extract_one_body(&traj.final_state())
        };
        // Richardson-extrapolated central difference, O(delta^4)
        let central = |d: f64| {
            let plus = evolve_to(d);
            let minus = evolve_to(-d);
            (
                (&plus.gamma - &minus.gamma).mapv(|v| v / (2.0 * d)),
                (&plus.alpha - &minus.alpha).mapv(|v| v / (2.0 * d)),
            )
        };
        let (g1, a1) = central(delta);
        let (g2, a2) = central(delta / 2.0);
        let fd_gamma = (g2.mapv(|v| 4.0 * v) - g1).mapv(|v| v / 3.0);
        let fd_alpha = (a2.mapv(|v| 4.0 * v) - a1).mapv(|v| v / 3.0);
        assert!(
            linalg::max_abs_diff(&rhs.gamma, &fd_gamma) < 1e-6,
            "gamma mismatch {}",
            linalg::max_abs_diff(&rhs.gamma, &fd_gamma)
        );
        assert!(
            linalg::max_abs_diff(&rhs.alpha, &fd_alpha) < 1e-6,
            "alpha mismatch {}",
            linalg::max_abs_diff(&rhs.alpha, &fd_alpha)
        );
    }

    #[test]
    fn free_vacuum_stays_vacuum() {
        let (basis, pot) = setup(0.0);
        let u = constant_condensate(&basis);
        let hartree = evolve_hartree(&u, 0.5, &HartreeOptions::default(), &pot, &basis).unwrap();
        let pair0 = PairState::vacuum(basis.n_modes());
        let traj =
            evolve_pair(&pair0, (0.0, 0.5), &hartree, &pot, &basis, &PairEvolveOptions::default())
                .unwrap();
        let end = traj.final_state();
        assert_eq!(linalg::max_abs(&end.gamma), 0.0);
        assert_eq!(linalg::max_abs(&end.alpha), 0.0);
    }

    #[test]
    fn pair_flow_matches_fock_flow() {
        // vacuum fluctuations over the interacting condensate: the pair
        // trajectory must match the one-body data extracted from the full
        // Fock evolution
        let (basis, pot) = setup(1.0);
        let u = constant_condensate(&basis);
        let t_final = 0.5;
        let hartree =
            evolve_hartree(&u, t_final, &HartreeOptions::default(), &pot, &basis).unwrap();
        let pair0 = PairState::vacuum(basis.n_modes());
        let pair_traj =
            evolve_pair(&pair0, (0.0, t_final), &hartree, &pot, &basis, &PairEvolveOptions::default())
                .unwrap();

        let fock = Arc::new(FockBasis::new(basis.n_modes(), 12).unwrap());
        let phi0 = FockVector::vacuum(fock.clone());
        let mut gen = hamiltonian_along(&hartree, &pot, &basis, fock);
        let fock_traj =
            evolve_fock(&phi0, t_final, &FockEvolveOptions::default(), &mut gen).unwrap();
        assert!(!fock_traj.leak_flagged);

        let from_fock = extract_one_body(&fock_traj.final_state());
        let end = pair_traj.final_state();
        let dg = linalg::max_abs_diff(&end.gamma, &from_fock.gamma);
        let da = linalg::max_abs_diff(&end.alpha, &from_fock.alpha);
        assert!(dg + da < 1e-5, "pair vs fock: gamma {dg}, alpha {da}");
        assert!(end.trace_gamma() > 1e-4, "dynamics should populate pairs");
    }

    #[test]
    fn squeezed_free_mode_preserves_purity_exactly() {
        // K2 = 0, scalar h: gamma is constant, alpha rotates by a phase, so
        // alpha alpha^dag - gamma(1 + gamma) is conserved;
        // sinh^2 r (1 + sinh^2 r) = (cosh r sinh r)^2 makes it zero
        let r = 0.45;
        let pair0 = PairState::one_mode_squeezed(r);
        assert!(pair0.purity_residual() < 1e-14);
        let kernels = KernelSet::bare(Array2::from_elem((1, 1), c(1.3)));
        let mut f = |_t: f64, y: &PairState| pair_rhs(y, &kernels);
        let mut state = pair0;
        let dt = 1e-3;
        for n in 0..500 {
            state = ode::rk4_macro_step(&mut f, n as f64 * dt, dt, &state, Some(1e-9)).unwrap();
        }
        assert!(state.purity_residual() < 1e-10);
        assert!((state.gamma[(0, 0)] - c(r.sinh().powi(2))).norm() < 1e-10);
    }

    #[test]
    fn trajectory_invariants_and_orthogonality() {
        // moving condensate: hermiticity, symmetry, purity, positivity and
        // orthogonality to u(t) hold along the trajectory
        let (basis, pot) = setup(1.0);
        let u = two_mode_condensate(&basis, 0.25);
        let t_final = 1.0;
        let hartree =
            evolve_hartree(&u, t_final, &HartreeOptions::default(), &pot, &basis).unwrap();
        let pair0 = PairState::vacuum(basis.n_modes());
        let traj =
            evolve_pair(&pair0, (0.0, t_final), &hartree, &pot, &basis, &PairEvolveOptions::default())
                .unwrap();
        for s in &traj.samples {
            assert!(s.hermiticity_residual() <= 1e-10);
            assert!(s.symmetry_residual() <= 1e-10);
            assert!(s.purity_residual() <= 1e-7 * (1.0 + s.time));
            assert!(s.min_gamma_eigenvalue() >= -1e-8);
            let u_t = hartree.interpolate(s.time).unwrap();
            let (gu, au) = condensate_orthogonality(s, &u_t);
            assert!(gu <= 1e-6 && au <= 1e-6, "orthogonality ({gu}, {au}) at t={}", s.time);
        }
    }

    #[test]
    fn kinetic_diagnostic_values() {
        let (basis, _pot) = setup(1.0);
        let pair = PairState::vacuum(basis.n_modes());
        assert_eq!(kinetic_diagnostic(&pair, &basis), 0.0);
        // single excitation in mode k: 1 + |2 pi k / L|^2
        let k_idx = basis.index_of(&[1]).unwrap();
        let mut one = PairState::vacuum(basis.n_modes());
        one.gamma[(k_idx, k_idx)] = c(1.0);
        let got = kinetic_diagnostic(&one, &basis);
        assert!((got - (1.0 + basis.kinetic(k_idx))).abs() < 1e-14);
    }

    #[test]
    fn kinetic_diagnostic_matches_fock_expectation() {
        let (basis, pot) = setup(1.0);
        let u = constant_condensate(&basis);
        let t_final = 0.4;
        let hartree =
            evolve_hartree(&u, t_final, &HartreeOptions::default(), &pot, &basis).unwrap();
        let fock = Arc::new(FockBasis::new(basis.n_modes(), 12).unwrap());
        let phi0 = FockVector::vacuum(fock.clone());
        let mut gen = hamiltonian_along(&hartree, &pot, &basis, fock.clone());
        let traj = evolve_fock(&phi0, t_final, &FockEvolveOptions::default(), &mut gen).unwrap();
        let phi = traj.final_state();
        let pair = extract_one_body(&phi);
        let diag = kinetic_diagnostic(&pair, &basis);
        // direct expectation of dGamma(1 - Lap) on the Fock state
        let mut one_body: Array2<C64> = Array2::zeros((basis.n_modes(), basis.n_modes()));
        for k in 0..basis.n_modes() {
            one_body[(k, k)] = c(1.0 + basis.kinetic(k));
        }
        let op = crate::fock::dgamma(&one_body, &fock).unwrap();
        let expect = linalg::inner(&phi.amps, &op.apply(&phi.amps)).re;
        assert!((diag - expect).abs() < 1e-6, "{diag} vs {expect}");
    }

    #[test]
    fn binary_and_csv_export_round_trip() {
        let (basis, pot) = setup(1.0);
        let u = constant_condensate(&basis);
        let hartree = evolve_hartree(&u, 0.1, &HartreeOptions::default(), &pot, &basis).unwrap();
        let traj = evolve_pair(
            &PairState::vacuum(basis.n_modes()),
            (0.0, 0.1),
            &hartree,
            &pot,
            &basis,
            &PairEvolveOptions { dt: 2e-2, ..Default::default() },
        )
        .unwrap();
        let dir = std::env::temp_dir().join("bosegas_pair_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let bin = dir.join("pair.bgpr");
        traj.write_binary(&bin).unwrap();
        let back = PairTrajectory::read_binary(&bin).unwrap();
        assert_eq!(traj.samples.len(), back.samples.len());
        for (a, b) in traj.samples.iter().zip(back.samples.iter()) {
            assert_eq!(a.time, b.time);
            assert_eq!(a.gamma, b.gamma);
            assert_eq!(a.alpha, b.alpha);
        }
        let csv = dir.join("pair.csv");
        traj.write_csv_summary(&csv, &basis).unwrap();
        let text = std::fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("# schema: bosegas.pair.v1"));
        std::fs::remove_dir_all(&dir).ok();
    }
}
