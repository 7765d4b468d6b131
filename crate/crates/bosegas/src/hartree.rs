//! Condensate dynamics: the Hartree equation with the energy-compatible
//! phase,
//!
//! ```text
//! i du/dt = (-Laplacian + w_N * |u|^2 - mu_N(t)) u,
//! mu_N(t) = 1/2 <|u|^2, w_N * |u|^2>,
//! ```
//!
//! integrated spectrally with either fixed-step RK4 or Strang splitting
//! (diagonal kinetic half-steps around an exact exponential of the
//! multiplicative potential part). Trajectories store the state, its
//! derivative and mu at every macro step; cubic Hermite interpolation
//! between macro steps serves the downstream fluctuation solvers.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::ode::{self, OdeState};
use crate::spectral::{ModeBasis, ScaledPotential};

pub const NORMALIZATION_GATE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct CondensateState {
    pub time: f64,
    pub coeffs: Array1<C64>,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Rk4,
    StrangSplitting,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Scheme::Rk4),
            "strang-splitting" | "strang" => Ok(Scheme::StrangSplitting),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HartreeOptions {
    pub dt: f64,
    pub scheme: Scheme,
    /// Halved-step acceptance tolerance per macro step; None disables.
    pub step_check_tol: Option<f64>,
    /// Include the phase mu_N in the generator (the default convention).
    pub include_phase: bool,
}

impl Default for HartreeOptions {
    fn default() -> Self {
        HartreeOptions {
            dt: 1e-3,
            scheme: Scheme::Rk4,
            step_check_tol: Some(1e-9),
            include_phase: true,
        }
    }
}

fn ensure_normalized(u: &Array1<C64>) -> Result<()> {
    let norm = linalg::norm(u);
    if (norm - 1.0).abs() > NORMALIZATION_GATE {
        return Err(Error::NotNormalized((norm - 1.0).abs()));
    }
    Ok(())
}

/// The phase mu_N = 1/2 <|u|^2, w_N * |u|^2>, evaluated spectrally as
/// (1 / 2 L^d) sum_m w_hat(m) |D_m|^2 with D the density coefficients.
pub fn compute_mu(
    u_hat: &Array1<C64>,
    potential: &ScaledPotential,
    basis: &ModeBasis,
) -> Result<f64> {
    potential.ensure_basis(basis)?;
    basis.ensure_coeff_len(u_hat.len())?;
    ensure_normalized(u_hat)?;
    Ok(mu_unchecked(u_hat, potential, basis))
}

fn mu_unchecked(u_hat: &Array1<C64>, potential: &ScaledPotential, basis: &ModeBasis) -> f64 {
    let d = basis.density_coefficients(u_hat);
    let mut acc = 0.0;
    for m in 0..d.len() {
        acc += potential.w_hat_at(m) * d[m].norm_sqr();
    }
    acc / (2.0 * basis.volume())
}

/// Right-hand side of the Hartree equation in mode coefficients.
pub fn hartree_rhs(
    u_hat: &Array1<C64>,
    potential: &ScaledPotential,
    basis: &ModeBasis,
) -> Result<Array1<C64>> {
    potential.ensure_basis(basis)?;
    basis.ensure_coeff_len(u_hat.len())?;
    Ok(rhs_unchecked(u_hat, potential, basis, true))
}

fn rhs_unchecked(
    u_hat: &Array1<C64>,
    potential: &ScaledPotential,
    basis: &ModeBasis,
    include_phase: bool,
) -> Array1<C64> {
    let m_count = basis.n_modes();
    let d = basis.density_coefficients(u_hat);
    let mu = if include_phase {
        let mut acc = 0.0;
        for m in 0..d.len() {
            acc += potential.w_hat_at(m) * d[m].norm_sqr();
        }
        acc / (2.0 * basis.volume())
    } else {
        0.0
    };
    let inv_vol = 1.0 / basis.volume();
    let mut out: Array1<C64> = Array1::zeros(m_count);
    for k in 0..m_count {
        let mut acc = C64::new(basis.kinetic(k) - mu, 0.0) * u_hat[k];
        for l in 0..m_count {
            if u_hat[l] == C64::new(0.0, 0.0) {
                continue;
            }
            let t = basis.transfer(k, l);
            acc += inv_vol * potential.w_hat_at(t) * d[t] * u_hat[l];
        }
        out[k] = -C64::i() * acc;
    }
    out
}

/// Conserved Hartree energy <u, -Lap u> + 1/2 <|u|^2, w_N * |u|^2>.
pub fn hartree_energy(
    u_hat: &Array1<C64>,
    potential: &ScaledPotential,
    basis: &ModeBasis,
) -> f64 {
    let kinetic: f64 = u_hat
        .iter()
        .enumerate()
        .map(|(k, z)| basis.kinetic(k) * z.norm_sqr())
        .sum();
    kinetic + mu_unchecked(u_hat, potential, basis)
}

#[derive(Debug, Clone)]
pub struct HartreeSample {
    pub time: f64,
    pub coeffs: Array1<C64>,
    pub deriv: Array1<C64>,
    pub mu: f64,
}

#[derive(Debug, Clone)]
pub struct HartreeTrajectory {
    pub samples: Vec<HartreeSample>,
    pub dimension: usize,
    pub length: f64,
    pub kmax: i64,
}

impl HartreeTrajectory {
    pub fn t_start(&self) -> f64 {
        self.samples.first().map_or(0.0, |s| s.time)
    }

    pub fn t_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.time)
    }

    pub fn final_state(&self) -> &HartreeSample {
        self.samples.last().expect("non-empty trajectory")
    }

    /// Condensate coefficients at time t by cubic Hermite interpolation
    /// between macro samples.
    pub fn interpolate(&self, t: f64) -> Result<Array1<C64>> {
        let n = self.samples.len();
        if n == 0 {
            return Err(Error::TrajectoryOutOfRange(t));
        }
        let ascending = self.samples[n - 1].time >= self.samples[0].time;
        if !ascending {
            return Err(Error::InsufficientSamples(
                "interpolation requires ascending sample times".into(),
            ));
        }
        let t0 = self.samples[0].time;
        let t1 = self.samples[n - 1].time;
        let pad = 1e-9 * (1.0 + t1.abs().max(t0.abs()));
        if t < t0 - pad || t > t1 + pad {
            return Err(Error::TrajectoryOutOfRange(t));
        }
        if n == 1 {
            return Ok(self.samples[0].coeffs.clone());
        }
        let idx = match self
            .samples
            .binary_search_by(|s| s.time.partial_cmp(&t).unwrap())
        {
            Ok(i) => return Ok(self.samples[i].coeffs.clone()),
            Err(i) => i.clamp(1, n - 1),
        };
        let a = &self.samples[idx - 1];
        let b = &self.samples[idx];
        Ok(ode::hermite(
            a.time, &a.coeffs, &a.deriv, b.time, &b.coeffs, &b.deriv, t,
        ))
    }
}

/// Integrate the Hartree equation from t = 0 to `t_final` (which may be
/// negative). Samples are stored at every macro step.
pub fn evolve_hartree(
    u0: &Array1<C64>,
    t_final: f64,
    options: &HartreeOptions,
    potential: &ScaledPotential,
    basis: &ModeBasis,
) -> Result<HartreeTrajectory> {
    potential.ensure_basis(basis)?;
    basis.ensure_coeff_len(u0.len())?;
    ensure_normalized(u0)?;
    if !(options.dt > 0.0) {
        return Err(Error::InvalidParameter("dt must be > 0".into()));
    }

    let steps = ode::step_count(t_final, options.dt);
    let dt = t_final / steps as f64;
    let include_phase = options.include_phase;

    let sample = |t: f64, u: &Array1<C64>| HartreeSample {
        time: t,
        coeffs: u.clone(),
        deriv: rhs_unchecked(u, potential, basis, include_phase),
        mu: mu_unchecked(u, potential, basis),
    };

    let mut samples = Vec::with_capacity(steps + 1);
    let mut u = u0.clone();
    samples.push(sample(0.0, &u));
    for n in 0..steps {
        let t = n as f64 * dt;
        u = match options.scheme {
            Scheme::Rk4 => {
                let mut f = |_t: f64, y: &Array1<C64>| {
                    Ok(rhs_unchecked(y, potential, basis, include_phase))
                };
                ode::rk4_macro_step(&mut f, t, dt, &u, options.step_check_tol)?
            }
            Scheme::StrangSplitting => {
                let coarse = strang_step(&u, dt, potential, basis, include_phase);
                match options.step_check_tol {
                    None => coarse,
                    Some(tol) => {
                        let half = strang_step(&u, 0.5 * dt, potential, basis, include_phase);
                        let fine = strang_step(&half, 0.5 * dt, potential, basis, include_phase);
                        let disagreement = coarse.dist(&fine);
                        if disagreement > tol {
                            return Err(Error::StepRejected { t, disagreement, tol });
                        }
                        fine
                    }
                }
            }
        };
        samples.push(sample((n + 1) as f64 * dt, &u));
    }

    Ok(HartreeTrajectory {
        samples,
        dimension: basis.dimension(),
        length: basis.length(),
        kmax: basis.kmax(),
    })
}

/// One Strang step: exact kinetic half-phases around an exact exponential
/// of the (Galerkin-projected) potential multiplication operator, with the
/// potential frozen at the kinetic midpoint state.
fn strang_step(
    u: &Array1<C64>,
    dt: f64,
    potential: &ScaledPotential,
    basis: &ModeBasis,
    include_phase: bool,
) -> Array1<C64> {
    let m_count = basis.n_modes();
    let half_kinetic = |v: &Array1<C64>| -> Array1<C64> {
        Array1::from_iter(
            v.iter()
                .enumerate()
                .map(|(k, z)| z * (-C64::i() * (0.5 * dt * basis.kinetic(k))).exp()),
        )
    };
    let mid = half_kinetic(u);
    let d = basis.density_coefficients(&mid);
    let mu = if include_phase {
        let mut acc = 0.0;
        for m in 0..d.len() {
            acc += potential.w_hat_at(m) * d[m].norm_sqr();
        }
        acc / (2.0 * basis.volume())
    } else {
        0.0
    };
    let inv_vol = 1.0 / basis.volume();
    let mut v = ndarray::Array2::<C64>::zeros((m_count, m_count));
    for j in 0..m_count {
        for k in 0..m_count {
            let t = basis.transfer(j, k);
            v[(j, k)] = inv_vol * potential.w_hat_at(t) * d[t];
        }
        v[(j, j)] -= mu;
    }
    let prop = linalg::expm_hermitian(&v, -C64::i() * dt);
    let pushed = prop.dot(&mid);
    half_kinetic(&pushed)
}

/// Built-in initial data: the constant (zero-momentum) condensate.
pub fn constant_condensate(basis: &ModeBasis) -> Array1<C64> {
    let mut u = Array1::zeros(basis.n_modes());
    u[basis.zero_index()] = C64::new(1.0, 0.0);
    u
}

/// Built-in initial data: constant condensate with one excited mode mixed
/// in, u = (e_0 + eps e_1) normalized.
pub fn two_mode_condensate(basis: &ModeBasis, eps: f64) -> Array1<C64> {
    let mut u: Array1<C64> = Array1::zeros(basis.n_modes());
    u[basis.zero_index()] = C64::new(1.0, 0.0);
    let mut first = vec![0i64; basis.dimension()];
    first[basis.dimension() - 1] = 1;
    let idx = basis.index_of(&first).expect("kmax >= 1");
    u[idx] = C64::new(eps, 0.0);
    let norm = linalg::norm(&u);
    u.mapv_into(|z| z / norm)
}

// ---------------------------------------------------------------------------
// trajectory export
// ---------------------------------------------------------------------------

const BINARY_MAGIC: &[u8; 8] = b"BGHT\x00\x00\x00\x01";

impl HartreeTrajectory {
    /// CSV with columns (t, mode index, Re u, Im u, mu).
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        use std::io::Write;
        let mut f = std::fs::File::create(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut out = String::from("# schema: bosegas.hartree.v1\nt,mode_index,re_u,im_u,mu\n");
        for s in &self.samples {
            for (k, z) in s.coeffs.iter().enumerate() {
                out.push_str(&format!("{},{},{},{},{}\n", s.time, k, z.re, z.im, s.mu));
            }
        }
        f.write_all(out.as_bytes())
            .map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Versioned little-endian binary container, round-trips exactly.
    pub fn write_binary(&self, path: &std::path::Path) -> Result<()> {
        let mut buf: Vec<u8> = Vec::new();
        buf.extend_from_slice(BINARY_MAGIC);
        buf.extend_from_slice(&(self.dimension as u64).to_le_bytes());
        buf.extend_from_slice(&self.length.to_le_bytes());
        buf.extend_from_slice(&self.kmax.to_le_bytes());
        buf.extend_from_slice(&(self.samples.len() as u64).to_le_bytes());
        let n_modes = self.samples.first().map_or(0, |s| s.coeffs.len());
        buf.extend_from_slice(&(n_modes as u64).to_le_bytes());
        for s in &self.samples {
            buf.extend_from_slice(&s.time.to_le_bytes());
            buf.extend_from_slice(&s.mu.to_le_bytes());
            for z in s.coeffs.iter().chain(s.deriv.iter()) {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn read_binary(path: &std::path::Path) -> Result<Self> {
        let data =
            std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut cur = 0usize;
        let take = |cur: &mut usize, n: usize| -> Result<&[u8]> {
            if *cur + n > data.len() {
                return Err(Error::Config("truncated trajectory file".into()));
            }
            let s = &data[*cur..*cur + n];
            *cur += n;
            Ok(s)
        };
        if take(&mut cur, 8)? != BINARY_MAGIC {
            return Err(Error::Config("bad magic in trajectory file".into()));
        }
        let f64_at = |b: &[u8]| f64::from_le_bytes(b.try_into().unwrap());
        let u64_at = |b: &[u8]| u64::from_le_bytes(b.try_into().unwrap());
        let dimension = u64_at(take(&mut cur, 8)?) as usize;
        let length = f64_at(take(&mut cur, 8)?);
        let kmax = i64::from_le_bytes(take(&mut cur, 8)?.try_into().unwrap());
        let n_samples = u64_at(take(&mut cur, 8)?) as usize;
        let n_modes = u64_at(take(&mut cur, 8)?) as usize;
        let mut samples = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            let time = f64_at(take(&mut cur, 8)?);
            let mu = f64_at(take(&mut cur, 8)?);
            let read_vec = |cur: &mut usize| -> Result<Array1<C64>> {
                let mut v = Array1::zeros(n_modes);
                for k in 0..n_modes {
                    let re = f64_at(take(cur, 8)?);
                    let im = f64_at(take(cur, 8)?);
                    v[k] = C64::new(re, im);
                }
                Ok(v)
            };
            let coeffs = read_vec(&mut cur)?;
            let deriv = read_vec(&mut cur)?;
            samples.push(HartreeSample { time, coeffs, deriv, mu });
        }
        Ok(HartreeTrajectory { samples, dimension, length, kmax })
    }
}
