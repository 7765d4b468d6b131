//! Torus plane-wave basis with momentum cutoff.
//!
//! Modes are e_k(x) = L^{-d/2} exp(2 pi i k.x / L) for multi-indices
//! ||k||_inf <= kmax, enumerated lexicographically with the first component
//! most significant and each component running from -kmax to +kmax. They are
//! orthonormal for the torus inner product, so coefficient vectors carry the
//! full L2 geometry (Parseval). All Fourier conventions used elsewhere in
//! the crate are fixed here:
//!
//! * a field u(x) = sum_k u_k e_k(x);
//! * a density-like object rho(x) = L^{-d} sum_m rho_m exp(2 pi i m.x / L)
//!   indexed by the difference lattice ||m||_inf <= 2 kmax;
//! * convolution with an interaction w is diagonal in Fourier space with
//!   multiplier w_hat(m) = integral of w(x) exp(-2 pi i m.x / L).

use std::collections::HashMap;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const DEFAULT_MEMORY_BUDGET: usize = 4_000_000;

#[derive(Debug, Clone)]
pub struct DiffLattice {
    offsets: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl DiffLattice {
    fn new(dimension: usize, reach: i64) -> Self {
        let offsets = enumerate_box(dimension, reach);
        let index = offsets
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        DiffLattice { offsets, index }
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn offset(&self, i: usize) -> &[i64] {
        &self.offsets[i]
    }

    pub fn index_of(&self, m: &[i64]) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Index of -m.
    pub fn negated(&self, i: usize) -> usize {
        let neg: Vec<i64> = self.offsets[i].iter().map(|x| -x).collect();
        self.index[&neg]
    }
}

fn enumerate_box(dimension: usize, reach: i64) -> Vec<Vec<i64>> {
    let side = (2 * reach + 1) as usize;
    let count = side.pow(dimension as u32);
    let mut out = Vec::with_capacity(count);
    let mut current = vec![-reach; dimension];
    loop {
        out.push(current.clone());
        let mut axis = dimension;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if current[axis] < reach {
                current[axis] += 1;
                for c in current.iter_mut().skip(axis + 1) {
                    *c = -reach;
                }
                break;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModeBasis {
    dimension: usize,
    length: f64,
    kmax: i64,
    modes: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    zero_index: usize,
    kinetic: Vec<f64>,
    diff: DiffLattice,
    /// transfer[(a, b)] = difference-lattice index of k_a - k_b
    transfer: Array2<u32>,
    /// shift[(a, m)] = mode index of k_a + offset_m, or -1 when outside
    shift: Array2<i32>,
}

impl ModeBasis {
    pub fn new(dimension: usize, length: f64, kmax: i64) -> Result<Self> {
        Self::with_budget(dimension, length, kmax, DEFAULT_MEMORY_BUDGET)
    }

    pub fn with_budget(
        dimension: usize,
        length: f64,
        kmax: i64,
        budget: usize,
    ) -> Result<Self> {
        if dimension < 1 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if !(length > 0.0) {
            return Err(Error::InvalidParameter("torus length must be > 0".into()));
        }
        if kmax < 0 {
            return Err(Error::InvalidParameter("kmax must be >= 0".into()));
        }
        let side = (2 * kmax + 1) as usize;
        let n_modes = side
            .checked_pow(dimension as u32)
            .ok_or(Error::MemoryBudget { requested: usize::MAX, budget })?;
        let requested = dimension * n_modes;
        if requested > budget {
            return Err(Error::MemoryBudget { requested, budget });
        }

        let modes = enumerate_box(dimension, kmax);
        let index: HashMap<Vec<i64>, usize> = modes
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let zero_index = index[&vec![0i64; dimension]];
        let two_pi_over_l = 2.0 * std::f64::consts::PI / length;
        let kinetic = modes
            .iter()
            .map(|k| {
                k.iter()
                    .map(|&ki| (two_pi_over_l * ki as f64).powi(2))
                    .sum()
            })
            .collect();
        let diff = DiffLattice::new(dimension, 2 * kmax);
        let mut transfer = Array2::zeros((n_modes, n_modes));
        let mut scratch = vec![0i64; dimension];
        for a in 0..n_modes {
            for b in 0..n_modes {
                for (s, (ka, kb)) in scratch
                    .iter_mut()
                    .zip(modes[a].iter().zip(modes[b].iter()))
                {
                    *s = ka - kb;
                }
                transfer[(a, b)] = diff.index_of(&scratch).expect("within reach") as u32;
            }
        }
        let mut shift = Array2::zeros((n_modes, diff.len()));
        for a in 0..n_modes {
            for m in 0..diff.len() {
                for (s, (ka, dm)) in scratch
                    .iter_mut()
                    .zip(modes[a].iter().zip(diff.offset(m).iter()))
                {
                    *s = ka + dm;
                }
                shift[(a, m)] = index.get(&scratch).map_or(-1, |&i| i as i32);
            }
        }

        Ok(ModeBasis {
            dimension,
            length,
            kmax,
            modes,
            index,
            zero_index,
            kinetic,
            diff,
            transfer,
            shift,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn kmax(&self) -> i64 {
        self.kmax
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dimension as i32)
    }

    pub fn zero_index(&self) -> usize {
        self.zero_index
    }

    pub fn mode(&self, i: usize) -> &[i64] {
        &self.modes[i]
    }

    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        self.index.get(k).copied()
    }

    /// Kinetic symbol |2 pi k / L|^2 of mode i.
    pub fn kinetic(&self, i: usize) -> f64 {
        self.kinetic[i]
    }

    pub fn kinetic_symbol(&self) -> &[f64] {
        &self.kinetic
    }

    pub fn diff(&self) -> &DiffLattice {
        &self.diff
    }

    /// Difference-lattice index of k_a - k_b.
    pub fn transfer(&self, a: usize, b: usize) -> usize {
        self.transfer[(a, b)] as usize
    }

    /// Mode index of k_a + offset_m, if inside the cutoff.
    pub fn shifted(&self, a: usize, m: usize) -> Option<usize> {
        let s = self.shift[(a, m)];
        (s >= 0).then_some(s as usize)
    }

    /// Difference-lattice index of mode i itself.
    pub fn mode_in_diff(&self, i: usize) -> usize {
        self.diff.index_of(&self.modes[i]).expect("mode inside reach")
    }

    pub fn same_discretization(&self, other: &ModeBasis) -> bool {
        self.dimension == other.dimension
            && self.kmax == other.kmax
            && self.length == other.length
    }

    pub fn ensure_same(&self, other: &ModeBasis) -> Result<()> {
        if self.same_discretization(other) {
            Ok(())
        } else {
            Err(Error::BasisMismatch(format!(
                "(d={}, L={}, kmax={}) vs (d={}, L={}, kmax={})",
                self.dimension, self.length, self.kmax, other.dimension, other.length, other.kmax
            )))
        }
    }

    pub fn ensure_coeff_len(&self, len: usize) -> Result<()> {
        if len == self.n_modes() {
            Ok(())
        } else {
            Err(Error::BasisMismatch(format!(
                "coefficient vector has {len} entries, basis has {} modes",
                self.n_modes()
            )))
        }
    }

    /// e_k(x) for quadrature oracles.
    pub fn eval_mode(&self, i: usize, x: &[f64]) -> C64 {
        let phase: f64 = self.modes[i]
            .iter()
            .zip(x.iter())
            .map(|(&ki, &xi)| ki as f64 * xi)
            .sum::<f64>()
            * 2.0
            * std::f64::consts::PI
            / self.length;
        C64::from_polar(self.volume().powf(-0.5), phase)
    }

    /// u(x) = sum_k u_k e_k(x).
    pub fn eval_field(&self, coeffs: &Array1<C64>, x: &[f64]) -> C64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * self.eval_mode(i, x))
            .sum()
    }

    /// Coefficients of |u|^2 on the difference lattice:
    /// D_m = sum_l u_{l+m} conj(u_l), so |u(x)|^2 = L^{-d} sum_m D_m e^{2 pi i m.x/L}.
    pub fn density_coefficients(&self, u_hat: &Array1<C64>) -> Vec<C64> {
        let mut d = vec![C64::new(0.0, 0.0); self.diff.len()];
        for a in 0..self.n_modes() {
            if u_hat[a] == C64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..self.n_modes() {
                d[self.transfer(a, b)] += u_hat[a] * u_hat[b].conj();
            }
        }
        d
    }
}

/// Fourier-side convolution: the coefficients of w * rho for a density given
/// in mode-basis coefficients. Convolving with a real symmetric w is a real
/// pointwise multiplier.
pub fn convolve_density(
    density_hat: &Array1<C64>,
    w_hat: &[f64],
    basis: &ModeBasis,
) -> Result<Array1<C64>> {
    basis.ensure_coeff_len(density_hat.len())?;
    if w_hat.len() != basis.diff().len() {
        return Err(Error::BasisMismatch(format!(
            "w_hat has {} entries, difference lattice has {}",
            w_hat.len(),
            basis.diff().len()
        )));
    }
    let mut out = Array1::zeros(basis.n_modes());
    for k in 0..basis.n_modes() {
        out[k] = density_hat[k] * w_hat[basis.mode_in_diff(k)];
    }
    Ok(out)
}
