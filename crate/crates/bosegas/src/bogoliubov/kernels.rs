//! Mode-space kernels of the quadratic fluctuation generator.
//!
//! For a normalized condensate u and interaction w_N the set holds
//!
//! ```text
//! h  = -Lap + (w_N * |u|^2) - mu_N + Q K1t Q,
//! K1t_jk = matrix of the kernel u(x) w_N(x-y) conj(u(y)),
//! K2t_jk = matrix of the kernel u(x) w_N(x-y) u(y),
//! K2  = Q K2t Q^T        (both slots projected off the condensate),
//! Q   = 1 - |u><u|.
//! ```
//!
//! All matrix elements are assembled spectrally from the cached Fourier
//! coefficients of w_N; momentum conservation makes every sum a single
//! pass over the difference lattice.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hartree;
use crate::linalg;
use crate::spectral::{ModeBasis, ScaledPotential};

#[derive(Debug, Clone)]
pub struct KernelSet {
    pub h: Array2<C64>,
    pub k1_tilde: Array2<C64>,
    pub k2_tilde: Array2<C64>,
    pub k2: Array2<C64>,
    pub q: Array2<C64>,
    /// Multiplication operator by w_N * |u|^2 in mode space.
    pub v_mult: Array2<C64>,
    /// The condensate the kernels were built from (phase included).
    pub u_hat: Array1<C64>,
    pub mu: f64,
}

impl KernelSet {
    /// Kernel set with a bare one-body part and no interaction pieces;
    /// for closed-form checks.
    pub fn bare(h: Array2<C64>) -> Self {
        let m = h.nrows();
        KernelSet {
            h,
            k1_tilde: Array2::zeros((m, m)),
            k2_tilde: Array2::zeros((m, m)),
            k2: Array2::zeros((m, m)),
            q: Array2::eye(m),
            v_mult: Array2::zeros((m, m)),
            u_hat: Array1::zeros(m),
            mu: 0.0,
        }
    }

    /// As [`bare`](Self::bare) but with a pairing block.
    pub fn bare_with_pairing(h: Array2<C64>, k2: Array2<C64>) -> Self {
        let mut ks = Self::bare(h);
        ks.k2 = k2.clone();
        ks.k2_tilde = k2;
        ks
    }
}

/// Assemble the kernels from condensate coefficients.
pub fn build_kernels(
    u_hat: &Array1<C64>,
    potential: &ScaledPotential,
    basis: &ModeBasis,
) -> Result<KernelSet> {
    potential.ensure_basis(basis)?;
    basis.ensure_coeff_len(u_hat.len())?;
    let norm = linalg::norm(u_hat);
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized((norm - 1.0).abs()));
    }

    let m_count = basis.n_modes();
    let inv_vol = 1.0 / basis.volume();
    let diff = basis.diff();
    let d = basis.density_coefficients(u_hat);
    let mu = hartree::compute_mu(u_hat, potential, basis)?;

    let mut k1_tilde: Array2<C64> = Array2::zeros((m_count, m_count));
    let mut k2_tilde: Array2<C64> = Array2::zeros((m_count, m_count));
    for j in 0..m_count {
        for k in 0..m_count {
            let mut acc1 = C64::new(0.0, 0.0);
            let mut acc2 = C64::new(0.0, 0.0);
            for m in 0..diff.len() {
                let w = potential.w_hat_at(m);
                if w == 0.0 {
                    continue;
                }
                let neg = diff.negated(m);
                if let Some(jm) = basis.shifted(j, neg) {
                    if let Some(km) = basis.shifted(k, neg) {
                        acc1 += w * u_hat[jm] * u_hat[km].conj();
                    }
                    if let Some(kp) = basis.shifted(k, m) {
                        acc2 += w * u_hat[jm] * u_hat[kp];
                    }
                }
            }
            k1_tilde[(j, k)] = inv_vol * acc1;
            k2_tilde[(j, k)] = inv_vol * acc2;
        }
    }

    // projector off the condensate
    let mut q: Array2<C64> = Array2::eye(m_count);
    for j in 0..m_count {
        for k in 0..m_count {
            q[(j, k)] -= u_hat[j] * u_hat[k].conj();
        }
    }

    // h = kinetic + multiplication by w_N * |u|^2 - mu + Q K1t Q
    let mut v_mult: Array2<C64> = Array2::zeros((m_count, m_count));
    for j in 0..m_count {
        for k in 0..m_count {
            let t = basis.transfer(j, k);
            v_mult[(j, k)] = inv_vol * potential.w_hat_at(t) * d[t];
        }
    }
    let mut h = v_mult.clone();
    for j in 0..m_count {
        h[(j, j)] += basis.kinetic(j) - mu;
    }
    let qk1q = q.dot(&k1_tilde).dot(&q);
    h += &qk1q;

    let qt = linalg::transpose(&q);
    let k2 = q.dot(&k2_tilde).dot(&qt);

    Ok(KernelSet { h, k1_tilde, k2_tilde, k2, q, v_mult, u_hat: u_hat.clone(), mu })
}

impl KernelSet {
    pub fn n_modes(&self) -> usize {
        self.h.nrows()
    }

    /// Residual of the stated structural invariants; small on any output of
    /// [`build_kernels`].
    pub fn invariant_residual(&self, u_hat: &Array1<C64>) -> f64 {
        let mut r = linalg::hermiticity_residual(&self.h);
        r = r.max(linalg::symmetry_residual(&self.k2));
        r = r.max(linalg::hermiticity_residual(&self.q));
        let qq = self.q.dot(&self.q);
        r = r.max(linalg::max_abs_diff(&qq, &self.q));
        let qu = self.q.dot(u_hat);
        r = r.max(linalg::norm(&qu));
        // Q K2 conj(Q) = K2
        let qbar = linalg::conj(&self.q);
        let proj = self.q.dot(&self.k2).dot(&qbar);
        r = r.max(linalg::max_abs_diff(&proj, &self.k2));
        r
    }
}
