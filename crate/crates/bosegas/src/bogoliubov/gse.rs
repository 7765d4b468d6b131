//! Ground-state energy lower bound for quadratic Hamiltonians.
//!
//! For H > 0 and a symmetric pairing block K with K H^{-1} K^dag <= H, the
//! Hamiltonian dGamma(H) + 1/2 sum (K a^dag a^dag + conj(K) a a) is bounded
//! below by -1/2 ||H^{-1/2} K||_HS^2.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy)]
pub struct GseBound {
    /// -1/2 ||H^{-1/2} K||_HS^2
    pub bound: f64,
    /// ||H^{-1/2} K||_HS
    pub hs_norm: f64,
    /// Smallest eigenvalue of H - K H^{-1} K^dag (>= 0 when the premise holds).
    pub premise_margin: f64,
}

pub fn gse_lower_bound(h: &Array2<C64>, k: &Array2<C64>) -> Result<GseBound> {
    let m = h.nrows();
    if h.ncols() != m || k.nrows() != m || k.ncols() != m {
        return Err(Error::ShapeMismatch("H and K must be square of equal size".into()));
    }
    if linalg::hermiticity_residual(h) > 1e-10 {
        return Err(Error::InvalidParameter("H must be Hermitian".into()));
    }
    if linalg::symmetry_residual(k) > 1e-10 {
        return Err(Error::InvalidParameter("K must be symmetric".into()));
    }
    let (w, _) = linalg::eigh(h);
    if w[0] <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "H must be positive definite, min eigenvalue {}",
            w[0]
        )));
    }

    let h_inv = linalg::inv_hermitian_pd(h);
    let k_dag = linalg::conj_transpose(k);

    // premise check: H - K H^{-1} K^dag >= 0, reported rather than assumed
    let khk = k.dot(&h_inv).dot(&k_dag);
    let gap = h - &khk;
    let (gw, _) = linalg::eigh(&gap);
    let scale = linalg::max_abs(h).max(1.0);
    if gw[0] < -1e-10 * scale {
        return Err(Error::PremiseViolation(gw[0]));
    }

    let hs_sq = linalg::trace(&k_dag.dot(&h_inv).dot(k)).re;
    Ok(GseBound {
        bound: -0.5 * hs_sq,
        hs_norm: hs_sq.max(0.0).sqrt(),
        premise_margin: gw[0],
    })
}

/// Draw a random Hermitian positive-definite H and a symmetric K scaled so
/// the premise K H^{-1} K^dag <= margin^2 H holds (under both the plain and
/// the conjugated reading of H^{-1}, so downstream consumers need not care
/// which one a bound uses).
pub fn random_admissible_pair(
    rng: &mut impl Rng,
    n_modes: usize,
    margin: f64,
) -> (Array2<C64>, Array2<C64>) {
    let mut a: Array2<C64> = Array2::zeros((n_modes, n_modes));
    for v in a.iter_mut() {
        *v = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let ah = linalg::conj_transpose(&a);
    let mut h = a.dot(&ah);
    for i in 0..n_modes {
        h[(i, i)] += 0.4;
    }

    let mut k: Array2<C64> = Array2::zeros((n_modes, n_modes));
    for i in 0..n_modes {
        for j in 0..=i {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            k[(i, j)] = z;
            k[(j, i)] = z;
        }
    }

    let h_inv_sqrt = linalg::inv_sqrt_hermitian_pd(&h);
    let mut worst: f64 = 0.0;
    for conjugated in [false, true] {
        let mid = if conjugated { linalg::conj(&h_inv_sqrt) } else { h_inv_sqrt.clone() };
        let b = h_inv_sqrt.dot(&k).dot(&mid);
        let bh = linalg::conj_transpose(&b);
        let (w, _) = linalg::eigh(&b.dot(&bh));
        worst = worst.max(w[w.len() - 1].max(0.0).sqrt());
    }
    if worst > 0.0 {
        let s = margin / worst;
        k.mapv_inplace(|z| s * z);
    }
    (h, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn zero_pairing_gives_zero_bound() {
        let h = array![[c(2.0), c(0.0)], [c(0.0), c(1.0)]];
        let k = Array2::zeros((2, 2));
        let b = gse_lower_bound(&h, &k).unwrap();
        assert_eq!(b.bound, 0.0);
        assert_eq!(b.hs_norm, 0.0);
    }

    #[test]
    fn one_mode_closed_form() {
        // bound = -kappa^2 / (2h); exact ground energy (sqrt(h^2-k^2)-h)/2
        let h_val = 1.7;
        let kappa = 0.9;
        let h = array![[c(h_val)]];
        let k = array![[c(kappa)]];
        let b = gse_lower_bound(&h, &k).unwrap();
        assert!((b.bound + kappa * kappa / (2.0 * h_val)).abs() < 1e-14);
        let exact = 0.5 * ((h_val * h_val - kappa * kappa).sqrt() - h_val);
        assert!(exact >= b.bound);
    }

    #[test]
    fn premise_violation_is_reported() {
        let h = array![[c(1.0)]];
        let k = array![[c(2.0)]]; // kappa > h
        assert!(matches!(gse_lower_bound(&h, &k), Err(Error::PremiseViolation(_))));
    }

    #[test]
    fn random_draws_satisfy_premise() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1234);
        for _ in 0..50 {
            let (h, k) = random_admissible_pair(&mut rng, 3, 0.9);
            let b = gse_lower_bound(&h, &k).expect("premise should hold");
            assert!(b.premise_margin > -1e-12);
            assert!(b.bound <= 0.0);
        }
    }
}
