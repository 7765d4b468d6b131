//! Scaled two-body interaction and its Fourier coefficients.
//!
//! The interaction is a nonnegative, spherically symmetric decreasing
//! profile w, scaled as w_N(x) = N^{d beta} w(N^beta x) so the L1 mass is
//! preserved in every dimension. Its Fourier coefficients obey
//! w_N_hat(k) = w_hat(k N^{-beta}) and are evaluated by adaptive quadrature
//! of the radial transform; the k = 0 coefficient is the L1 mass and is
//! cached once so it is bit-identical across all (N, beta).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::basis::ModeBasis;
use crate::spectral::quadrature::{adaptive_simpson, bessel_j0};

pub const QUADRATURE_TOL: f64 = 1e-12;
pub const QUADRATURE_ACCEPT: f64 = 1e-10;

/// A compactly supported radial interaction profile.
pub trait RadialProfile: Send + Sync {
    fn name(&self) -> &'static str;
    /// Support radius: w(r) = 0 for r >= radius.
    fn radius(&self) -> f64;
    fn eval(&self, r: f64) -> f64;
}

/// w(r) = c (1 + cos(pi r / R)) on [0, R]: nonnegative, decreasing, C^1 and
/// compactly supported. Amplitude 0 switches the interaction off.
#[derive(Debug, Clone)]
pub struct CosineBump {
    pub amplitude: f64,
    pub radius: f64,
}

impl CosineBump {
    pub fn new(amplitude: f64, radius: f64) -> Result<Self> {
        if amplitude < 0.0 {
            return Err(Error::InvalidParameter("bump amplitude must be >= 0".into()));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter("bump radius must be > 0".into()));
        }
        Ok(CosineBump { amplitude, radius })
    }
}

impl RadialProfile for CosineBump {
    fn name(&self) -> &'static str {
        "cosine-bump"
    }
    fn radius(&self) -> f64 {
        self.radius
    }
    fn eval(&self, r: f64) -> f64 {
        if r >= self.radius {
            0.0
        } else {
            self.amplitude * (1.0 + (std::f64::consts::PI * r / self.radius).cos())
        }
    }
}

/// Look up a profile by its config-file name.
pub fn profile_by_name(
    name: &str,
    amplitude: f64,
    radius: f64,
) -> Result<Arc<dyn RadialProfile>> {
    match name {
        "cosine-bump" => Ok(Arc::new(CosineBump::new(amplitude, radius)?)),
        other => Err(Error::InvalidParameter(format!("unknown profile '{other}'"))),
    }
}

/// The interaction w_N for a particular (N, beta) with its Fourier
/// coefficients cached on the difference lattice of a basis.
#[derive(Clone)]
pub struct ScaledPotential {
    profile: Arc<dyn RadialProfile>,
    beta: f64,
    n_particles: usize,
    w_hat: Vec<f64>,
    w_l1: f64,
    dimension: usize,
    length: f64,
    kmax: i64,
}

impl std::fmt::Debug for ScaledPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScaledPotential")
            .field("profile", &self.profile.name())
            .field("beta", &self.beta)
            .field("n_particles", &self.n_particles)
            .field("w_l1", &self.w_l1)
            .finish()
    }
}

/// Radial Fourier transform w_hat(|xi|) = int w(|x|) e^{-2 pi i xi.x / L} dx
/// for dimensions 1..=3, by adaptive Simpson on [0, R].
fn radial_fourier(
    profile: &dyn RadialProfile,
    dimension: usize,
    kappa: f64, // 2 pi |xi| / L
    tol: f64,
) -> (f64, f64) {
    let r_max = profile.radius();
    let integrand: Box<dyn Fn(f64) -> f64> = match dimension {
        1 => Box::new(move |r| (kappa * r).cos()),
        2 => Box::new(move |r| bessel_j0(kappa * r) * r),
        3 => Box::new(move |r| {
            let z = kappa * r;
            let sinc = if z.abs() < 1e-8 { 1.0 - z * z / 6.0 } else { z.sin() / z };
            sinc * r * r
        }),
        _ => unreachable!("checked in build"),
    };
    let surface = match dimension {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => unreachable!(),
    };
    let q = adaptive_simpson(&|r| profile.eval(r) * integrand(r), 0.0, r_max, tol);
    (surface * q.value, surface * q.residual)
}

impl ScaledPotential {
    pub fn build(
        profile: Arc<dyn RadialProfile>,
        beta: f64,
        n_particles: usize,
        basis: &ModeBasis,
    ) -> Result<Self> {
        if n_particles < 2 {
            return Err(Error::InvalidParameter("N must be >= 2".into()));
        }
        if !(0.0..0.5).contains(&beta) {
            return Err(Error::InvalidParameter(
                "scaling exponent beta must lie in [0, 1/2)".into(),
            ));
        }
        if basis.dimension() > 3 {
            return Err(Error::InvalidParameter(
                "potential transforms are implemented for d <= 3".into(),
            ));
        }
        let scale = (n_particles as f64).powf(-beta);
        if profile.radius() * scale > basis.length() / 2.0 {
            return Err(Error::InvalidParameter(format!(
                "scaled support radius {} exceeds half the torus length {}",
                profile.radius() * scale,
                basis.length() / 2.0
            )));
        }

        let (w_l1, _) = radial_fourier(profile.as_ref(), basis.dimension(), 0.0, 1e-14);
        let two_pi_over_l = 2.0 * std::f64::consts::PI / basis.length();
        let diff = basis.diff();
        let mut w_hat = vec![0.0; diff.len()];
        // radially symmetric: cache by |k|^2
        let mut cache: std::collections::HashMap<i64, f64> = std::collections::HashMap::new();
        for m in 0..diff.len() {
            let k = diff.offset(m);
            let ksq: i64 = k.iter().map(|&x| x * x).sum();
            if ksq == 0 {
                w_hat[m] = w_l1;
                continue;
            }
            if let Some(&v) = cache.get(&ksq) {
                w_hat[m] = v;
                continue;
            }
            let kappa = two_pi_over_l * (ksq as f64).sqrt() * scale;
            let (value, residual) = radial_fourier(profile.as_ref(), basis.dimension(), kappa, QUADRATURE_TOL);
            if residual > QUADRATURE_ACCEPT {
                return Err(Error::QuadratureNonConvergence {
                    index: k.to_vec(),
                    tol: QUADRATURE_ACCEPT,
                    residual,
                });
            }
            cache.insert(ksq, value);
            w_hat[m] = value;
        }

        Ok(ScaledPotential {
            profile,
            beta,
            n_particles,
            w_hat,
            w_l1,
            dimension: basis.dimension(),
            length: basis.length(),
            kmax: basis.kmax(),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    /// Fourier coefficients over the difference lattice of the basis.
    pub fn w_hat(&self) -> &[f64] {
        &self.w_hat
    }

    pub fn w_hat_at(&self, diff_index: usize) -> f64 {
        self.w_hat[diff_index]
    }

    /// L1 mass of the unscaled profile (= w_N_hat(0) for every N, beta).
    pub fn l1_mass(&self) -> f64 {
        self.w_l1
    }

    pub fn is_zero(&self) -> bool {
        self.w_hat.iter().all(|&v| v == 0.0)
    }

    pub fn profile(&self) -> &dyn RadialProfile {
        self.profile.as_ref()
    }

    pub fn ensure_basis(&self, basis: &ModeBasis) -> Result<()> {
        if self.dimension == basis.dimension()
            && self.length == basis.length()
            && self.kmax == basis.kmax()
        {
            Ok(())
        } else {
            Err(Error::BasisMismatch(
                "potential was built for a different basis".into(),
            ))
        }
    }

    /// w_N evaluated in position space with torus wrapping, for oracles.
    pub fn eval_position(&self, x: &[f64]) -> f64 {
        let scale = (self.n_particles as f64).powf(self.beta);
        let mut r_sq = 0.0;
        for &xi in x {
            let mut w = xi.rem_euclid(self.length);
            if w > self.length / 2.0 {
                w -= self.length;
            }
            r_sq += w * w;
        }
        scale.powi(self.dimension as i32) * self.profile.eval(scale * r_sq.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    /// Closed-form d=1 transform of the cosine bump, the independent oracle:
    /// w_hat(xi) = 2 c pi^2 sin(a R) / (a (pi^2 - a^2 R^2)), a = 2 pi xi / L.
    fn bump_hat_1d(c: f64, r: f64, l: f64, xi: f64) -> f64 {
        let a = TAU * xi / l;
        let pi = std::f64::consts::PI;
        if a.abs() < 1e-12 {
            return 2.0 * c * r;
        }
        let denom = a * (pi * pi - a * a * r * r);
        if denom.abs() < 1e-9 {
            // removable singularity at aR = pi; offset slightly
            return (bump_hat_1d(c, r, l, xi * (1.0 + 1e-7))
                + bump_hat_1d(c, r, l, xi * (1.0 - 1e-7)))
                / 2.0;
        }
        2.0 * c * pi * pi * (a * r).sin() / denom
    }

    fn basis_1d(kmax: i64) -> ModeBasis {
        ModeBasis::new(1, TAU, kmax).unwrap()
    }

    #[test]
    fn l1_mass_unit_bump() {
        let b = basis_1d(2);
        let p = ScaledPotential::build(Arc::new(CosineBump::new(1.0, 1.0).unwrap()), 0.0, 4, &b).unwrap();
        assert!((p.l1_mass() - 2.0).abs() < 1e-12);
        let m0 = b.diff().index_of(&[0]).unwrap();
        assert_eq!(p.w_hat_at(m0), p.l1_mass());
    }

    #[test]
    fn l1_mass_higher_dimensions() {
        let pi = std::f64::consts::PI;
        let b2 = ModeBasis::new(2, 8.0, 1).unwrap();
        let p2 = ScaledPotential::build(Arc::new(CosineBump::new(1.0, 1.0).unwrap()), 0.0, 4, &b2).unwrap();
        assert!((p2.l1_mass() - (pi - 4.0 / pi)).abs() < 1e-11);
        let b3 = ModeBasis::new(3, 8.0, 1).unwrap();
        let p3 = ScaledPotential::build(Arc::new(CosineBump::new(1.0, 1.0).unwrap()), 0.0, 4, &b3).unwrap();
        assert!((p3.l1_mass() - (4.0 * pi / 3.0 - 8.0 / pi)).abs() < 1e-11);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let b = basis_1d(3);
        let p = ScaledPotential::build(Arc::new(CosineBump::new(1.3, 0.8).unwrap()), 0.0, 4, &b).unwrap();
        for m in 0..b.diff().len() {
            let k = b.diff().offset(m)[0];
            let expect = bump_hat_1d(1.3, 0.8, TAU, k as f64);
            assert!(
                (p.w_hat_at(m) - expect).abs() < 1e-10,
                "k={k}: {} vs {}",
                p.w_hat_at(m),
                expect
            );
        }
    }

    #[test]
    fn beta_zero_is_unscaled() {
        let b = basis_1d(2);
        let bump: Arc<dyn RadialProfile> = Arc::new(CosineBump::new(1.0, 1.0).unwrap());
        let p2 = ScaledPotential::build(bump.clone(), 0.0, 2, &b).unwrap();
        let p9 = ScaledPotential::build(bump, 0.0, 9, &b).unwrap();
        for m in 0..b.diff().len() {
            assert_eq!(p2.w_hat_at(m), p9.w_hat_at(m));
        }
    }

    #[test]
    fn scaling_flattens_toward_l1_mass() {
        // at fixed k != 0 and beta = 0.4, w_N_hat(k) -> w_hat(0) as N grows
        let b = basis_1d(2);
        let bump: Arc<dyn RadialProfile> = Arc::new(CosineBump::new(1.0, 1.0).unwrap());
        let m1 = b.diff().index_of(&[1]).unwrap();
        let p16 = ScaledPotential::build(bump.clone(), 0.4, 16, &b).unwrap();
        let p256 = ScaledPotential::build(bump.clone(), 0.4, 256, &b).unwrap();
        let d16 = (p16.w_hat_at(m1) - p16.l1_mass()).abs();
        let d256 = (p256.w_hat_at(m1) - p256.l1_mass()).abs();
        assert!(d256 < d16, "{d256} should be < {d16}");
        // oracle check against the closed form at the scaled argument
        let expect = bump_hat_1d(1.0, 1.0, TAU, (16.0f64).powf(-0.4));
        assert!((p16.w_hat_at(m1) - expect).abs() < 1e-10);
    }

    #[test]
    fn zero_coefficient_identical_across_parameters() {
        let b = basis_1d(2);
        let bump: Arc<dyn RadialProfile> = Arc::new(CosineBump::new(1.0, 1.0).unwrap());
        let reference = ScaledPotential::build(bump.clone(), 0.0, 2, &b).unwrap().l1_mass();
        for (beta, n) in [(0.0, 5), (0.3, 17), (0.45, 64)] {
            let p = ScaledPotential::build(bump.clone(), beta, n, &b).unwrap();
            assert_eq!(p.l1_mass(), reference);
            let m0 = b.diff().index_of(&[0]).unwrap();
            assert_eq!(p.w_hat_at(m0), reference);
        }
    }

    #[test]
    fn support_must_fit_on_torus() {
        let b = ModeBasis::new(1, 1.5, 1).unwrap();
        let r = ScaledPotential::build(Arc::new(CosineBump::new(1.0, 1.0).unwrap()), 0.0, 4, &b);
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn coefficients_even_in_k() {
        let b = basis_1d(2);
        let p = ScaledPotential::build(Arc::new(CosineBump::new(2.0, 0.9).unwrap()), 0.2, 6, &b).unwrap();
        for m in 0..b.diff().len() {
            let neg = b.diff().negated(m);
            assert_eq!(p.w_hat_at(m), p.w_hat_at(neg));
        }
    }

    #[test]
    fn position_space_wraps() {
        let b = basis_1d(2);
        let p = ScaledPotential::build(Arc::new(CosineBump::new(1.0, 1.0).unwrap()), 0.0, 4, &b).unwrap();
        let x = 0.3;
        assert!((p.eval_position(&[x]) - p.eval_position(&[x + TAU])).abs() < 1e-14);
        assert!((p.eval_position(&[x]) - p.eval_position(&[-x])).abs() < 1e-14);
    }
}
