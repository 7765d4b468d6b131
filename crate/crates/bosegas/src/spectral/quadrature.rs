//! Adaptive Simpson quadrature for the potential Fourier coefficients.

/// Result of an adaptive integration: value and an error estimate.
pub struct Quadrature {
    pub value: f64,
    pub residual: f64,
}

/// Adaptive Simpson rule on [a, b]. The returned residual is the final
/// Richardson error estimate; callers decide whether it is acceptable.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Quadrature {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        worst: &mut f64,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let err = (left + right - whole) / 15.0;
        if err.abs() <= tol || depth >= 48 {
            if depth >= 48 {
                *worst = worst.max(err.abs());
            }
            return left + right + err;
        }
        recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth + 1, worst)
            + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth + 1, worst)
    }

    if a == b {
        return Quadrature { value: 0.0, residual: 0.0 };
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, fa, b, fb, fm);
    let mut worst = 0.0;
    let value = recurse(f, a, fa, b, fb, fm, whole, tol, 0, &mut worst);
    Quadrature { value, residual: worst }
}

/// Bessel J0 via the integral representation, evaluated with a midpoint
/// rule; exponentially accurate for the analytic periodic integrand.
pub fn bessel_j0(z: f64) -> f64 {
    const N: usize = 160;
    let h = std::f64::consts::PI / N as f64;
    let mut acc = 0.0;
    for i in 0..N {
        let theta = (i as f64 + 0.5) * h;
        acc += (z * theta.sin()).cos();
    }
    acc * h / std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_polynomial_exact() {
        let q = adaptive_simpson(&|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-13);
        assert!((q.value - (4.0 - 4.0)).abs() < 1e-12);
        assert!(q.residual < 1e-13);
    }

    #[test]
    fn simpson_trig() {
        let q = adaptive_simpson(&|x| (3.0 * x).cos(), 0.0, PI / 2.0, 1e-13);
        assert!((q.value + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn j0_reference_values() {
        // J0(0) = 1; J0(2.404825557695773) is the first zero
        assert!((bessel_j0(0.0) - 1.0).abs() < 1e-14);
        assert!(bessel_j0(2.404825557695773).abs() < 1e-12);
        // J0(1) = 0.7651976865579666
        assert!((bessel_j0(1.0) - 0.7651976865579666).abs() < 1e-12);
    }
}
