//! Fixed-step RK4 with a halved-step acceptance check, plus cubic Hermite
//! dense output used to rebuild time-dependent generators between macro
//! steps.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// State vector for the generic RK4 driver.
pub trait OdeState: Clone {
    /// self += a * other
    fn scaled_add(&mut self, a: f64, other: &Self);
    /// Distance used by the halved-step acceptance check.
    fn dist(&self, other: &Self) -> f64;
}

impl OdeState for Array1<C64> {
    fn scaled_add(&mut self, a: f64, other: &Self) {
        self.zip_mut_with(other, |x, y| *x += a * y);
    }
    fn dist(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other.iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// One classical RK4 step.
pub fn rk4_step<S, F>(f: &mut F, t: f64, dt: f64, y: &S) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    let k1 = f(t, y)?;
    let mut y2 = y.clone();
    y2.scaled_add(0.5 * dt, &k1);
    let k2 = f(t + 0.5 * dt, &y2)?;
    let mut y3 = y.clone();
    y3.scaled_add(0.5 * dt, &k2);
    let k3 = f(t + 0.5 * dt, &y3)?;
    let mut y4 = y.clone();
    y4.scaled_add(dt, &k3);
    let k4 = f(t + dt, &y4)?;
    let mut out = y.clone();
    out.scaled_add(dt / 6.0, &k1);
    out.scaled_add(dt / 3.0, &k2);
    out.scaled_add(dt / 3.0, &k3);
    out.scaled_add(dt / 6.0, &k4);
    Ok(out)
}

/// One macro step of size `dt`. When `check_tol` is set, the step is re-run
/// as two half steps; a disagreement above the tolerance rejects the step,
/// otherwise the finer result is kept.
pub fn rk4_macro_step<S, F>(
    f: &mut F,
    t: f64,
    dt: f64,
    y: &S,
    check_tol: Option<f64>,
) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    let coarse = rk4_step(f, t, dt, y)?;
    match check_tol {
        None => Ok(coarse),
        Some(tol) => {
            let half = rk4_step(f, t, 0.5 * dt, y)?;
            let fine = rk4_step(f, t + 0.5 * dt, 0.5 * dt, &half)?;
            let disagreement = coarse.dist(&fine);
            if disagreement > tol {
                Err(Error::StepRejected { t, disagreement, tol })
            } else {
                Ok(fine)
            }
        }
    }
}

/// Number of uniform steps covering `span` with step at most `dt`.
pub fn step_count(span: f64, dt: f64) -> usize {
    ((span.abs() / dt).ceil() as usize).max(1)
}

/// Cubic Hermite interpolation of a complex vector given endpoint values
/// and derivatives.
pub fn hermite(
    t0: f64,
    y0: &Array1<C64>,
    d0: &Array1<C64>,
    t1: f64,
    y1: &Array1<C64>,
    d1: &Array1<C64>,
    t: f64,
) -> Array1<C64> {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let mut out = y0.mapv(|z| z * h00);
    out.zip_mut_with(d0, |x, y| *x += h10 * h * y);
    out.zip_mut_with(y1, |x, y| *x += h01 * y);
    out.zip_mut_with(d1, |x, y| *x += h11 * h * y);
    out
}

/// Scalar cubic Hermite interpolation.
pub fn hermite_scalar(t0: f64, y0: f64, d0: f64, t1: f64, y1: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rk4_phase_rotation() {
        // y' = -i y, y(0) = 1 -> y(t) = e^{-it}
        let mut f = |_t: f64, y: &Array1<C64>| Ok(y.mapv(|z| -C64::i() * z));
        let mut y = array![C64::new(1.0, 0.0)];
        let dt = 1e-3;
        let steps = 1000;
        for n in 0..steps {
            y = rk4_step(&mut f, n as f64 * dt, dt, &y).unwrap();
        }
        let exact = C64::new(0.0, -1.0).exp();
        assert!((y[0] - exact).norm() < 1e-12);
    }

    #[test]
    fn step_rejection_triggers() {
        // stiff exponential growth makes dt = 1 wildly inaccurate
        let mut f = |_t: f64, y: &Array1<C64>| Ok(y.mapv(|z| 20.0 * z));
        let y = array![C64::new(1.0, 0.0)];
        let r = rk4_macro_step(&mut f, 0.0, 1.0, &y, Some(1e-9));
        assert!(matches!(r, Err(Error::StepRejected { .. })));
    }

    #[test]
    fn hermite_reproduces_cubic() {
        // y(t) = t^3 on [1, 2]
        let y = |t: f64| t * t * t;
        let d = |t: f64| 3.0 * t * t;
        let got = hermite_scalar(1.0, y(1.0), d(1.0), 2.0, y(2.0), d(2.0), 1.37);
        assert!((got - y(1.37)).abs() < 1e-13);
    }
}
