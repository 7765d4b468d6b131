//! Least-squares fit of the error decay rate in N.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateFit {
    pub beta: f64,
    /// (N, error^2) points the fit used.
    pub points: Vec<(usize, f64)>,
    /// Slope of log error^2 against log N.
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    /// The (2 beta - 1) / 2 reference exponent; reported, never asserted.
    pub reference_slope: f64,
    pub slope_minus_reference: f64,
}

/// Fit log error^2 = slope log N + intercept by least squares. Needs at
/// least three points with strictly positive errors.
pub fn fit_rate(beta: f64, points: &[(usize, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::BadFitInput(format!("{} points", points.len())));
    }
    if let Some((n, e)) = points.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(Error::BadFitInput(format!("error^2 = {e} at N = {n}")));
    }
    let xs: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, e)| e.ln()).collect();
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys.iter()).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::BadFitInput("degenerate N values".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residual = (xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let reference_slope = (2.0 * beta - 1.0) / 2.0;
    Ok(RateFit {
        beta,
        points: points.to_vec(),
        slope,
        intercept,
        residual,
        reference_slope,
        slope_minus_reference: slope - reference_slope,
    })
}
