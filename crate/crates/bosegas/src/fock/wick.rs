//! Wick-factorization diagnostics and quasi-free moment bounds.

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::fock::gaussian::extract_one_body;
use crate::fock::ops::{ladder_matrices, LadderOps};
use crate::fock::state::FockVector;
use crate::linalg;

pub const QUASIFREE_GATE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Lower,
    Raise,
}

#[derive(Debug, Clone)]
pub struct WickSampleSpec {
    /// Cap on the number of mode quadruples; all of them when M^4 fits.
    pub max_quadruples: usize,
    /// Seed for the subsample when the cap binds.
    pub seed: u64,
}

impl Default for WickSampleSpec {
    fn default() -> Self {
        WickSampleSpec { max_quadruples: 256, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WickReport {
    /// Max |<A1 A2 A3 A4> - pairing sum| over the sampled correlators.
    pub max_residual: f64,
    /// Max |odd correlator| over 1- and 3-point samples.
    pub max_odd_residual: f64,
    pub quadruples_checked: usize,
}

fn apply(ops: &LadderOps, kind: Kind, mode: usize, v: &Array1<C64>) -> Array1<C64> {
    match kind {
        Kind::Lower => ops.lower[mode].apply(v),
        Kind::Raise => ops.raise[mode].apply(v),
    }
}

/// Check Wick's factorization of 4-point correlators against the pairing
/// sum built from (gamma, alpha), over a deterministic sample of mode
/// quadruples; odd 1- and 3-point correlators are checked against zero.
pub fn wick_check(phi: &FockVector, spec: &WickSampleSpec) -> WickReport {
    let m = phi.basis.n_modes();
    let ops = ladder_matrices(&phi.basis);
    let pair = extract_one_body(phi);

    let delta = |j: usize, k: usize| if j == k { 1.0 } else { 0.0 };
    // <A_a A_b> with the operators kept in order
    let two_point = |a: (Kind, usize), b: (Kind, usize)| -> C64 {
        match (a.0, b.0) {
            (Kind::Lower, Kind::Lower) => pair.alpha[(a.1, b.1)],
            (Kind::Raise, Kind::Raise) => pair.alpha[(a.1, b.1)].conj(),
            (Kind::Raise, Kind::Lower) => pair.gamma[(b.1, a.1)],
            (Kind::Lower, Kind::Raise) => pair.gamma[(a.1, b.1)] + delta(a.1, b.1),
        }
    };

    let quadruples: Vec<[usize; 4]> = {
        let all = m * m * m * m;
        if all <= spec.max_quadruples {
            let mut v = Vec::with_capacity(all);
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            v.push([a, b, c, d]);
                        }
                    }
                }
            }
            v
        } else {
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(spec.seed);
            (0..spec.max_quadruples)
                .map(|_| {
                    [
                        rng.random_range(0..m),
                        rng.random_range(0..m),
                        rng.random_range(0..m),
                        rng.random_range(0..m),
                    ]
                })
                .collect()
        }
    };

    let mut max_residual = 0.0_f64;
    for modes in &quadruples {
        for pattern in 0..16u8 {
            let kinds: Vec<Kind> = (0..4)
                .map(|i| if pattern >> i & 1 == 1 { Kind::Raise } else { Kind::Lower })
                .collect();
            let a: Vec<(Kind, usize)> =
                kinds.iter().zip(modes.iter()).map(|(&k, &j)| (k, j)).collect();
            // actual correlator, operators applied right to left
            let mut v = phi.amps.clone();
            for i in (0..4).rev() {
                v = apply(&ops, a[i].0, a[i].1, &v);
            }
            let actual = linalg::inner(&phi.amps, &v);
            let pairing = two_point(a[0], a[1]) * two_point(a[2], a[3])
                + two_point(a[0], a[2]) * two_point(a[1], a[3])
                + two_point(a[0], a[3]) * two_point(a[1], a[2]);
            max_residual = max_residual.max((actual - pairing).norm());
        }
    }

    // odd correlators must vanish
    let mut max_odd = 0.0_f64;
    for j in 0..m {
        for kind in [Kind::Lower, Kind::Raise] {
            let v = apply(&ops, kind, j, &phi.amps);
            max_odd = max_odd.max(linalg::inner(&phi.amps, &v).norm());
        }
    }
    let triples: Vec<[usize; 3]> = {
        let mut v = Vec::new();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    v.push([a, b, c]);
                    if v.len() >= spec.max_quadruples {
                        break;
                    }
                }
            }
        }
        v
    };
    for modes in &triples {
        for pattern in 0..8u8 {
            let mut v = phi.amps.clone();
            for i in (0..3).rev() {
                let kind = if pattern >> i & 1 == 1 { Kind::Raise } else { Kind::Lower };
                v = apply(&ops, kind, modes[i], &v);
            }
            max_odd = max_odd.max(linalg::inner(&phi.amps, &v).norm());
        }
    }

    WickReport {
        max_residual,
        max_odd_residual: max_odd,
        quadruples_checked: quadruples.len(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MomentCheck {
    pub s: u32,
    /// <(1 + N)^s>
    pub lhs: f64,
    /// <1 + N>^s
    pub rhs_base: f64,
    /// lhs / <1 + N>^s, the empirical constant C_s
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy)]
pub enum MomentOutcome {
    /// The state failed the Wick gate; the bound only applies to quasi-free
    /// states, so the check is skipped.
    NotQuasiFree { wick_residual: f64 },
    Checked(MomentCheck),
}

/// Both sides of the quasi-free moment bound <(1+N)^s> <= C_s <1+N>^s.
pub fn moment_check(phi: &FockVector, s: u32) -> Result<MomentOutcome> {
    if !(2..=4).contains(&s) {
        return Err(Error::InvalidParameter("moment order s must be 2, 3 or 4".into()));
    }
    let report = wick_check(phi, &WickSampleSpec::default());
    if report.max_residual > QUASIFREE_GATE {
        return Ok(MomentOutcome::NotQuasiFree { wick_residual: report.max_residual });
    }
    let mut lhs = 0.0;
    let mut mean = 0.0;
    for i in 0..phi.basis.len() {
        let w = phi.amps[i].norm_sqr();
        let n1 = 1.0 + phi.basis.total(i) as f64;
        lhs += n1.powi(s as i32) * w;
        mean += n1 * w;
    }
    let rhs_base = mean.powi(s as i32);
    Ok(MomentOutcome::Checked(MomentCheck { s, lhs, rhs_base, ratio: lhs / rhs_base }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::pair::PairState;
    use crate::fock::basis::FockBasis;
    use crate::fock::gaussian::quasifree_from_pair;
    use ndarray::Array1;
    use std::sync::Arc;

    #[test]
    fn vacuum_is_exactly_quasifree() {
        let basis = Arc::new(FockBasis::new(2, 4).unwrap());
        let vac = FockVector::vacuum(basis);
        let r = wick_check(&vac, &WickSampleSpec::default());
        assert!(r.max_residual < 1e-12);
        assert!(r.max_odd_residual < 1e-12);
    }

    #[test]
    fn gaussian_states_pass() {
        let basis = Arc::new(FockBasis::new(2, 24).unwrap());
        let pair = PairState::squeezed_mode(2, 1, 0.35);
        let phi = quasifree_from_pair(&pair, basis).unwrap();
        let r = wick_check(&phi, &WickSampleSpec::default());
        assert!(r.max_residual < 1e-8, "residual {}", r.max_residual);
        assert!(r.max_odd_residual < 1e-12);
    }

    #[test]
    fn single_particle_negative_control() {
        // |1_j> is not quasi-free. Direct computation of the worst entry,
        // <a^dag a^dag a a> on the occupied mode: the true correlator is
        // n(n-1) = 0 while the pairing sum is 2 gamma^2 + |alpha|^2 = 2,
        // so the residual there is exactly 2.
        let basis = Arc::new(FockBasis::new(2, 4).unwrap());
        let mut amps: Array1<C64> = Array1::zeros(basis.len());
        amps[basis.index_of(&[1, 0]).unwrap()] = C64::new(1.0, 0.0);
        let phi = FockVector::new(basis, amps).unwrap();
        let r = wick_check(&phi, &WickSampleSpec::default());
        assert!((r.max_residual - 2.0).abs() < 1e-12, "residual {}", r.max_residual);
    }

    #[test]
    fn moment_vacuum_baseline() {
        let basis = Arc::new(FockBasis::new(2, 4).unwrap());
        let vac = FockVector::vacuum(basis);
        for s in 2..=4 {
            match moment_check(&vac, s).unwrap() {
                MomentOutcome::Checked(m) => {
                    assert!((m.lhs - 1.0).abs() < 1e-14);
                    assert!((m.rhs_base - 1.0).abs() < 1e-14);
                }
                _ => panic!("vacuum must be quasi-free"),
            }
        }
    }

    #[test]
    fn moment_squeezed_against_amplitude_sum() {
        let r = 0.3;
        let basis = Arc::new(FockBasis::new(1, 24).unwrap());
        let phi = quasifree_from_pair(&PairState::one_mode_squeezed(r), basis).unwrap();
        let outcome = moment_check(&phi, 2).unwrap();
        let m = match outcome {
            MomentOutcome::Checked(m) => m,
            _ => panic!("squeezed vacuum is quasi-free"),
        };
        // independent amplitude-sum oracle from the closed-form amplitudes
        let z = r.tanh();
        let mut lhs_oracle = 0.0;
        let mut fact = 1.0;
        let mut fact2 = 1.0;
        for mm in 0..12usize {
            if mm > 0 {
                fact *= mm as f64;
                fact2 *= (2 * mm - 1) as f64 * (2 * mm) as f64;
            }
            let amp = z.powi(mm as i32) * fact2.sqrt()
                / (2f64.powi(mm as i32) * fact * r.cosh().sqrt());
            lhs_oracle += (1.0 + 2.0 * mm as f64).powi(2) * amp * amp;
        }
        assert!((m.lhs - lhs_oracle).abs() < 1e-10, "{} vs {lhs_oracle}", m.lhs);
        assert!(m.ratio.is_finite() && m.ratio >= 1.0);
    }

    #[test]
    fn moment_guard_rejects_non_quasifree() {
        let basis = Arc::new(FockBasis::new(1, 6).unwrap());
        let mut amps: Array1<C64> = Array1::zeros(basis.len());
        amps[basis.index_of(&[2]).unwrap()] = C64::new(1.0, 0.0);
        let phi = FockVector::new(basis, amps).unwrap();
        assert!(matches!(
            moment_check(&phi, 2).unwrap(),
            MomentOutcome::NotQuasiFree { .. }
        ));
    }

    #[test]
    fn moment_order_is_guarded() {
        let basis = Arc::new(FockBasis::new(1, 4).unwrap());
        let vac = FockVector::vacuum(basis);
        assert!(moment_check(&vac, 5).is_err());
        assert!(moment_check(&vac, 1).is_err());
    }
}
