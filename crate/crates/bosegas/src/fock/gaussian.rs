//! Quasi-free (Gaussian) state construction and one-body reduction.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::bogoliubov::pair::PairState;
use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::fock::ops::{ladder_matrices, pair_create};
use crate::fock::state::FockVector;
use crate::linalg;

pub const PURITY_GATE: f64 = 1e-8;
pub const TAIL_BUDGET: f64 = 1e-6;

/// One-body density and pairing matrices of a normalized state:
/// gamma_jk = <a^dag_k a_j>, alpha_jk = <a_j a_k>.
pub fn extract_one_body(phi: &FockVector) -> PairState {
    let m = phi.basis.n_modes();
    let ops = ladder_matrices(&phi.basis);
    let lowered: Vec<Array1<C64>> = (0..m).map(|j| ops.lower[j].apply(&phi.amps)).collect();
    let mut gamma: Array2<C64> = Array2::zeros((m, m));
    let mut alpha: Array2<C64> = Array2::zeros((m, m));
    for j in 0..m {
        for k in 0..m {
            gamma[(j, k)] = linalg::inner(&lowered[k], &lowered[j]);
            let akj = ops.lower[j].apply(&lowered[k]);
            alpha[(j, k)] = linalg::inner(&phi.amps, &akj);
        }
    }
    // clean roundoff against the structural symmetries
    let gamma_h = linalg::conj_transpose(&gamma);
    let gamma = (&gamma + &gamma_h).mapv(|z| 0.5 * z);
    let alpha_t = linalg::transpose(&alpha);
    let alpha = (&alpha + &alpha_t).mapv(|z| 0.5 * z);
    PairState { time: 0.0, gamma, alpha }
}

/// Build the pure Gaussian vector with the given one-body data,
/// exp(1/2 sum Z_jk a^dag_j a^dag_k)|vac> normalized, where Z solves
/// alpha = (1 + gamma) Z. The particle-number cutoff must leave negligible
/// weight in the top shells, otherwise the construction is rejected.
pub fn quasifree_from_pair(pair: &PairState, basis: Arc<FockBasis>) -> Result<FockVector> {
    quasifree_from_pair_with_gate(pair, basis, PURITY_GATE)
}

/// [`quasifree_from_pair`] with an explicit purity gate, for callers whose
/// pair data carries a known integrator drift.
pub fn quasifree_from_pair_with_gate(
    pair: &PairState,
    basis: Arc<FockBasis>,
    purity_gate: f64,
) -> Result<FockVector> {
    let m = pair.n_modes();
    if m != basis.n_modes() {
        return Err(Error::ShapeMismatch(format!(
            "pair has {m} modes, basis has {}",
            basis.n_modes()
        )));
    }
    let purity = pair.purity_residual();
    if purity > purity_gate {
        return Err(Error::NotPure(purity));
    }

    // Z = (1 + gamma)^{-1} alpha, symmetric for pure pairs
    let mut one_plus_gamma = pair.gamma.clone();
    for i in 0..m {
        one_plus_gamma[(i, i)] += 1.0;
    }
    let inv = linalg::inv_hermitian_pd(&one_plus_gamma);
    let z = inv.dot(&pair.alpha);
    let z_t = linalg::transpose(&z);
    let z = (&z + &z_t).mapv(|v| 0.5 * v);

    // expand exp(P) |vac> with P = 1/2 a^dag Z a^dag; P is nilpotent on the
    // truncated space so the series terminates
    let creator = pair_create(&z, &basis)?;
    let mut vec: Array1<C64> = Array1::zeros(basis.len());
    vec[basis.vacuum_index()] = C64::new(1.0, 0.0);
    let mut term = vec.clone();
    let mut p = 1usize;
    loop {
        term = creator.apply(&term);
        term.mapv_inplace(|v| v / p as f64);
        let term_norm = linalg::norm(&term);
        if term_norm == 0.0 {
            break;
        }
        vec.zip_mut_with(&term, |x, y| *x += y);
        p += 1;
        if 2 * p > basis.nmax() + 2 {
            break;
        }
    }

    let state = FockVector::new(basis, vec)?.normalized();
    let nmax = state.basis.nmax();
    let tail = state.shell_weight(nmax) + if nmax > 0 { state.shell_weight(nmax - 1) } else { 0.0 };
    if tail > TAIL_BUDGET {
        return Err(Error::CutoffTooSmall { tail, budget: TAIL_BUDGET });
    }
    Ok(state)
}
