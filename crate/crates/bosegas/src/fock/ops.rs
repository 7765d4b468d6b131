//! Second-quantized operators on the truncated Fock basis.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::sparse::{SparseBuilder, SparseOp};

/// Sparse annihilation and creation matrices for every mode. Creation drops
/// amplitudes that would cross the particle-number cutoff; annihilation is
/// its exact adjoint on the truncated space.
pub struct LadderOps {
    pub lower: Vec<SparseOp>,
    pub raise: Vec<SparseOp>,
}

pub fn ladder_matrices(basis: &FockBasis) -> LadderOps {
    let dim = basis.len();
    let m = basis.n_modes();
    let mut lower = Vec::with_capacity(m);
    let mut raise = Vec::with_capacity(m);
    let mut scratch: Vec<u32> = vec![0; m];
    for j in 0..m {
        let mut bl = SparseBuilder::new(dim, dim);
        let mut br = SparseBuilder::new(dim, dim);
        for s in 0..dim {
            let occ = basis.occupation(s);
            let nj = occ[j];
            if nj > 0 {
                scratch.copy_from_slice(occ);
                scratch[j] -= 1;
                let t = basis.index_of(&scratch).expect("lowering stays inside");
                bl.push(t, s, C64::new((nj as f64).sqrt(), 0.0));
            }
            if basis.total(s) < basis.nmax() {
                scratch.copy_from_slice(occ);
                scratch[j] += 1;
                let t = basis.index_of(&scratch).expect("raising inside cutoff");
                br.push(t, s, C64::new((nj as f64 + 1.0).sqrt(), 0.0));
            }
        }
        lower.push(bl.build());
        raise.push(br.build());
    }
    LadderOps { lower, raise }
}

/// Diagonal of the number operator dGamma(1).
pub fn number_diagonal(basis: &FockBasis) -> Vec<f64> {
    (0..basis.len()).map(|i| basis.total(i) as f64).collect()
}

/// dGamma(h) = sum_{jk} h_jk a^dag_j a_k, assembled state by state; exactly
/// particle-number conserving, Hermitian for Hermitian h.
pub fn dgamma(h: &Array2<C64>, basis: &FockBasis) -> Result<SparseOp> {
    let m = basis.n_modes();
    if h.nrows() != m || h.ncols() != m {
        return Err(Error::ShapeMismatch(format!(
            "one-body matrix is {}x{}, basis has {m} modes",
            h.nrows(),
            h.ncols()
        )));
    }
    let dim = basis.len();
    let mut b = SparseBuilder::new(dim, dim);
    let mut scratch: Vec<u32> = vec![0; m];
    for s in 0..dim {
        let occ = basis.occupation(s);
        for k in 0..m {
            let nk = occ[k];
            if nk == 0 {
                continue;
            }
            for j in 0..m {
                let hjk = h[(j, k)];
                if hjk == C64::new(0.0, 0.0) {
                    continue;
                }
                if j == k {
                    b.push(s, s, hjk * nk as f64);
                } else {
                    scratch.copy_from_slice(occ);
                    scratch[k] -= 1;
                    scratch[j] += 1;
                    let t = basis.index_of(&scratch).expect("number conserving");
                    let amp = (nk as f64).sqrt() * (occ[j] as f64 + 1.0).sqrt();
                    b.push(t, s, hjk * amp);
                }
            }
        }
    }
    Ok(b.build())
}

/// 1/2 sum_{jk} K_jk a^dag_j a^dag_k for symmetric K, truncation-aware.
pub fn pair_create(k2: &Array2<C64>, basis: &FockBasis) -> Result<SparseOp> {
    let m = basis.n_modes();
    if k2.nrows() != m || k2.ncols() != m {
        return Err(Error::ShapeMismatch("pairing matrix size mismatch".into()));
    }
    let dim = basis.len();
    let mut b = SparseBuilder::new(dim, dim);
    let mut scratch: Vec<u32> = vec![0; m];
    for s in 0..dim {
        if basis.total(s) + 2 > basis.nmax() {
            continue;
        }
        let occ = basis.occupation(s);
        for j in 0..m {
            for k in 0..m {
                let kjk = k2[(j, k)];
                if kjk == C64::new(0.0, 0.0) {
                    continue;
                }
                scratch.copy_from_slice(occ);
                let amp_k = (scratch[k] as f64 + 1.0).sqrt();
                scratch[k] += 1;
                let amp_j = (scratch[j] as f64 + 1.0).sqrt();
                scratch[j] += 1;
                let t = basis.index_of(&scratch).expect("inside cutoff");
                b.push(t, s, 0.5 * kjk * amp_j * amp_k);
            }
        }
    }
    Ok(b.build())
}

/// The quadratic fluctuation Hamiltonian
/// dGamma(h) + 1/2 sum (K2 a^dag a^dag + conj(K2) a a).
pub fn assemble_quadratic(
    h: &Array2<C64>,
    k2: &Array2<C64>,
    basis: &FockBasis,
) -> Result<SparseOp> {
    let dg = dgamma(h, basis)?;
    let pc = pair_create(k2, basis)?;
    let pa = pc.dagger();
    Ok(dg.add(&pc).add(&pa))
}
