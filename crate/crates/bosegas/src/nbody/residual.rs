//! The generator of the transformed N-body flow on excitation space.
//!
//! Conjugating the exact N-body dynamics with the excitation map turns it
//! into i d/dt Phi_N = H~ Phi_N on the cutoff space (total particles <= N),
//! where H~ is the quadratic fluctuation Hamiltonian plus five correction
//! operators R_0..R_4 carrying the 1/N structure:
//!
//! ```text
//! R0 = dGamma(Q [w_N*|u|^2 + K1t - mu] Q) (1 - Num) / (N - 1)
//! R1 = -2 Num sqrt(N - Num) / (N - 1) a(Q [w_N*|u|^2] u)
//! R2 = [sum (K2)_jk adag_j adag_k] (sqrt((N - Num)(N - Num - 1))/(N-1) - 1)
//! R3 = sqrt(N - Num)/(N - 1) sum conj(u_j) [(1 (x) Q) W (Q (x) Q)]_{(jk),(lm)} adag_k a_l a_m
//! R4 = 1/(2(N - 1)) sum [(Q (x) Q) W (Q (x) Q)]_{(jk),(lm)} adag_j adag_k a_l a_m
//! ```
//!
//! with W the two-body interaction tensor W_{(jk),(lm)} =
//! L^{-d} w_hat(j - l) delta_{j+k,l+m}, the same tensor that builds H_N,
//! and H~ = H_quadratic + 1/2 sum_j (R_j + R_j^dag). A central finite
//! difference of the split N-body flow against H~ Phi_N is the end-to-end
//! consistency check for the whole pipeline.

use std::sync::Arc;

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::bogoliubov::kernels::{build_kernels, KernelSet};
use crate::error::{Error, Result};
use crate::fock::{assemble_quadratic, FockBasis};
use crate::hartree::HartreeTrajectory;
use crate::linalg;
use crate::nbody::excitation::excitation_split;
use crate::nbody::hamiltonian::NBodyTrajectory;
use crate::sparse::{SparseBuilder, SparseOp};
use crate::spectral::{ModeBasis, ScaledPotential};

/// Flat four-index tensor over modes, index ((j M + k) M + l) M + m.
struct Tensor4 {
    m: usize,
    data: Vec<C64>,
}

impl Tensor4 {
    fn zeros(m: usize) -> Self {
        Tensor4 { m, data: vec![C64::new(0.0, 0.0); m * m * m * m] }
    }

    #[inline]
    fn idx(&self, j: usize, k: usize, l: usize, mm: usize) -> usize {
        ((j * self.m + k) * self.m + l) * self.m + mm
    }

    #[inline]
    fn get(&self, j: usize, k: usize, l: usize, mm: usize) -> C64 {
        self.data[self.idx(j, k, l, mm)]
    }

    #[inline]
    fn set(&mut self, j: usize, k: usize, l: usize, mm: usize, v: C64) {
        let i = self.idx(j, k, l, mm);
        self.data[i] = v;
    }

    /// Apply the one-body matrix q on one slot: bra slots (0, 1) contract
    /// as sum_{s'} q_{s s'} t_{..s'..}, ket slots (2, 3) as
    /// sum_{s'} t_{..s'..} q_{s' s}.
    fn contract_slot(&self, slot: usize, q: &ndarray::Array2<C64>) -> Tensor4 {
        let m = self.m;
        let mut out = Tensor4::zeros(m);
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    for mm in 0..m {
                        let mut acc = C64::new(0.0, 0.0);
                        for s in 0..m {
                            let (t, w) = match slot {
                                0 => (self.get(s, k, l, mm), q[(j, s)]),
                                1 => (self.get(j, s, l, mm), q[(k, s)]),
                                2 => (self.get(j, k, s, mm), q[(s, l)]),
                                _ => (self.get(j, k, l, s), q[(s, mm)]),
                            };
                            acc += w * t;
                        }
                        out.set(j, k, l, mm, acc);
                    }
                }
            }
        }
        out
    }
}

/// The raw two-body tensor W on the mode basis.
fn interaction_tensor(mode_basis: &ModeBasis, potential: &ScaledPotential) -> Tensor4 {
    let m = mode_basis.n_modes();
    let inv_vol = 1.0 / mode_basis.volume();
    let mut w = Tensor4::zeros(m);
    for j in 0..m {
        for k in 0..m {
            for l in 0..m {
                for mm in 0..m {
                    let conserved = mode_basis
                        .mode(j)
                        .iter()
                        .zip(mode_basis.mode(k).iter())
                        .zip(mode_basis.mode(l).iter().zip(mode_basis.mode(mm).iter()))
                        .all(|((a, b), (c, d))| a + b == c + d);
                    if conserved {
                        let coeff = inv_vol * potential.w_hat_at(mode_basis.transfer(j, l));
                        w.set(j, k, l, mm, C64::new(coeff, 0.0));
                    }
                }
            }
        }
    }
    w
}

pub struct TransformedOperators {
    /// R_0..R_4 on the graded basis (nmax = N).
    pub r: [SparseOp; 5],
    /// The quadratic fluctuation Hamiltonian on the same basis.
    pub quadratic: SparseOp,
    /// H~ = quadratic + 1/2 sum (R_j + R_j^dag).
    pub total: SparseOp,
}

/// Assemble the transformed generator for particle number N on a graded
/// basis with cutoff nmax = N.
pub fn assemble_transformed(
    kernels: &KernelSet,
    potential: &ScaledPotential,
    mode_basis: &ModeBasis,
    fock_basis: &Arc<FockBasis>,
    n_particles: usize,
) -> Result<TransformedOperators> {
    let m = mode_basis.n_modes();
    if fock_basis.n_modes() != m {
        return Err(Error::BasisMismatch("Fock basis mode count mismatch".into()));
    }
    if fock_basis.nmax() != n_particles {
        return Err(Error::ShapeMismatch(format!(
            "transformed generator lives on cutoff N = {n_particles}, basis has nmax = {}",
            fock_basis.nmax()
        )));
    }
    let n_f = n_particles as f64;
    let q = &kernels.q;
    let vmat = &kernels.v_mult;
    let u = &kernels.u_hat;

    // R0: dGamma(Q [vmat + K1t - mu] Q) (1 - Num)/(N - 1)
    let mut inner = vmat + &kernels.k1_tilde;
    for i in 0..m {
        inner[(i, i)] -= kernels.mu;
    }
    let a0 = q.dot(&inner).dot(q);
    let r0_raw = crate::fock::dgamma(&a0, fock_basis)?;
    let r0 = scale_by_shell(&r0_raw, fock_basis, |_out, inn| {
        C64::new((1.0 - inn as f64) / (n_f - 1.0), 0.0)
    });

    // R1: -2 Num sqrt(N - Num)/(N - 1) a(Q vmat u)
    let f1 = q.dot(&vmat.dot(u));
    let a_f1 = annihilator_of(&f1, fock_basis);
    let r1 = scale_by_shell(&a_f1, fock_basis, |out, _inn| {
        let n_out = out as f64;
        C64::new(-2.0 * n_out * (n_f - n_out).max(0.0).sqrt() / (n_f - 1.0), 0.0)
    });

    // R2: [sum K2 adag adag] (sqrt((N - Num)(N - Num - 1))/(N - 1) - 1)
    let two_k2 = kernels.k2.mapv(|z| 2.0 * z);
    let pair_raw = crate::fock::pair_create(&two_k2, fock_basis)?;
    let r2 = scale_by_shell(&pair_raw, fock_basis, |_out, inn| {
        let rem = n_f - inn as f64;
        C64::new((rem * (rem - 1.0)).max(0.0).sqrt() / (n_f - 1.0) - 1.0, 0.0)
    });

    // tensors for R3 and R4
    let w = interaction_tensor(mode_basis, potential);
    let wqq = w.contract_slot(2, q).contract_slot(3, q); // W (Q x Q) on ket slots
    let b3 = wqq.contract_slot(1, q); // (1 x Q) W (Q x Q)
    let d4 = b3.contract_slot(0, q); // (Q x Q) W (Q x Q)

    // R3: sqrt(N - Num)/(N - 1) sum_j conj(u_j) B_{(jk),(lm)} adag_k a_l a_m
    let mut c3 = vec![C64::new(0.0, 0.0); m * m * m];
    for k in 0..m {
        for l in 0..m {
            for mm in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..m {
                    acc += u[j].conj() * b3.get(j, k, l, mm);
                }
                c3[(k * m + l) * m + mm] = acc;
            }
        }
    }
    let r3_raw = cubic_operator(&c3, fock_basis)?;
    let r3 = scale_by_shell(&r3_raw, fock_basis, |out, _inn| {
        C64::new((n_f - out as f64).max(0.0).sqrt() / (n_f - 1.0), 0.0)
    });

    // R4: 1/(2(N - 1)) sum D_{(jk),(lm)} adag_j adag_k a_l a_m
    let r4_raw = quartic_operator(&d4, fock_basis)?;
    let r4 = r4_raw.scaled(C64::new(1.0 / (2.0 * (n_f - 1.0)), 0.0));

    let quadratic = assemble_quadratic(&kernels.h, &kernels.k2, fock_basis)?;

    // H~ = quadratic + 1/2 sum (R_j + R_j^dag)
    let half = C64::new(0.5, 0.0);
    let mut total = quadratic.clone();
    for rj in [&r0, &r1, &r2, &r3, &r4] {
        total = total.add(&rj.scaled(half)).add(&rj.dagger().scaled(half));
    }

    Ok(TransformedOperators { r: [r0, r1, r2, r3, r4], quadratic, total })
}

/// a(f) = sum_j conj(f_j) a_j as one sparse operator.
fn annihilator_of(f: &Array1<C64>, basis: &FockBasis) -> SparseOp {
    let m = basis.n_modes();
    let dim = basis.len();
    let mut b = SparseBuilder::new(dim, dim);
    let mut scratch: Vec<u32> = vec![0; m];
    for s in 0..dim {
        let occ = basis.occupation(s);
        for j in 0..m {
            if occ[j] == 0 || f[j] == C64::new(0.0, 0.0) {
                continue;
            }
            scratch.copy_from_slice(occ);
            scratch[j] -= 1;
            let t = basis.index_of(&scratch).unwrap();
            b.push(t, s, f[j].conj() * (occ[j] as f64).sqrt());
        }
    }
    b.build()
}

/// sum_{klm} c_{k,(lm)} adag_k a_l a_m on the graded basis.
fn cubic_operator(c: &[C64], basis: &FockBasis) -> Result<SparseOp> {
    let m = basis.n_modes();
    let dim = basis.len();
    let mut b = SparseBuilder::new(dim, dim);
    let mut scratch: Vec<u32> = vec![0; m];
    for s in 0..dim {
        let occ = basis.occupation(s);
        for l in 0..m {
            for mm in 0..m {
                if occ[mm] == 0 || (l == mm && occ[l] < 2) || occ[l] == 0 {
                    continue;
                }
                for k in 0..m {
                    let coeff = c[(k * m + l) * m + mm];
                    if coeff == C64::new(0.0, 0.0) {
                        continue;
                    }
                    scratch.copy_from_slice(occ);
                    let mut amp = (scratch[mm] as f64).sqrt();
                    scratch[mm] -= 1;
                    amp *= (scratch[l] as f64).sqrt();
                    scratch[l] -= 1;
                    amp *= (scratch[k] as f64 + 1.0).sqrt();
                    scratch[k] += 1;
                    let t = basis.index_of(&scratch).unwrap();
                    b.push(t, s, coeff * amp);
                }
            }
        }
    }
    Ok(b.build())
}

/// sum_{jklm} d_{(jk),(lm)} adag_j adag_k a_l a_m on the graded basis.
fn quartic_operator(d: &Tensor4, basis: &FockBasis) -> Result<SparseOp> {
    let m = basis.n_modes();
    let dim = basis.len();
    let mut b = SparseBuilder::new(dim, dim);
    let mut scratch: Vec<u32> = vec![0; m];
    for s in 0..dim {
        let occ = basis.occupation(s);
        for l in 0..m {
            for mm in 0..m {
                if occ[mm] == 0 || (l == mm && occ[l] < 2) || occ[l] == 0 {
                    continue;
                }
                for j in 0..m {
                    for k in 0..m {
                        let coeff = d.get(j, k, l, mm);
                        if coeff == C64::new(0.0, 0.0) {
                            continue;
                        }
                        scratch.copy_from_slice(occ);
                        let mut amp = (scratch[mm] as f64).sqrt();
                        scratch[mm] -= 1;
                        amp *= (scratch[l] as f64).sqrt();
                        scratch[l] -= 1;
                        amp *= (scratch[k] as f64 + 1.0).sqrt();
                        scratch[k] += 1;
                        amp *= (scratch[j] as f64 + 1.0).sqrt();
                        scratch[j] += 1;
                        let t = basis.index_of(&scratch).unwrap();
                        b.push(t, s, coeff * amp);
                    }
                }
            }
        }
    }
    Ok(b.build())
}

/// Scale every entry by a factor of the (target, source) shells.
fn scale_by_shell(
    op: &SparseOp,
    basis: &FockBasis,
    factor: impl Fn(usize, usize) -> C64,
) -> SparseOp {
    let mut b = SparseBuilder::new(op.rows, op.cols);
    for (r, c, v) in op.iter_entries() {
        let f = factor(basis.total(r), basis.total(c));
        if f != C64::new(0.0, 0.0) {
            b.push(r, c, v * f);
        }
    }
    b.build()
}

/// The transformed state Phi_N(t) = excitation blocks of the exact N-body
/// state, concatenated on the graded basis, at every stored time.
pub fn excitation_flow(
    nbody: &NBodyTrajectory,
    hartree: &HartreeTrajectory,
) -> Result<Vec<(f64, Array1<C64>)>> {
    let mut out = Vec::with_capacity(nbody.times.len());
    for (i, &t) in nbody.times.iter().enumerate() {
        let u = hartree.interpolate(t)?;
        let norm = linalg::norm(&u);
        let u = u.mapv(|z| z / norm);
        let psi = nbody.state_at(nbody.times[i])?;
        let decomp = excitation_split(&psi, &u)?;
        out.push((t, decomp.to_graded_vector()));
    }
    Ok(out)
}

/// || i (Phi_N(t + delta) - Phi_N(t - delta)) / (2 delta) - H~(t) Phi_N(t) ||.
///
/// Vanishes at second order in the probe step plus the discretization error
/// of the upstream solvers.
pub fn transformed_residual(
    t: f64,
    delta: f64,
    flow: &[(f64, Array1<C64>)],
    hartree: &HartreeTrajectory,
    potential: &ScaledPotential,
    mode_basis: &ModeBasis,
    fock_basis: &Arc<FockBasis>,
    n_particles: usize,
) -> Result<f64> {
    let find = |time: f64| -> Result<&Array1<C64>> {
        flow.iter()
            .find(|(ts, _)| (ts - time).abs() < 1e-9)
            .map(|(_, v)| v)
            .ok_or_else(|| {
                Error::InsufficientSamples(format!("no excitation sample at t = {time}"))
            })
    };
    let center = find(t)?;
    let plus = find(t + delta)?;
    let minus = find(t - delta)?;

    let u = hartree.interpolate(t)?;
    let norm = linalg::norm(&u);
    let u = u.mapv(|z| z / norm);
    let kernels = build_kernels(&u, potential, mode_basis)?;
    let ops = assemble_transformed(&kernels, potential, mode_basis, fock_basis, n_particles)?;

    let mut fd = (plus - minus).mapv(|z| C64::i() * z / (2.0 * delta));
    let h_phi = ops.total.apply(center);
    fd -= &h_phi;
    Ok(linalg::norm(&fd))
}
