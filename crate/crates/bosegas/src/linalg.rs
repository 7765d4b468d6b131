//! Dense complex linear algebra helpers.
//!
//! Everything here operates on small matrices (mode-space operators and
//! truncated Fock blocks used as oracles), so a cyclic Jacobi eigensolver
//! is accurate and fast enough; no external LAPACK is required.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

/// Maximum absolute entry of `a - a.conj().t()`.
pub fn hermiticity_residual(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut r = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            r = r.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    r
}

/// Maximum absolute entry of `a - a.t()`.
pub fn symmetry_residual(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut r = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            r = r.max((a[(i, j)] - a[(j, i)]).norm());
        }
    }
    r
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let mut r = 0.0_f64;
    for (x, y) in a.iter().zip(b.iter()) {
        r = r.max((x - y).norm());
    }
    r
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi
/// rotations. Returns eigenvalues in ascending order and the matching
/// eigenvectors as columns, so `a = v diag(w) v^dag`.
pub fn eigh(a: &Array2<C64>) -> (Array1<f64>, Array2<C64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigh: matrix must be square");
    if n == 0 {
        return (Array1::zeros(0), Array2::zeros((0, 0)));
    }
    let mut m = a.clone();
    // symmetrize roundoff so the iteration sees an exactly Hermitian matrix
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    let scale = max_abs(&m).max(1e-300);
    let tol = 1e-15 * scale;
    let mut q: Array2<C64> = Array2::eye(n);

    for _sweep in 0..60 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for qq in (p + 1)..n {
                off = off.max(m[(p, qq)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apq = m[(p, r)];
                let norm = apq.norm();
                if norm <= tol * 1e-2 {
                    continue;
                }
                let phase = apq / norm; // e^{i phi}
                let app = m[(p, p)].re;
                let aqq = m[(r, r)].re;
                let tau = (aqq - app) / (2.0 * norm);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // columns p,r transform by v = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                let vpp = C64::new(c, 0.0);
                let vpq = C64::new(s, 0.0);
                let vqp = -phase.conj() * s;
                let vqq = phase.conj() * c;
                for i in 0..n {
                    let mp = m[(i, p)];
                    let mq = m[(i, r)];
                    m[(i, p)] = mp * vpp + mq * vqp;
                    m[(i, r)] = mp * vpq + mq * vqq;
                }
                for j in 0..n {
                    let mp = m[(p, j)];
                    let mq = m[(r, j)];
                    m[(p, j)] = vpp.conj() * mp + vqp.conj() * mq;
                    m[(r, j)] = vpq.conj() * mp + vqq.conj() * mq;
                }
                m[(p, r)] = C64::new(0.0, 0.0);
                m[(r, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(r, r)] = C64::new(m[(r, r)].re, 0.0);
                for i in 0..n {
                    let qp = q[(i, p)];
                    let qr = q[(i, r)];
                    q[(i, p)] = qp * vpp + qr * vqp;
                    q[(i, r)] = qp * vpq + qr * vqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let mut w = Array1::zeros(n);
    let mut v = Array2::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        w[new] = m[(old, old)].re;
        for i in 0..n {
            v[(i, new)] = q[(i, old)];
        }
    }
    (w, v)
}

/// `v diag(f(w)) v^dag` for the eigendecomposition of a Hermitian matrix.
pub fn hermitian_function(a: &Array2<C64>, f: impl Fn(f64) -> C64) -> Array2<C64> {
    let (w, v) = eigh(a);
    let n = a.nrows();
    let mut scaled = v.clone();
    for j in 0..n {
        let fj = f(w[j]);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    let vh = conj_transpose(&v);
    scaled.dot(&vh)
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn inv_hermitian_pd(a: &Array2<C64>) -> Array2<C64> {
    hermitian_function(a, |w| C64::new(1.0 / w, 0.0))
}

/// Inverse square root of a Hermitian positive-definite matrix.
pub fn inv_sqrt_hermitian_pd(a: &Array2<C64>) -> Array2<C64> {
    hermitian_function(a, |w| C64::new(1.0 / w.sqrt(), 0.0))
}

/// `exp(factor * a)` for Hermitian `a`; with purely imaginary `factor`
/// the result is unitary to machine precision.
pub fn expm_hermitian(a: &Array2<C64>, factor: C64) -> Array2<C64> {
    hermitian_function(a, |w| (factor * w).exp())
}

pub fn conj_transpose(a: &Array2<C64>) -> Array2<C64> {
    let (r, c) = a.dim();
    let mut out = Array2::zeros((c, r));
    for i in 0..r {
        for j in 0..c {
            out[(j, i)] = a[(i, j)].conj();
        }
    }
    out
}

pub fn transpose(a: &Array2<C64>) -> Array2<C64> {
    let (r, c) = a.dim();
    let mut out = Array2::zeros((c, r));
    for i in 0..r {
        for j in 0..c {
            out[(j, i)] = a[(i, j)];
        }
    }
    out
}

pub fn conj(a: &Array2<C64>) -> Array2<C64> {
    a.mapv(|z| z.conj())
}

pub fn trace(a: &Array2<C64>) -> C64 {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

pub fn inner(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &Array1<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
