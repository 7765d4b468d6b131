//! Spectral layer: the torus plane-wave basis, the scaled interaction
//! potential and its Fourier coefficients, and convolution in Fourier space.

mod basis;
mod potential;
pub mod quadrature;

pub use basis::{convolve_density, DiffLattice, ModeBasis};
pub use potential::{profile_by_name, CosineBump, RadialProfile, ScaledPotential};

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array1;
    use num_complex::Complex64 as C64;
    use std::sync::Arc;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn setup(kmax: i64) -> (ModeBasis, ScaledPotential) {
        let basis = ModeBasis::new(1, TAU, kmax).unwrap();
        let pot = ScaledPotential::build(
            Arc::new(CosineBump::new(1.0, 1.0).unwrap()),
            0.0,
            4,
            &basis,
        )
        .unwrap();
        (basis, pot)
    }

    #[test]
    fn convolution_with_constant_density() {
        let (basis, pot) = setup(2);
        // rho = 1/L^d has the single coefficient L^{-d/2} on the zero mode
        let mut rho: Array1<C64> = Array1::zeros(basis.n_modes());
        rho[basis.zero_index()] = C64::new(basis.volume().powf(-0.5), 0.0);
        let conv = convolve_density(&rho, pot.w_hat(), &basis).unwrap();
        for k in 0..basis.n_modes() {
            let expect = if k == basis.zero_index() {
                pot.l1_mass() * basis.volume().powf(-0.5)
            } else {
                0.0
            };
            assert!((conv[k] - expect).norm() < 1e-12);
        }
        // evaluated anywhere the convolution equals |w|_L1 / L^d
        let v = basis.eval_field(&conv, &[1.234]);
        assert!((v - pot.l1_mass() / basis.volume()).norm() < 1e-12);
    }

    #[test]
    fn convolution_with_zero_density() {
        let (basis, pot) = setup(2);
        let rho: Array1<C64> = Array1::zeros(basis.n_modes());
        let conv = convolve_density(&rho, pot.w_hat(), &basis).unwrap();
        assert!(conv.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn convolution_matches_position_space_quadrature() {
        // rho(x) = (1 + cos x)/L: coefficients on modes 0, +-1
        let (basis, pot) = setup(2);
        let l = basis.length();
        let mut rho: Array1<C64> = Array1::zeros(basis.n_modes());
        rho[basis.zero_index()] = C64::new(l.powf(-0.5), 0.0);
        rho[basis.index_of(&[1]).unwrap()] = C64::new(0.5 * l.powf(-0.5), 0.0);
        rho[basis.index_of(&[-1]).unwrap()] = C64::new(0.5 * l.powf(-0.5), 0.0);
        let conv = convolve_density(&rho, pot.w_hat(), &basis).unwrap();

        // oracle: trapezoid quadrature of int w_N(x - y) rho(y) dy
        let n = 4096;
        for &x in &[0.0, 0.7, 2.9] {
            let mut acc = 0.0;
            for g in 0..n {
                let y = l * g as f64 / n as f64;
                let rho_y = (1.0 + y.cos()) / l;
                acc += pot.eval_position(&[x - y]) * rho_y;
            }
            acc *= l / n as f64;
            let spectral = basis.eval_field(&conv, &[x]);
            assert!(spectral.im.abs() < 1e-12);
            assert!(
                (spectral.re - acc).abs() < 1e-6,
                "x={x}: spectral {} vs quadrature {acc}",
                spectral.re
            );
        }
    }

    #[test]
    fn convolution_of_real_even_functions_is_real_even() {
        let (basis, pot) = setup(3);
        // real even density: coefficients real and symmetric under k -> -k
        let mut rho: Array1<C64> = Array1::zeros(basis.n_modes());
        for (k, v) in [(0i64, 0.4), (1, 0.21), (2, -0.13), (3, 0.05)] {
            rho[basis.index_of(&[k]).unwrap()] = C64::new(v, 0.0);
            rho[basis.index_of(&[-k]).unwrap()] = C64::new(v, 0.0);
        }
        let conv = convolve_density(&rho, pot.w_hat(), &basis).unwrap();
        for k in 0..basis.n_modes() {
            let neg: Vec<i64> = basis.mode(k).iter().map(|x| -x).collect();
            let nk = basis.index_of(&neg).unwrap();
            assert!(conv[k].im.abs() < 1e-12);
            assert!((conv[k] - conv[nk]).norm() < 1e-12);
        }
    }

    #[test]
    fn convolution_rejects_mismatched_inputs() {
        let (basis, pot) = setup(2);
        let rho: Array1<C64> = Array1::zeros(basis.n_modes() + 1);
        assert!(convolve_density(&rho, pot.w_hat(), &basis).is_err());
        let small = ModeBasis::new(1, TAU, 1).unwrap();
        let rho2: Array1<C64> = Array1::zeros(small.n_modes());
        assert!(convolve_density(&rho2, pot.w_hat(), &small).is_err());
    }
}
