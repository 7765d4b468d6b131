//! Lower bound on the ground-state energy of quadratic Hamiltonians:
//! -1/2 ||H^{-1/2} K||_HS^2 against exact diagonalization, on random
//! admissible draws and on the one-mode closed form.
//!
//! ```sh
//! cargo run --release --example gse_bound
//! ```

use bosegas::bogoliubov::{gse_lower_bound, random_admissible_pair};
use bosegas::fock::{assemble_quadratic, FockBasis};
use bosegas::linalg;
use rand::SeedableRng;

fn main() -> bosegas::Result<()> {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2718);

    println!("modes  bound          exact ground   gap");
    let mut worst_gap = f64::INFINITY;
    for draw in 0..30 {
        let m = 1 + draw % 3;
        let (h, k) = random_admissible_pair(&mut rng, m, 0.9);
        let bound = gse_lower_bound(&h, &k)?;
        let basis = FockBasis::new(m, 8 - m)?;
        let op = assemble_quadratic(&h, &k, &basis)?.to_dense();
        let (w, _) = linalg::eigh(&op);
        let gap = w[0] - bound.bound;
        worst_gap = worst_gap.min(gap);
        if draw < 10 {
            println!("{m}      {:>13.6} {:>14.6} {:>8.4}", bound.bound, w[0], gap);
        }
    }
    println!("...\nsmallest gap over 30 draws: {worst_gap:.6} (never negative)");

    // one mode: exact ground energy (sqrt(h^2 - kappa^2) - h)/2
    let h_val = 1.0;
    let kappa = 0.6;
    let h = ndarray::array![[num_complex::Complex64::new(h_val, 0.0)]];
    let k = ndarray::array![[num_complex::Complex64::new(kappa, 0.0)]];
    let bound = gse_lower_bound(&h, &k)?;
    let closed = 0.5 * ((h_val * h_val - kappa * kappa).sqrt() - h_val);
    println!("\none mode, h = {h_val}, kappa = {kappa}:");
    println!("  bound          = {:.10}  (= -kappa^2/(2h))", bound.bound);
    println!("  closed form    = {closed:.10}");
    println!("  premise margin = {:.6}", bound.premise_margin);
    Ok(())
}
