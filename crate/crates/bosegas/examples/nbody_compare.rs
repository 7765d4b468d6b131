//! One full benchmark cell: exact N-boson evolution against the condensate
//! + fluctuation ansatz, with the squared norm error over time.
//!
//! ```sh
//! cargo run --release --example nbody_compare
//! ```

use std::sync::Arc;

use bosegas::bogoliubov::PairState;
use bosegas::hartree::constant_condensate;
use bosegas::nbody::{run_comparison, ComparisonSetup, FluctBackend};
use bosegas::spectral::{CosineBump, ModeBasis, ScaledPotential};

fn main() -> bosegas::Result<()> {
    let basis = ModeBasis::new(1, 2.0 * std::f64::consts::PI, 1)?;
    let n = 8;
    let potential =
        ScaledPotential::build(Arc::new(CosineBump::new(1.0, 1.0)?), 0.0, n, &basis)?;
    let setup = ComparisonSetup {
        mode_basis: &basis,
        potential: &potential,
        n_particles: n,
        u0: constant_condensate(&basis),
        fluct_initial: PairState::vacuum(basis.n_modes()),
        fluct_nmax: 10,
        t_samples: &[0.1, 0.25, 0.5, 0.75, 1.0],
        dt_hartree: 1e-3,
        dt_fluct: 1e-3,
        dt_nbody: 1e-3,
        step_check_tol: Some(1e-9),
        leak_budget: 1e-6,
        backend: FluctBackend::Fock,
        sector_budget: usize::MAX,
    };
    let records = run_comparison(&setup)?;

    println!("N = {n}, beta = 0, cosine bump c = 1, R = 1");
    println!("t      error^2        normalized     overlap     tr gamma");
    for r in &records {
        println!(
            "{:<6.2} {:>13.6e} {:>14.6e} {:>11.8} {:>10.6}",
            r.t, r.error_sq, r.error_sq_normalized, r.overlap, r.tr_gamma
        );
    }
    println!("\nall statuses ok: {}", records.iter().all(|r| r.status == "ok"));
    Ok(())
}
