//! Integrate the condensate equation for a perturbed condensate and watch
//! the conserved quantities.
//!
//! ```sh
//! cargo run --release --example hartree_evolution
//! ```

use std::sync::Arc;

use bosegas::hartree::{
    evolve_hartree, hartree_energy, two_mode_condensate, HartreeOptions, Scheme,
};
use bosegas::spectral::{CosineBump, ModeBasis, ScaledPotential};

fn main() -> bosegas::Result<()> {
    let length = 2.0 * std::f64::consts::PI;
    let basis = ModeBasis::new(1, length, 2)?;
    let potential = ScaledPotential::build(
        Arc::new(CosineBump::new(1.0, 1.0)?),
        0.0, // mean-field scaling
        16,
        &basis,
    )?;
    let u0 = two_mode_condensate(&basis, 0.3);

    let t_final = 2.0;
    let rk4 = evolve_hartree(&u0, t_final, &HartreeOptions::default(), &potential, &basis)?;
    let strang = evolve_hartree(
        &u0,
        t_final,
        &HartreeOptions { scheme: Scheme::StrangSplitting, dt: 5e-4, ..Default::default() },
        &potential,
        &basis,
    )?;

    let e0 = hartree_energy(&u0, &potential, &basis);
    println!("initial Hartree energy: {e0:.10}");
    println!("t      |u|^2 - 1      energy drift   mu");
    for s in rk4.samples.iter().step_by(rk4.samples.len() / 10) {
        let norm_sq: f64 = s.coeffs.iter().map(|z| z.norm_sqr()).sum();
        let e = hartree_energy(&s.coeffs, &potential, &basis);
        println!(
            "{:<6.2} {:>12.3e} {:>14.3e}   {:.8}",
            s.time,
            norm_sq - 1.0,
            (e - e0) / e0,
            s.mu
        );
    }

    let d: f64 = rk4
        .final_state()
        .coeffs
        .iter()
        .zip(strang.final_state().coeffs.iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    println!("\nrk4 vs strang-splitting at t = {t_final}: {d:.3e}");

    let dir = std::env::temp_dir().join("bosegas_example_hartree");
    std::fs::create_dir_all(&dir).ok();
    let csv = dir.join("trajectory.csv");
    rk4.write_csv(&csv)?;
    println!("trajectory written to {}", csv.display());
    Ok(())
}
