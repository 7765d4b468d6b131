//! Sweep the particle number, fit the decay of the squared norm error, and
//! emit the report files.
//!
//! ```sh
//! cargo run --release --example rate_sweep
//! ```

use bosegas::harness::{emit_report, run_sweep, SweepConfig};

fn main() -> bosegas::Result<()> {
    let mut cfg = SweepConfig::parse(SweepConfig::example_text())?;
    cfg.n_list = vec![4, 8, 16, 32];
    cfg.t_samples = vec![0.25, 0.5];
    cfg.output_dir = std::env::temp_dir().join("bosegas_example_sweep");

    let outcome = run_sweep(&cfg)?;
    println!("N     error^2 at t = 0.5");
    for r in outcome.records.iter().filter(|r| r.t == 0.5) {
        println!("{:<5} {:.6e}", r.n_particles, r.error_sq);
    }
    for fit in &outcome.fits {
        println!(
            "\nbeta = {}: fitted slope {:.4}, reference (2 beta - 1)/2 = {:.4}, difference {:+.4}",
            fit.beta, fit.slope, fit.reference_slope, fit.slope_minus_reference
        );
    }
    let paths = emit_report(&outcome.records, &outcome.fits, &cfg.output_dir)?;
    println!("\nreport files:");
    for p in [paths.records_csv, paths.records_jsonl, paths.plot_data, paths.fits_csv] {
        println!("  {}", p.display());
    }
    std::process::exit(outcome.exit_code());
}
