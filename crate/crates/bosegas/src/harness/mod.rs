//! Configuration, sweep orchestration, rate fitting, report emission, and
//! the oracle-equivalence self-test suites.

pub mod config;
pub mod ratefit;
pub mod report;
pub mod selftest;
pub mod sweep;

pub use config::{CondensateChoice, SweepConfig};
pub use ratefit::{fit_rate, RateFit};
pub use report::{emit_report, ingest_records, records_to_csv, ReportPaths};
pub use selftest::{run_all as run_selftest, SelftestResult};
pub use sweep::{make_basis, make_condensate, make_potential, run_sweep, SweepOutcome};
