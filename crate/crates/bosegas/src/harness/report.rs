//! Report emission: CSV for machines, JSON-lines for archival, and a
//! plot-data file with the t- and N-series. The CSV round-trips exactly
//! (shortest-representation float formatting), so fits recomputed from an
//! ingested report are bit-identical.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::ratefit::RateFit;
use crate::nbody::ErrorRecord;

pub const RECORDS_SCHEMA: &str = "# schema: bosegas.records.v1";
const RECORD_COLUMNS: &str = "t,n,beta,error_sq,error_sq_normalized,overlap,approx_norm,tr_gamma,kinetic,leak_flag,reprojection_residual,initial_particles,initial_kinetic,status";

#[derive(Debug, Clone)]
pub struct ReportPaths {
    pub records_csv: PathBuf,
    pub records_jsonl: PathBuf,
    pub plot_data: PathBuf,
    pub fits_csv: PathBuf,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn records_to_csv(records: &[ErrorRecord]) -> String {
    let mut out = format!("{RECORDS_SCHEMA}\n{RECORD_COLUMNS}\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.t,
            r.n_particles,
            r.beta,
            r.error_sq,
            r.error_sq_normalized,
            r.overlap,
            r.approx_norm,
            r.tr_gamma,
            r.kinetic,
            r.leak_flag,
            r.reprojection_residual,
            r.initial_particles,
            r.initial_kinetic,
            r.status.replace(',', ";")
        ));
    }
    out
}

/// Parse a records CSV produced by [`records_to_csv`].
pub fn ingest_records(path: &Path) -> Result<Vec<ErrorRecord>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(first) if first == RECORDS_SCHEMA => {}
        other => {
            return Err(Error::Config(format!(
                "unexpected records schema line: {other:?}"
            )))
        }
    }
    match lines.next() {
        Some(cols) if cols == RECORD_COLUMNS => {}
        other => return Err(Error::Config(format!("unexpected column row: {other:?}"))),
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 14 {
            return Err(Error::Config(format!(
                "record line {}: expected 14 fields, got {}",
                lineno + 3,
                fields.len()
            )));
        }
        let f = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|_| Error::Config(format!("bad float '{}'", fields[i])))
        };
        records.push(ErrorRecord {
            t: f(0)?,
            n_particles: fields[1]
                .parse()
                .map_err(|_| Error::Config(format!("bad integer '{}'", fields[1])))?,
            beta: f(2)?,
            error_sq: f(3)?,
            error_sq_normalized: f(4)?,
            overlap: f(5)?,
            approx_norm: f(6)?,
            tr_gamma: f(7)?,
            kinetic: f(8)?,
            leak_flag: fields[9] == "true",
            reprojection_residual: f(10)?,
            initial_particles: f(11)?,
            initial_kinetic: f(12)?,
            status: fields[13].to_string(),
        });
    }
    Ok(records)
}

fn fits_to_csv(fits: &[RateFit]) -> String {
    let mut out = String::from(
        "# schema: bosegas.fits.v1\nbeta,slope,intercept,residual,reference_slope,slope_minus_reference,n_points\n",
    );
    for f in fits {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            f.beta,
            f.slope,
            f.intercept,
            f.residual,
            f.reference_slope,
            f.slope_minus_reference,
            f.points.len()
        ));
    }
    out
}

fn plot_data(records: &[ErrorRecord]) -> String {
    let mut out = String::from(
        "# schema: bosegas.plotdata.v1\n# series: t_series (fixed N, beta) and n_series (fixed beta, t)\nseries,beta,n,t,error_sq,tr_gamma,kinetic\n",
    );
    // t-series per (N, beta), in record order
    for r in records {
        out.push_str(&format!(
            "t_series,{},{},{},{},{},{}\n",
            r.beta, r.n_particles, r.t, r.error_sq, r.tr_gamma, r.kinetic
        ));
    }
    // n-series per (beta, t)
    let mut keys: Vec<(f64, f64)> = Vec::new();
    for r in records {
        if !keys
            .iter()
            .any(|&(b, t)| b == r.beta && t == r.t)
        {
            keys.push((r.beta, r.t));
        }
    }
    for (beta, t) in keys {
        let mut row: Vec<&ErrorRecord> = records
            .iter()
            .filter(|r| r.beta == beta && r.t == t)
            .collect();
        row.sort_by_key(|r| r.n_particles);
        for r in row {
            out.push_str(&format!(
                "n_series,{},{},{},{},{},{}\n",
                beta, r.n_particles, t, r.error_sq, r.tr_gamma, r.kinetic
            ));
        }
    }
    out
}

/// Write all report files into `dir`; refuses to write an empty report.
pub fn emit_report(
    records: &[ErrorRecord],
    fits: &[RateFit],
    dir: &Path,
) -> Result<ReportPaths> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let paths = ReportPaths {
        records_csv: dir.join("records.csv"),
        records_jsonl: dir.join("records.jsonl"),
        plot_data: dir.join("plotdata.csv"),
        fits_csv: dir.join("fits.csv"),
    };
    write_file(&paths.records_csv, &records_to_csv(records))?;
    let mut jsonl = String::new();
    for r in records {
        jsonl.push_str(
            &serde_json::to_string(r)
                .map_err(|e| Error::Config(format!("json serialization failed: {e}")))?,
        );
        jsonl.push('\n');
    }
    write_file(&paths.records_jsonl, &jsonl)?;
    write_file(&paths.plot_data, &plot_data(records))?;
    write_file(&paths.fits_csv, &fits_to_csv(fits))?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ratefit::fit_rate;

    fn record(t: f64, n: usize, beta: f64, err: f64) -> ErrorRecord {
        ErrorRecord {
            t,
            n_particles: n,
            beta,
            error_sq: err,
            error_sq_normalized: err * 1.001,
            overlap: 1.0 - err / 2.0,
            approx_norm: 0.999993,
            tr_gamma: 0.01 * n as f64,
            kinetic: 0.02,
            leak_flag: false,
            reprojection_residual: 1e-12,
            initial_particles: 0.0,
            initial_kinetic: 0.0,
            status: "ok".into(),
        }
    }

    #[test]
    fn empty_report_refused() {
        let dir = std::env::temp_dir().join("bosegas_report_empty");
        assert!(matches!(emit_report(&[], &[], &dir), Err(Error::EmptyRecords)));
    }

    #[test]
    fn single_record_emits_all_files() {
        let dir = std::env::temp_dir().join("bosegas_report_single");
        std::fs::remove_dir_all(&dir).ok();
        let recs = vec![record(0.5, 4, 0.0, 0.12)];
        let paths = emit_report(&recs, &[], &dir).unwrap();
        for p in [&paths.records_csv, &paths.records_jsonl, &paths.plot_data, &paths.fits_csv] {
            assert!(p.exists(), "{p:?} missing");
        }
        let text = std::fs::read_to_string(&paths.records_csv).unwrap();
        assert!(text.starts_with(RECORDS_SCHEMA));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn csv_round_trip_reproduces_fits_exactly() {
        let dir = std::env::temp_dir().join("bosegas_report_roundtrip");
        std::fs::remove_dir_all(&dir).ok();
        let recs: Vec<ErrorRecord> = [4usize, 8, 16, 32]
            .iter()
            .map(|&n| record(0.5, n, 0.0, 0.3 * (n as f64).powf(-0.47) * 1.0000001))
            .collect();
        let points: Vec<(usize, f64)> =
            recs.iter().map(|r| (r.n_particles, r.error_sq)).collect();
        let fit = fit_rate(0.0, &points).unwrap();
        let paths = emit_report(&recs, &[fit.clone()], &dir).unwrap();

        let back = ingest_records(&paths.records_csv).unwrap();
        assert_eq!(back.len(), recs.len());
        for (a, b) in recs.iter().zip(back.iter()) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.error_sq, b.error_sq, "floats must round-trip bit-exactly");
            assert_eq!(a.status, b.status);
            assert_eq!(a.leak_flag, b.leak_flag);
        }
        let points2: Vec<(usize, f64)> =
            back.iter().map(|r| (r.n_particles, r.error_sq)).collect();
        let fit2 = fit_rate(0.0, &points2).unwrap();
        assert_eq!(fit.slope.to_bits(), fit2.slope.to_bits());
        assert_eq!(fit.intercept.to_bits(), fit2.intercept.to_bits());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn jsonl_parses_back() {
        let dir = std::env::temp_dir().join("bosegas_report_jsonl");
        std::fs::remove_dir_all(&dir).ok();
        let recs = vec![record(0.5, 4, 0.0, 0.12), record(0.5, 8, 0.0, 0.08)];
        let paths = emit_report(&recs, &[], &dir).unwrap();
        let text = std::fs::read_to_string(&paths.records_jsonl).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let parsed: ErrorRecord = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(parsed.n_particles, 4);
        std::fs::remove_dir_all(&dir).ok();
    }
}
