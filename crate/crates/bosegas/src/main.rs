use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use bosegas::bogoliubov::{evolve_pair, kinetic_diagnostic, PairEvolveOptions, PairState};
use bosegas::error::Result;
use bosegas::fock::{
    evolve_fock, extract_one_body, hamiltonian_along, FockBasis, FockEvolveOptions, FockVector,
};
use bosegas::harness::{
    emit_report, make_basis, make_condensate, make_potential, run_selftest, run_sweep,
    SweepConfig,
};
use bosegas::hartree::{evolve_hartree, HartreeOptions};
use bosegas::nbody::{run_comparison, ComparisonSetup, FluctBackend};

#[derive(Parser)]
#[command(
    name = "bosegas",
    version,
    about = "Condensate + Bogoliubov fluctuation dynamics with exact N-body benchmarks on the torus"
)]
struct Cli {
    /// Run configuration file (key = value per line); built-in defaults
    /// are used when the default path does not exist.
    #[arg(long, global = true, default_value = "bosegas.cfg")]
    config: PathBuf,

    /// Override a config key, e.g. --set backend=pair (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the condensate equation; export CSV and binary trajectories
    Hartree {
        #[arg(long, default_value_t = 1.0)]
        t_final: f64,
    },
    /// Integrate the fluctuation dynamics around the condensate
    Bogoliubov {
        /// pair (one-body matrices) or fock (truncated Fock vector)
        #[arg(long)]
        backend: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        t_final: f64,
    },
    /// One exact-vs-ansatz comparison (first N and beta of the config)
    NbodyCompare,
    /// The full (N, beta) grid with rate fits and report files
    Sweep,
    /// Ground-state-energy bound on seeded random quadratic Hamiltonians
    GseCheck {
        #[arg(long, default_value_t = 200)]
        draws: usize,
    },
    /// Run every oracle-equivalence suite
    Selftest,
    /// Print the reference configuration file
    PrintConfig,
}

fn load_config(cli: &Cli) -> Result<SweepConfig> {
    let mut cfg = if cli.config.exists() {
        SweepConfig::load(&cli.config)?
    } else {
        eprintln!(
            "note: {} not found, using built-in defaults",
            cli.config.display()
        );
        SweepConfig::parse(SweepConfig::example_text())?
    };
    for entry in &cli.overrides {
        let (key, value) = entry.split_once('=').ok_or_else(|| {
            bosegas::Error::Config(format!("--set expects KEY=VALUE, got '{entry}'"))
        })?;
        cfg.set(key.trim(), value.trim())?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_hartree(cfg: &SweepConfig, t_final: f64) -> Result<ExitCode> {
    let basis = make_basis(cfg)?;
    let pot = make_potential(cfg, &basis, cfg.beta_list[0], cfg.n_list[0])?;
    let u0 = make_condensate(cfg, &basis)?;
    let traj = evolve_hartree(
        &u0,
        t_final,
        &HartreeOptions {
            dt: cfg.dt_hartree,
            scheme: cfg.scheme,
            step_check_tol: cfg.step_check_tol,
            ..Default::default()
        },
        &pot,
        &basis,
    )?;
    std::fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| bosegas::Error::io(cfg.output_dir.display().to_string(), e))?;
    let csv = cfg.output_dir.join("hartree.csv");
    let bin = cfg.output_dir.join("hartree.bght");
    traj.write_csv(&csv)?;
    traj.write_binary(&bin)?;
    let end = traj.final_state();
    let norm: f64 = end.coeffs.iter().map(|z| z.norm_sqr()).sum();
    let e0 = bosegas::hartree::hartree_energy(&traj.samples[0].coeffs, &pot, &basis);
    let e1 = bosegas::hartree::hartree_energy(&end.coeffs, &pot, &basis);
    println!(
        "hartree: t = {}, |u|^2 - 1 = {:.3e}, relative energy drift = {:.3e}, mu = {:.6}",
        end.time,
        norm - 1.0,
        ((e1 - e0) / e0.abs().max(1e-300)).abs(),
        end.mu
    );
    println!("wrote {} and {}", csv.display(), bin.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_bogoliubov(cfg: &SweepConfig, backend: Option<String>, t_final: f64) -> Result<ExitCode> {
    let backend = match backend {
        Some(s) => s.parse()?,
        None => cfg.backend,
    };
    let basis = make_basis(cfg)?;
    let pot = make_potential(cfg, &basis, cfg.beta_list[0], cfg.n_list[0])?;
    let u0 = make_condensate(cfg, &basis)?;
    let hartree = evolve_hartree(
        &u0,
        t_final,
        &HartreeOptions {
            dt: cfg.dt_hartree,
            step_check_tol: cfg.step_check_tol,
            ..Default::default()
        },
        &pot,
        &basis,
    )?;
    std::fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| bosegas::Error::io(cfg.output_dir.display().to_string(), e))?;
    match backend {
        FluctBackend::Pair => {
            let pair0 = PairState::vacuum(basis.n_modes());
            let traj = evolve_pair(
                &pair0,
                (0.0, t_final),
                &hartree,
                &pot,
                &basis,
                &PairEvolveOptions { dt: cfg.dt_fluct, step_check_tol: cfg.step_check_tol },
            )?;
            let bin = cfg.output_dir.join("pair.bgpr");
            let csv = cfg.output_dir.join("pair_summary.csv");
            traj.write_binary(&bin)?;
            traj.write_csv_summary(&csv, &basis)?;
            let end = traj.final_state();
            println!(
                "pair backend: t = {}, tr gamma = {:.6e}, kinetic = {:.6e}, purity residual = {:.3e}",
                end.time,
                end.trace_gamma(),
                kinetic_diagnostic(end, &basis),
                end.purity_residual()
            );
            println!("wrote {} and {}", bin.display(), csv.display());
        }
        FluctBackend::Fock => {
            let fock_basis = Arc::new(FockBasis::new(basis.n_modes(), cfg.fluct_nmax)?);
            let phi0 = FockVector::vacuum(fock_basis.clone());
            let mut gen = hamiltonian_along(&hartree, &pot, &basis, fock_basis);
            let traj = evolve_fock(
                &phi0,
                t_final,
                &FockEvolveOptions {
                    dt: cfg.dt_fluct,
                    step_check_tol: cfg.step_check_tol,
                    leak_budget: cfg.leak_budget,
                },
                &mut gen,
            )?;
            let phi = traj.final_state();
            let pair = extract_one_body(&phi);
            let path = cfg.output_dir.join("fluctuation.bgfv");
            phi.write_binary(&path)?;
            println!(
                "fock backend: t = {t_final}, tr gamma = {:.6e}, kinetic = {:.6e}, max leak = {:.3e}{}",
                pair.trace_gamma(),
                kinetic_diagnostic(&pair, &basis),
                traj.max_leak,
                if traj.leak_flagged { " [UNDER-TRUNCATED]" } else { "" }
            );
            println!("wrote {}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_nbody_compare(cfg: &SweepConfig) -> Result<ExitCode> {
    let basis = make_basis(cfg)?;
    let pot = make_potential(cfg, &basis, cfg.beta_list[0], cfg.n_list[0])?;
    let u0 = make_condensate(cfg, &basis)?;
    let setup = ComparisonSetup {
        mode_basis: &basis,
        potential: &pot,
        n_particles: cfg.n_list[0],
        u0,
        fluct_initial: PairState::vacuum(basis.n_modes()),
        fluct_nmax: cfg.fluct_nmax,
        t_samples: &cfg.t_samples,
        dt_hartree: cfg.dt_hartree,
        dt_fluct: cfg.dt_fluct,
        dt_nbody: cfg.dt_nbody,
        step_check_tol: cfg.step_check_tol,
        leak_budget: cfg.leak_budget,
        backend: cfg.backend,
        sector_budget: cfg.sector_budget,
    };
    let records = run_comparison(&setup)?;
    println!("t,error_sq,error_sq_normalized,overlap,tr_gamma,kinetic,status");
    for r in &records {
        println!(
            "{},{:.6e},{:.6e},{:.6},{:.4e},{:.4e},{}",
            r.t, r.error_sq, r.error_sq_normalized, r.overlap, r.tr_gamma, r.kinetic, r.status
        );
    }
    let ok = records.iter().all(|r| r.status == "ok");
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_sweep(cfg: &SweepConfig) -> Result<ExitCode> {
    let outcome = run_sweep(cfg)?;
    if !outcome.records.is_empty() {
        let paths = emit_report(&outcome.records, &outcome.fits, &cfg.output_dir)?;
        println!(
            "wrote {}, {}, {}, {}",
            paths.records_csv.display(),
            paths.records_jsonl.display(),
            paths.plot_data.display(),
            paths.fits_csv.display()
        );
    }
    for fit in &outcome.fits {
        println!(
            "beta = {}: slope = {:.4} (reference {:.4}, difference {:+.4}), residual {:.2e}, {} points",
            fit.beta,
            fit.slope,
            fit.reference_slope,
            fit.slope_minus_reference,
            fit.residual,
            fit.points.len()
        );
    }
    for s in &outcome.skipped_cells {
        println!("skipped: {s}");
    }
    for f in &outcome.failed_cells {
        println!("failed: {f}");
    }
    println!(
        "sweep: {} records, {} fits, {} skipped, {} failed",
        outcome.records.len(),
        outcome.fits.len(),
        outcome.skipped_cells.len(),
        outcome.failed_cells.len()
    );
    Ok(ExitCode::from(outcome.exit_code() as u8))
}

fn cmd_gse_check(cfg: &SweepConfig, draws: usize) -> Result<ExitCode> {
    let result = bosegas::harness::selftest::gse_bound_check(cfg.seed, draws)?;
    println!(
        "{}: {} — {}",
        result.name,
        if result.passed { "PASS" } else { "FAIL" },
        result.detail
    );
    Ok(if result.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_selftest(cfg: &SweepConfig) -> Result<ExitCode> {
    let results = run_selftest(cfg.seed)?;
    let mut all_ok = true;
    for r in &results {
        println!(
            "{:<24} {} — {}",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
        all_ok &= r.passed;
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<ExitCode> {
        if let Command::PrintConfig = cli.command {
            print!("{}", SweepConfig::example_text());
            return Ok(ExitCode::SUCCESS);
        }
        let cfg = load_config(&cli)?;
        match &cli.command {
            Command::Hartree { t_final } => cmd_hartree(&cfg, *t_final),
            Command::Bogoliubov { backend, t_final } => {
                cmd_bogoliubov(&cfg, backend.clone(), *t_final)
            }
            Command::NbodyCompare => cmd_nbody_compare(&cfg),
            Command::Sweep => cmd_sweep(&cfg),
            Command::GseCheck { draws } => cmd_gse_check(&cfg, *draws),
            Command::Selftest => cmd_selftest(&cfg),
            Command::PrintConfig => unreachable!(),
        }
    };
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
