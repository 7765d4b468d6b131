//! Run configuration: a flat key-value file (one `key = value` per line,
//! `#` comments), schema-validated before any run. Unknown keys are
//! rejected so typos fail loudly.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::hartree::Scheme;
use crate::nbody::FluctBackend;

#[derive(Debug, Clone, PartialEq)]
pub enum CondensateChoice {
    Constant,
    TwoMode { perturbation: f64 },
    /// Arbitrary coefficients (re:im pairs per mode); normalized at build.
    Explicit(Vec<(f64, f64)>),
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub dimension: usize,
    pub torus_length: f64,
    pub kmax: i64,
    pub profile: String,
    pub profile_amplitude: f64,
    pub profile_radius: f64,
    pub beta_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub t_samples: Vec<f64>,
    pub seed: u64,
    pub dt_hartree: f64,
    pub dt_fluct: f64,
    pub dt_nbody: f64,
    pub scheme: Scheme,
    pub fluct_nmax: usize,
    pub leak_budget: f64,
    pub step_check_tol: Option<f64>,
    pub sector_budget: usize,
    pub state_budget: usize,
    pub condensate: CondensateChoice,
    pub backend: FluctBackend,
    pub output_dir: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            dimension: 1,
            torus_length: 2.0 * std::f64::consts::PI,
            kmax: 1,
            profile: "cosine-bump".into(),
            profile_amplitude: 1.0,
            profile_radius: 1.0,
            beta_list: vec![0.0],
            n_list: vec![4, 8],
            t_samples: vec![0.5],
            seed: 42,
            dt_hartree: 1e-3,
            dt_fluct: 1e-3,
            dt_nbody: 2e-3,
            scheme: Scheme::Rk4,
            fluct_nmax: 10,
            leak_budget: 1e-6,
            step_check_tol: Some(1e-9),
            sector_budget: 4_000_000,
            state_budget: 20_000_000,
            condensate: CondensateChoice::Constant,
            backend: FluctBackend::Fock,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got '{v}'")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected an integer, got '{v}'")))
}

fn parse_list_f64(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_f64(key, s)).collect()
}

fn parse_list_usize(key: &str, v: &str) -> Result<Vec<usize>> {
    v.split(',').map(|s| parse_usize(key, s)).collect()
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if seen.insert(key.to_string(), lineno).is_some() {
                return Err(Error::Config(format!("duplicate key '{key}'")));
            }
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    /// Set one key; used both by the parser and by CLI overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dimension" => self.dimension = parse_usize(key, value)?,
            "torus_length" => self.torus_length = parse_f64(key, value)?,
            "kmax" => {
                self.kmax = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("kmax: bad integer '{value}'")))?
            }
            "profile" => self.profile = value.to_string(),
            "profile_amplitude" => self.profile_amplitude = parse_f64(key, value)?,
            "profile_radius" => self.profile_radius = parse_f64(key, value)?,
            "beta_list" => self.beta_list = parse_list_f64(key, value)?,
            "n_list" => self.n_list = parse_list_usize(key, value)?,
            "t_samples" => self.t_samples = parse_list_f64(key, value)?,
            "seed" => {
                self.seed = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("seed: bad integer '{value}'")))?
            }
            "dt_hartree" => self.dt_hartree = parse_f64(key, value)?,
            "dt_fluct" => self.dt_fluct = parse_f64(key, value)?,
            "dt_nbody" => self.dt_nbody = parse_f64(key, value)?,
            "scheme" => self.scheme = value.parse()?,
            "fluct_nmax" => self.fluct_nmax = parse_usize(key, value)?,
            "leak_budget" => self.leak_budget = parse_f64(key, value)?,
            "step_check_tol" => {
                self.step_check_tol = if value == "off" {
                    None
                } else {
                    Some(parse_f64(key, value)?)
                }
            }
            "sector_budget" => self.sector_budget = parse_usize(key, value)?,
            "state_budget" => self.state_budget = parse_usize(key, value)?,
            "condensate" => {
                self.condensate = match value {
                    "constant" => CondensateChoice::Constant,
                    "two-mode" => CondensateChoice::TwoMode { perturbation: 0.2 },
                    other => {
                        return Err(Error::Config(format!("unknown condensate '{other}'")))
                    }
                }
            }
            "condensate_coeffs" => {
                let mut coeffs = Vec::new();
                for part in value.split(',') {
                    let (re, im) = part.trim().split_once(':').ok_or_else(|| {
                        Error::Config("condensate_coeffs entries are re:im pairs".into())
                    })?;
                    coeffs.push((parse_f64(key, re)?, parse_f64(key, im)?));
                }
                self.condensate = CondensateChoice::Explicit(coeffs);
            }
            "perturbation" => {
                let eps = parse_f64(key, value)?;
                self.condensate = CondensateChoice::TwoMode { perturbation: eps };
            }
            "backend" => self.backend = value.parse()?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 1 {
            return Err(Error::Config("dimension must be >= 1".into()));
        }
        if !(self.torus_length > 0.0) {
            return Err(Error::Config("torus_length must be > 0".into()));
        }
        if self.kmax < 0 {
            return Err(Error::Config("kmax must be >= 0".into()));
        }
        if self.beta_list.is_empty() || self.n_list.is_empty() || self.t_samples.is_empty() {
            return Err(Error::Config("beta_list, n_list, t_samples must be non-empty".into()));
        }
        if self.beta_list.iter().any(|&b| !(0.0..0.5).contains(&b)) {
            return Err(Error::Config("beta values must lie in [0, 1/2)".into()));
        }
        if self.n_list.iter().any(|&n| n < 2) {
            return Err(Error::Config("N values must be >= 2".into()));
        }
        if self.t_samples.windows(2).any(|w| w[1] <= w[0]) || self.t_samples[0] < 0.0 {
            return Err(Error::Config("t_samples must be ascending and nonnegative".into()));
        }
        for (name, dt) in [
            ("dt_hartree", self.dt_hartree),
            ("dt_fluct", self.dt_fluct),
            ("dt_nbody", self.dt_nbody),
        ] {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0")));
            }
        }
        if self.profile_amplitude < 0.0 || !(self.profile_radius > 0.0) {
            return Err(Error::Config("bad profile parameters".into()));
        }
        if let CondensateChoice::TwoMode { .. } = self.condensate {
            if self.kmax < 1 {
                return Err(Error::Config("two-mode condensate needs kmax >= 1".into()));
            }
        }
        if let CondensateChoice::Explicit(coeffs) = &self.condensate {
            let norm_sq: f64 = coeffs.iter().map(|(re, im)| re * re + im * im).sum();
            if !(norm_sq > 0.0) {
                return Err(Error::Config("condensate_coeffs must be nonzero".into()));
            }
        }
        Ok(())
    }

    /// A committed reference configuration, also used by tests.
    pub fn example_text() -> &'static str {
        "\
# bosegas run configuration (key = value, '#' starts a comment)
dimension = 1
torus_length = 6.283185307179586
kmax = 1
profile = cosine-bump
profile_amplitude = 1.0
profile_radius = 1.0
beta_list = 0.0
n_list = 4, 8, 16
t_samples = 0.5
seed = 42
dt_hartree = 0.001
dt_fluct = 0.001
dt_nbody = 0.002
scheme = rk4
fluct_nmax = 10
leak_budget = 1e-6
step_check_tol = 1e-9
sector_budget = 4000000
state_budget = 20000000
condensate = constant
backend = fock
output_dir = out
"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_parses_and_validates() {
        let cfg = SweepConfig::parse(SweepConfig::example_text()).unwrap();
        assert_eq!(cfg.n_list, vec![4, 8, 16]);
        assert_eq!(cfg.kmax, 1);
        assert_eq!(cfg.backend, FluctBackend::Fock);
    }

    #[test]
    fn committed_example_file_is_in_sync() {
        let committed = include_str!("../../bosegas.example.cfg");
        assert_eq!(committed, SweepConfig::example_text());
    }

    #[test]
    fn explicit_coefficients_accepted() {
        let mut cfg = SweepConfig::default();
        cfg.set("condensate_coeffs", "0.0:0.0, 1.0:0.0, 0.2:0.1").unwrap();
        cfg.validate().unwrap();
        match &cfg.condensate {
            CondensateChoice::Explicit(c) => assert_eq!(c.len(), 3),
            other => panic!("expected explicit coefficients, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let r = SweepConfig::parse("frobnicate = 3\n");
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn invalid_beta_rejected() {
        let mut cfg = SweepConfig::default();
        cfg.beta_list = vec![0.5];
        assert!(cfg.validate().is_err());
        cfg.beta_list = vec![-0.1];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn small_n_rejected() {
        let mut cfg = SweepConfig::default();
        cfg.n_list = vec![1];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn duplicate_key_rejected() {
        let r = SweepConfig::parse("kmax = 1\nkmax = 2\n");
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn overrides_apply() {
        let mut cfg = SweepConfig::parse(SweepConfig::example_text()).unwrap();
        cfg.set("backend", "pair").unwrap();
        assert_eq!(cfg.backend, FluctBackend::Pair);
        cfg.set("step_check_tol", "off").unwrap();
        assert!(cfg.step_check_tol.is_none());
    }
}
