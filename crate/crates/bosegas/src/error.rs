//! Common error type for the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("basis would need {requested} scalars, over the memory budget of {budget}")]
    MemoryBudget { requested: usize, budget: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge to {tol:e} for momentum index {index:?} (residual {residual:e})")]
    QuadratureNonConvergence {
        index: Vec<i64>,
        tol: f64,
        residual: f64,
    },

    #[error("state is not normalized: |1 - norm| = {0:e}")]
    NotNormalized(f64),

    #[error("integrator step rejected at t = {t}: halved-step disagreement {disagreement:e} exceeds tolerance {tol:e}")]
    StepRejected { t: f64, disagreement: f64, tol: f64 },

    #[error("trajectory does not cover requested time {0}")]
    TrajectoryOutOfRange(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("quadratic-form premise violated: min eigenvalue of H - K H^-1 K^dag is {0:e}")]
    PremiseViolation(f64),

    #[error("pair state is not pure: purity residual {0:e}")]
    NotPure(f64),

    #[error("particle-number cutoff too small: tail weight {tail:e} exceeds budget {budget:e}")]
    CutoffTooSmall { tail: f64, budget: f64 },

    #[error("excitation blocks not orthogonal to the condensate: residual {0:e}")]
    NonOrthogonalBlocks(f64),

    #[error("insufficient trajectory samples: {0}")]
    InsufficientSamples(String),

    #[error("refusing to emit a report with no records")]
    EmptyRecords,

    #[error("rate fit needs at least 3 points with positive errors, got {0}")]
    BadFitInput(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
