use thiserror::Error;

/// Errors raised while building models, diagonalizing, propagating or fitting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "real continuum too coarse: {reason} (recurrence time 2π/d_rc = {recurrence_time:.6})"
    )]
    ContinuumTooCoarse {
        reason: String,
        recurrence_time: f64,
    },

    #[error(
        "requested time {requested} exceeds the validity horizon {horizon:.6} \
         (half the recurrence time {recurrence_time:.6})"
    )]
    BeyondRecurrence {
        requested: f64,
        horizon: f64,
        recurrence_time: f64,
    },

    #[error("matrix dimension {dim} exceeds the dense-solver cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("bilinear breakdown for eigenpairs {indices:?} and least-squares fallback failed")]
    DefectiveSpectrum { indices: Vec<usize> },

    #[error("eigenvalue {lambda} lies within {distance:e} of pole E[{index}]")]
    PoleProximity {
        index: usize,
        lambda: num_complex::Complex64,
        distance: f64,
    },

    #[error("pseudo-continuum levels {first} and {second} are quasi-degenerate (gap {gap:e})")]
    QuasiDegeneratePoles {
        first: usize,
        second: usize,
        gap: f64,
    },

    #[error("{} secular roots did not converge: {roots:?}", roots.len())]
    SecularUnconverged { roots: Vec<UnconvergedRoot> },

    #[error(
        "step size underflow at t = {t} (h = {step:e}); stiffness scale |Im λ|max ≈ {stiffness:.6}"
    )]
    StepSizeUnderflow { t: f64, step: f64, stiffness: f64 },

    #[error("integrator exceeded {max_steps} steps before t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("fit rejected: {0}")]
    Fit(String),

    #[error("realization {index} (seed {seed}) failed: {source}")]
    Realization {
        index: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed trajectory data: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Secular root whose refinement stalled, with the real-axis bracket that seeded it.
#[derive(Debug, Clone, PartialEq)]
pub struct UnconvergedRoot {
    pub index: usize,
    pub estimate: num_complex::Complex64,
    pub bracket: (f64, f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
