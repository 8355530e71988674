//! Survival amplitude `A₀(t)` by three independent routes.
//!
//! - [`evolve_spectral`] sums the biorthogonal expansion of a [`Spectrum`].
//! - [`evolve_reduced_ode`] integrates `dψ/dt = −iHψ` with adaptive Dormand–Prince.
//! - [`evolve_full_model`] propagates the explicit Hermitian model exactly.
//!
//! The first two must agree to integrator tolerance; the third checks the
//! elimination of the continuum itself.

mod full;
mod ode;

pub use full::evolve_full_model;
pub use ode::{evolve_reduced_ode, OdeOptions};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{CoefficientMethod, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    ReducedOde,
    FullModel,
    /// Read back from a file; origin unknown.
    Imported,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::ReducedOde => "ode",
            Method::FullModel => "full",
            Method::Imported => "imported",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub a0: Vec<Complex64>,
    pub method: Method,
    pub params_hash: String,
    /// `(t, ‖ψ(t)‖)` wherever the propagator tracked the full state.
    pub norms: Vec<(f64, f64)>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|A₀ − A₀'|` against another trajectory on the same grid.
    pub fn max_amplitude_deviation(&self, other: &Trajectory) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .a0
            .iter()
            .zip(&other.a0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest `| |A₀|² − |A₀'|² |` against another trajectory on the same grid.
    pub fn max_probability_deviation(&self, other: &Trajectory) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .a0
            .iter()
            .zip(&other.a0)
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max))
    }

    fn check_same_grid(&self, other: &Trajectory) -> Result<()> {
        if self.times != other.times {
            return Err(invalid("times", "trajectories are on different grids"));
        }
        Ok(())
    }
}

/// `|A₀(t)|²` pointwise.
pub fn survival_probability(traj: &Trajectory) -> Vec<f64> {
    traj.a0.iter().map(|a| a.norm_sqr()).collect()
}

/// Grid spacing for decay and oscillation studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

pub const DEFAULT_GRID_POINTS: usize = 2000;

/// `n` evenly spaced points on `[0, t_max]`.
pub fn linear_grid(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

/// `0` followed by `n − 1` logarithmically spaced points on `[t_min, t_max]`.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    if n < 2 {
        return out;
    }
    let m = n - 1;
    let (a, b) = (t_min.ln(), t_max.ln());
    out.extend((0..m).map(|k| {
        if m == 1 {
            t_max
        } else {
            (a + (b - a) * k as f64 / (m - 1) as f64).exp()
        }
    }));
    out
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(invalid("times", "grid is empty"));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(invalid("times", "all times must be finite and ≥ 0"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "grid must be nondecreasing"));
    }
    Ok(())
}

/// `A₀(t) = Σ Cₙ wₙ e^{−iλₙ t}`.
pub fn evolve_spectral(spec: &Spectrum, times: &[f64]) -> Result<Trajectory> {
    check_times(times)?;
    if !spec.defective.is_empty() && spec.method != CoefficientMethod::LeastSquares {
        return Err(Error::DefectiveSpectrum {
            indices: spec.defective.clone(),
        });
    }
    let weights = spec.weights();
    let a0 = times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return weights.iter().sum();
            }
            weights
                .iter()
                .zip(&spec.eigenvalues)
                .map(|(w, l)| w * (Complex64::new(0.0, -t) * l).exp())
                .sum()
        })
        .collect();
    Ok(Trajectory {
        times: times.to_vec(),
        a0,
        method: Method::Spectral,
        params_hash: spec.params().digest(),
        norms: Vec::new(),
    })
}
