use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{invalid, Result};
use crate::model::ModelParams;

pub const MIN_FLUCTUATION_SAMPLES: usize = 50;

/// A late-time window past the initial decay, `start > 3/D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuationWindow {
    pub start: f64,
    pub end: f64,
}

impl FluctuationWindow {
    pub fn new(start: f64, end: f64, bandwidth: f64) -> Result<Self> {
        if !(start < end) {
            return Err(invalid(
                "window",
                format!("start {start} must precede end {end}"),
            ));
        }
        if bandwidth > 0.0 && start <= 3.0 / bandwidth {
            return Err(invalid(
                "window",
                format!("start {start} must exceed 3/D = {}", 3.0 / bandwidth),
            ));
        }
        Ok(FluctuationWindow { start, end })
    }

    /// `[5/D, 0.8/d]`, between the initial decay and the finite-N revival.
    pub fn late_default(params: &ModelParams) -> Result<Self> {
        let d = params.level_spacing();
        if !(params.bandwidth > 0.0 && d > 0.0) {
            return Err(invalid("window", "default window needs D > 0 and N > 1"));
        }
        Self::new(5.0 / params.bandwidth, 0.8 / d, params.bandwidth)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluctuationMeasure {
    /// `sqrt(⟨|A₀|²⟩)` over the window: the typical size of `|A₀|`.
    Rms,
    /// Standard deviation of `|A₀|` over the window.
    Centered,
}

fn window_values<'a>(
    times: &'a [f64],
    values: &'a [f64],
    w: &FluctuationWindow,
) -> Result<Vec<f64>> {
    let picked: Vec<f64> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| w.contains(**t))
        .map(|(_, v)| *v)
        .collect();
    if picked.len() < MIN_FLUCTUATION_SAMPLES {
        return Err(invalid(
            "window",
            format!(
                "{} samples in window, need at least {MIN_FLUCTUATION_SAMPLES}",
                picked.len()
            ),
        ));
    }
    Ok(picked)
}

/// Late-time fluctuation size of a single realization.
pub fn fluctuation_amplitude(
    traj: &Trajectory,
    window: &FluctuationWindow,
    measure: FluctuationMeasure,
) -> Result<f64> {
    let moduli: Vec<f64> = traj.a0.iter().map(|a| a.norm()).collect();
    let m = window_values(&traj.times, &moduli, window)?;
    let n = m.len() as f64;
    Ok(match measure {
        FluctuationMeasure::Rms => (m.iter().map(|v| v * v).sum::<f64>() / n).sqrt(),
        FluctuationMeasure::Centered => {
            let mean = m.iter().sum::<f64>() / n;
            (m.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
        }
    })
}

/// `sqrt` of the window average of an ensemble-mean `p₀`.
pub fn ensemble_fluctuation(
    times: &[f64],
    mean_p0: &[f64],
    window: &FluctuationWindow,
) -> Result<f64> {
    let m = window_values(times, mean_p0, window)?;
    Ok((m.iter().sum::<f64>() / m.len() as f64).sqrt())
}
