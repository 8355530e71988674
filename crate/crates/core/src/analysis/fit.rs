//! Least-squares fits of the survival probability `p₀(t) = |A₀(t)|²`.
//!
//! | model | form | parameters |
//! |---|---|---|
//! | [`FitModel::Exponential`] | `exp(a − 2Γt)` | `rate` (= Γ, amplitude rate), `log_amplitude` |
//! | [`FitModel::DampedCosine`] | `e^{−2δt} cos²(ωt)` | `frequency` (= ω), `decay` (= δ) |
//! | [`FitModel::Sinc`] | `[sin(Dt/2)/(Dt/2)]²` | `bandwidth` (= D) |
//!
//! Every result carries its window and `residual = ‖p − model‖₂ / ‖p‖₂`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{survival_probability, Trajectory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    Exponential,
    DampedCosine,
    Sinc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub parameters: BTreeMap<String, f64>,
    pub window: (f64, f64),
    pub residual: f64,
}

impl FitResult {
    pub fn get(&self, name: &str) -> f64 {
        self.parameters[name]
    }

    /// The fitted curve at `t`.
    pub fn evaluate(&self, t: f64) -> f64 {
        match self.model {
            FitModel::Exponential => (self.get("log_amplitude") - 2.0 * self.get("rate") * t).exp(),
            FitModel::DampedCosine => damped_cosine(t, self.get("frequency"), self.get("decay")),
            FitModel::Sinc => sinc(self.get("bandwidth") * t / 2.0).powi(2),
        }
    }
}

pub const MIN_WINDOW_SAMPLES: usize = 10;
pub const MIN_PERIODS: usize = 5;
/// The exponential fit refuses probabilities below this floor.
pub const MIN_PROBABILITY: f64 = 1e-12;

fn select(times: &[f64], p: &[f64], window: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>)> {
    if times.len() != p.len() || times.is_empty() {
        return Err(Error::Fit(
            "times and samples differ in length or are empty".into(),
        ));
    }
    let (lo, hi) = window;
    let first = times[0];
    let last = times[times.len() - 1];
    let slack = 1e-9 * last.abs().max(1.0);
    if !(lo < hi) || lo < first - slack || hi > last + slack {
        return Err(Error::Fit(format!(
            "window ({lo}, {hi}) is not inside the span [{first}, {last}]"
        )));
    }
    let (t, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(p)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(t, y)| (*t, *y))
        .unzip();
    if t.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::Fit(format!(
            "window ({lo}, {hi}) holds {} samples, need at least {MIN_WINDOW_SAMPLES}",
            t.len()
        )));
    }
    Ok((t, y))
}

fn relative_residual(t: &[f64], y: &[f64], model: impl Fn(f64) -> f64) -> f64 {
    let num: f64 = t.iter().zip(y).map(|(t, y)| (y - model(*t)).powi(2)).sum();
    let den: f64 = y.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// Ordinary least squares `y ≈ a + b·x`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = x.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

pub fn fit_exponential(traj: &Trajectory, window: (f64, f64)) -> Result<FitResult> {
    fit_exponential_samples(&traj.times, &survival_probability(traj), window)
}

/// Line fit of `ln p₀` against `t`; the amplitude rate is minus half the slope.
pub fn fit_exponential_samples(times: &[f64], p: &[f64], window: (f64, f64)) -> Result<FitResult> {
    let (t, y) = select(times, p, window)?;
    if let Some(bad) = y.iter().find(|v| !(**v > MIN_PROBABILITY)) {
        return Err(Error::Fit(format!(
            "p₀ = {bad:e} in window is below {MIN_PROBABILITY:e}"
        )));
    }
    let logs: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (a, b) = line_fit(&t, &logs);
    let rate = -b / 2.0;
    let residual = relative_residual(&t, &y, |t| (a + b * t).exp());
    Ok(FitResult {
        model: FitModel::Exponential,
        parameters: BTreeMap::from([("rate".into(), rate), ("log_amplitude".into(), a)]),
        window,
        residual,
    })
}

fn damped_cosine(t: f64, omega: f64, delta: f64) -> f64 {
    (-2.0 * delta * t).exp() * (omega * t).cos().powi(2)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn sinc_derivative(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        -x / 3.0 + x.powi(3) / 30.0
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

/// `(t, p)` samples.
type Points = Vec<(f64, f64)>;

/// Alternating minima and maxima whose swing exceeds half the preceding swing.
fn prominent_extrema(t: &[f64], y: &[f64]) -> (Points, Points) {
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    let mut seeking_min = true;
    let (mut ext_t, mut ext_y) = (t[0], y[0]);
    let mut last_max = y[0];
    let mut last_min = 0.0f64;
    for (&ti, &yi) in t.iter().zip(y).skip(1) {
        if seeking_min {
            if yi < ext_y {
                (ext_t, ext_y) = (ti, yi);
            } else if yi - ext_y > 0.5 * (last_max - ext_y) {
                minima.push((ext_t, ext_y));
                last_min = ext_y;
                seeking_min = false;
                (ext_t, ext_y) = (ti, yi);
            }
        } else if yi > ext_y {
            (ext_t, ext_y) = (ti, yi);
        } else if ext_y - yi > 0.5 * (ext_y - last_min) {
            maxima.push((ext_t, ext_y));
            last_max = ext_y;
            seeking_min = true;
            (ext_t, ext_y) = (ti, yi);
        }
    }
    (minima, maxima)
}

/// Levenberg–Marquardt on a small dense problem.
///
/// `model(params, t)` returns the value and the gradient with respect to the parameters.
fn levenberg_marquardt<const P: usize>(
    t: &[f64],
    y: &[f64],
    mut params: [f64; P],
    model: impl Fn(&[f64; P], f64) -> (f64, [f64; P]),
) -> [f64; P] {
    let sse = |p: &[f64; P]| {
        t.iter()
            .zip(y)
            .map(|(t, y)| (y - model(p, *t).0).powi(2))
            .sum::<f64>()
    };
    let mut cost = sse(&params);
    let mut mu = 1e-3;
    for _ in 0..500 {
        let mut jtj = [[0.0; P]; P];
        let mut jtr = [0.0; P];
        for (&ti, &yi) in t.iter().zip(y) {
            let (m, g) = model(&params, ti);
            let r = yi - m;
            for a in 0..P {
                jtr[a] += g[a] * r;
                for b in 0..P {
                    jtj[a][b] += g[a] * g[b];
                }
            }
        }
        let mut improved = false;
        while mu < 1e12 {
            let mut lhs = jtj;
            for a in 0..P {
                lhs[a][a] += mu * jtj[a][a].max(1e-300);
            }
            let Some(step) = solve_small(lhs, jtr) else {
                mu *= 10.0;
                continue;
            };
            let mut trial = params;
            for a in 0..P {
                trial[a] += step[a];
            }
            let c = sse(&trial);
            if c.is_finite() && c <= cost {
                let small = (0..P).all(|a| step[a].abs() <= 1e-14 * params[a].abs().max(1e-300));
                let stalled = cost - c <= 1e-16 * cost;
                params = trial;
                cost = c;
                mu = (mu / 3.0).max(1e-12);
                improved = !(small || stalled);
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    params
}

fn solve_small<const P: usize>(mut a: [[f64; P]; P], mut b: [f64; P]) -> Option<[f64; P]> {
    for col in 0..P {
        let pivot = (col..P).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col] == 0.0 || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..P {
            let f = a[row][col] / a[col][col];
            for k in col..P {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; P];
    for row in (0..P).rev() {
        let s: f64 = (row + 1..P).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

pub fn fit_damped_cosine(traj: &Trajectory) -> Result<FitResult> {
    let span = (traj.times[0], traj.times[traj.len() - 1]);
    fit_damped_cosine_samples(&traj.times, &survival_probability(traj), span)
}

/// Fits `e^{−2δt} cos²(ωt)`; the pair `±ω − iδ` is the amplitude's eigenvalue pair.
pub fn fit_damped_cosine_samples(
    times: &[f64],
    p: &[f64],
    window: (f64, f64),
) -> Result<FitResult> {
    let (t, y) = select(times, p, window)?;
    let (minima, maxima) = prominent_extrema(&t, &y);
    if minima.len() < MIN_PERIODS {
        return Err(Error::Fit(format!(
            "{} oscillation periods visible, need at least {MIN_PERIODS}",
            minima.len()
        )));
    }
    let span = minima[minima.len() - 1].0 - minima[0].0;
    let omega0 = std::f64::consts::PI * (minima.len() - 1) as f64 / span;
    let delta0 = if maxima.len() >= 2 {
        let (mt, my): (Vec<f64>, Vec<f64>) = maxima
            .iter()
            .filter(|m| m.1 > 0.0)
            .map(|m| (m.0, m.1.ln()))
            .unzip();
        if mt.len() >= 2 {
            (-line_fit(&mt, &my).1 / 2.0).max(0.0)
        } else {
            0.0
        }
    } else {
        0.0
    };
    let [omega, delta] = levenberg_marquardt(&t, &y, [omega0, delta0], |p, t| {
        let env = (-2.0 * p[1] * t).exp();
        let (s, c) = (p[0] * t).sin_cos();
        let m = env * c * c;
        (m, [-env * t * 2.0 * s * c, -2.0 * t * m])
    });
    let residual = relative_residual(&t, &y, |t| damped_cosine(t, omega, delta));
    Ok(FitResult {
        model: FitModel::DampedCosine,
        parameters: BTreeMap::from([("frequency".into(), omega.abs()), ("decay".into(), delta)]),
        window,
        residual,
    })
}

pub fn fit_sinc(traj: &Trajectory, window: (f64, f64)) -> Result<FitResult> {
    fit_sinc_samples(&traj.times, &survival_probability(traj), window)
}

/// `sinc²(x) = 1/2` here.
const SINC_SQ_HALF: f64 = 1.391_557_377_335_7;

/// Fits `[sin(Dt/2)/(Dt/2)]²` with `D` free.
pub fn fit_sinc_samples(times: &[f64], p: &[f64], window: (f64, f64)) -> Result<FitResult> {
    let (t, y) = select(times, p, window)?;
    let Some(t_half) = t.iter().zip(&y).find(|(_, v)| **v <= 0.5).map(|(t, _)| *t) else {
        return Err(Error::Fit(
            "p₀ never falls to one half inside the window".into(),
        ));
    };
    let guess = 2.0 * SINC_SQ_HALF / t_half.max(f64::MIN_POSITIVE);
    let first_zero = |d: f64| 2.0 * std::f64::consts::PI / d;
    if window.1 < first_zero(guess) {
        return Err(Error::Fit(format!(
            "window ends at {} before the first envelope zero near {:.4}",
            window.1,
            first_zero(guess)
        )));
    }
    let [bandwidth] = levenberg_marquardt(&t, &y, [guess], |p, t| {
        let x = p[0] * t / 2.0;
        let s = sinc(x);
        (s * s, [2.0 * s * sinc_derivative(x) * t / 2.0])
    });
    if window.1 < first_zero(bandwidth) {
        return Err(Error::Fit(format!(
            "window ends at {} before the fitted first zero {:.4}",
            window.1,
            first_zero(bandwidth)
        )));
    }
    let residual = relative_residual(&t, &y, |t| sinc(bandwidth * t / 2.0).powi(2));
    Ok(FitResult {
        model: FitModel::Sinc,
        parameters: BTreeMap::from([("bandwidth".into(), bandwidth)]),
        window,
        residual,
    })
}

/// First time after `after` at which `|p₀/fit − 1|` exceeds `threshold`.
pub fn first_departure(
    times: &[f64],
    p: &[f64],
    fit: &FitResult,
    after: f64,
    threshold: f64,
) -> Option<f64> {
    times
        .iter()
        .zip(p)
        .filter(|(t, _)| **t > after)
        .find(|(t, v)| (**v / fit.evaluate(**t) - 1.0).abs() > threshold)
        .map(|(t, _)| *t)
}
