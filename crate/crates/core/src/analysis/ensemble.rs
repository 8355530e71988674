//! Seeded ensembles over coupling realizations.
//!
//! Realization `k` uses seed [`realization_seed`]`(base, k)`. Per-time moments
//! are combined by a pairwise (count, mean, M2) merge over a fixed binary tree
//! of realization indices, so the statistics are bit-identical for any number
//! of workers.

use serde::{Deserialize, Serialize};

use super::fluctuation::{ensemble_fluctuation, FluctuationWindow};
use crate::dynamics::{evolve_spectral, survival_probability};
use crate::error::{invalid, Error, Result};
use crate::model::{build_reduced_hamiltonian, ModelParams};
use crate::spectral::eigendecompose;

pub const SEED_RULE: &str = "splitmix64(base ^ splitmix64(index))";

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn realization_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

#[derive(Debug, Clone, Default)]
pub struct EnsembleOptions {
    /// Thread count; `None` uses the ambient rayon pool.
    pub workers: Option<usize>,
    /// Late-time window for `fluct_rms`; defaults to `[5/D, 0.8/d]` when defined.
    pub window: Option<FluctuationWindow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    pub mean_p0: Vec<f64>,
    /// Unbiased sample variance across realizations.
    pub var_p0: Vec<f64>,
    pub n_realizations: usize,
    /// `sqrt` of the window average of `mean_p0`, the typical late-time `|A₀|`.
    pub fluct_rms: Option<f64>,
    pub window: Option<FluctuationWindow>,
    pub base_seed: u64,
    pub seed_rule: String,
}

struct Moments {
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn single(p: Vec<f64>) -> Self {
        let m2 = vec![0.0; p.len()];
        Moments {
            count: 1.0,
            mean: p,
            m2,
        }
    }

    fn merge(mut self, other: Moments) -> Self {
        let n = self.count + other.count;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * other.count / n;
            self.m2[i] += other.m2[i] + delta * delta * self.count * other.count / n;
        }
        self.count = n;
        self
    }
}

fn realization(params: &ModelParams, index: usize, times: &[f64]) -> Result<Vec<f64>> {
    let seed = realization_seed(params.seed, index as u64);
    let run = || -> Result<Vec<f64>> {
        let p = params.clone().with_seed(seed);
        let spec = eigendecompose(&build_reduced_hamiltonian(&p)?)?;
        Ok(survival_probability(&evolve_spectral(&spec, times)?))
    };
    run().map_err(|e| Error::Realization {
        index,
        seed,
        source: Box::new(e),
    })
}

fn reduce(params: &ModelParams, times: &[f64], lo: usize, hi: usize) -> Result<Moments> {
    if hi - lo == 1 {
        return realization(params, lo, times).map(Moments::single);
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = rayon::join(
        || reduce(params, times, lo, mid),
        || reduce(params, times, mid, hi),
    );
    // Report the lowest failing index regardless of scheduling.
    Ok(a?.merge(b?))
}

pub fn run_ensemble(
    params: &ModelParams,
    n_realizations: usize,
    times: &[f64],
) -> Result<EnsembleStats> {
    run_ensemble_with(params, n_realizations, times, &EnsembleOptions::default())
}

pub fn run_ensemble_with(
    params: &ModelParams,
    n_realizations: usize,
    times: &[f64],
    opts: &EnsembleOptions,
) -> Result<EnsembleStats> {
    if n_realizations < 2 {
        return Err(invalid("n_realizations", "need at least 2"));
    }
    params.validate()?;
    let moments = match opts.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| invalid("workers", e.to_string()))?;
            pool.install(|| reduce(params, times, 0, n_realizations))?
        }
        None => reduce(params, times, 0, n_realizations)?,
    };
    let var_p0: Vec<f64> = moments
        .m2
        .iter()
        .map(|m| (m / (moments.count - 1.0)).max(0.0))
        .collect();
    let window = match opts.window {
        Some(w) => Some(w),
        None => FluctuationWindow::late_default(params).ok(),
    };
    let fluct_rms = window.and_then(|w| ensemble_fluctuation(times, &moments.mean, &w).ok());
    Ok(EnsembleStats {
        times: times.to_vec(),
        mean_p0: moments.mean,
        var_p0,
        n_realizations,
        fluct_rms,
        window,
        base_seed: params.seed,
        seed_rule: SEED_RULE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::linear_grid;
    use crate::model::{CouplingSpec, Distribution};

    fn random_params() -> ModelParams {
        ModelParams::new(
            15,
            1.0,
            0.5,
            CouplingSpec::Random {
                std: 0.1,
                distribution: Distribution::Gaussian,
            },
        )
        .with_seed(11)
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let s: Vec<u64> = (0..1000).map(|k| realization_seed(7, k)).collect();
        let mut sorted = s.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 1000);
        assert_eq!(realization_seed(7, 3), s[3]);
    }

    #[test]
    fn degenerate_configuration_has_zero_variance() {
        let p = ModelParams::new(10, 1.0, 0.5, CouplingSpec::Constant { u: 0.1 });
        let stats = run_ensemble(&p, 2, &linear_grid(20.0, 41)).unwrap();
        assert!(stats.var_p0.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn merge_matches_two_pass() {
        let times = linear_grid(30.0, 31);
        let p = random_params();
        let stats = run_ensemble(&p, 7, &times).unwrap();
        let runs: Vec<Vec<f64>> = (0..7)
            .map(|k| realization(&p, k, &times).unwrap())
            .collect();
        for i in 0..times.len() {
            let mean = runs.iter().map(|r| r[i]).sum::<f64>() / 7.0;
            let var = runs.iter().map(|r| (r[i] - mean).powi(2)).sum::<f64>() / 6.0;
            assert!((stats.mean_p0[i] - mean).abs() < 1e-14);
            assert!((stats.var_p0[i] - var).abs() < 1e-14);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let times = linear_grid(30.0, 31);
        let p = random_params();
        let one = run_ensemble_with(
            &p,
            9,
            &times,
            &EnsembleOptions {
                workers: Some(1),
                window: None,
            },
        )
        .unwrap();
        let many = run_ensemble_with(
            &p,
            9,
            &times,
            &EnsembleOptions {
                workers: Some(8),
                window: None,
            },
        )
        .unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn needs_two_realizations() {
        assert!(run_ensemble(&random_params(), 1, &[0.0, 1.0]).is_err());
    }
}
