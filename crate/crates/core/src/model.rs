//! Model parameters, coupling sampling, and the two Hamiltonians.
//!
//! The single state `|0⟩` (energy zero) couples with real elements `u_μ` to
//! `N` pseudo-continuum (PC) levels on a uniform grid of width `D`. Each PC
//! level couples with the same element `v` to every level of a broad real
//! continuum (RC). Eliminating the RC leaves the `(N+1)×(N+1)` complex
//! symmetric matrix
//!
//! ```text
//! H = Σ E_μ |μ⟩⟨μ| + Σ u_μ (|0⟩⟨μ| + |μ⟩⟨0|) − iγ Σ_{μν} |μ⟩⟨ν|,   γ = π v² ν_c
//! ```
//!
//! [`build_reduced_hamiltonian`] assembles it. [`build_full_model`] keeps a
//! finite, explicit RC instead and is used as an oracle for the elimination.

use faer::Mat;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal, Uniform};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};

/// Shape of a random coupling distribution with zero mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// Uniform on `[−ū√3, ū√3]`, so that the standard deviation is exactly `ū`.
    Uniform,
    /// Normal with standard deviation `ū`.
    Gaussian,
}

/// How the SS–PC couplings `u_μ` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CouplingSpec {
    Constant {
        u: f64,
    },
    Random {
        std: f64,
        distribution: Distribution,
    },
}

impl CouplingSpec {
    /// `u` for constant couplings, `ū` for random ones.
    pub fn typical(&self) -> f64 {
        match *self {
            CouplingSpec::Constant { u } => u.abs(),
            CouplingSpec::Random { std, .. } => std,
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, CouplingSpec::Random { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Number of pseudo-continuum levels `N`.
    pub n_levels: usize,
    /// PC bandwidth `D`; zero selects the degenerate case.
    pub bandwidth: f64,
    /// Shift of the PC grid relative to the single-state energy.
    #[serde(default)]
    pub grid_offset: f64,
    /// Effective level width `γ = π v² ν_c`.
    pub gamma: f64,
    pub coupling: CouplingSpec,
    #[serde(default)]
    pub seed: u64,
}

impl ModelParams {
    pub fn new(n_levels: usize, bandwidth: f64, gamma: f64, coupling: CouplingSpec) -> Self {
        ModelParams {
            n_levels,
            bandwidth,
            grid_offset: 0.0,
            gamma,
            coupling,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_grid_offset(mut self, offset: f64) -> Self {
        self.grid_offset = offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_levels == 0 {
            return Err(invalid(
                "n_levels",
                "at least one pseudo-continuum level is required",
            ));
        }
        if !(self.bandwidth >= 0.0 && self.bandwidth.is_finite()) {
            return Err(invalid(
                "bandwidth",
                format!("must be finite and ≥ 0, got {}", self.bandwidth),
            ));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(invalid(
                "gamma",
                format!("must be finite and ≥ 0, got {}", self.gamma),
            ));
        }
        if !self.grid_offset.is_finite() {
            return Err(invalid("grid_offset", "must be finite"));
        }
        match self.coupling {
            CouplingSpec::Constant { u } if !u.is_finite() => {
                Err(invalid("coupling.u", "must be finite"))
            }
            CouplingSpec::Random { std, .. } if !(std > 0.0 && std.is_finite()) => Err(invalid(
                "coupling.std",
                format!("must be finite and > 0, got {std}"),
            )),
            _ => Ok(()),
        }
    }

    /// Level spacing `d = D/(N−1)`; zero in the degenerate case and for `N = 1`.
    pub fn level_spacing(&self) -> f64 {
        if self.n_levels > 1 && self.bandwidth > 0.0 {
            self.bandwidth / (self.n_levels - 1) as f64
        } else {
            0.0
        }
    }

    /// PC energies `E_μ = −D/2 + (μ−1)d + offset`, ascending.
    pub fn pc_energies(&self) -> Vec<f64> {
        let d = self.level_spacing();
        let half = if self.n_levels > 1 {
            self.bandwidth / 2.0
        } else {
            0.0
        };
        (0..self.n_levels)
            .map(|k| -half + k as f64 * d + self.grid_offset)
            .collect()
    }

    /// `u₀ = ū√N`, the size-independent coupling that separates the random regimes.
    pub fn u0(&self) -> f64 {
        self.coupling.typical() * (self.n_levels as f64).sqrt()
    }

    /// Hex digest of the canonical JSON form, used to tag derived artifacts.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("parameters serialize");
        let hash = Sha256::digest(&bytes);
        hash[..16].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Draws the coupling vector `u_μ`, deterministic in `(spec, n, seed)`.
pub fn sample_couplings(spec: &CouplingSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("n", "coupling vector must have at least one entry"));
    }
    match *spec {
        CouplingSpec::Constant { u } => Ok(vec![u; n]),
        CouplingSpec::Random { std, distribution } => {
            if !(std > 0.0 && std.is_finite()) {
                return Err(invalid(
                    "coupling.std",
                    format!("must be finite and > 0, got {std}"),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = match distribution {
                Distribution::Uniform => {
                    let half = std * 3f64.sqrt();
                    let dist = Uniform::new_inclusive(-half, half)
                        .map_err(|e| invalid("coupling.std", e.to_string()))?;
                    (0..n).map(|_| dist.sample(&mut rng)).collect()
                }
                Distribution::Gaussian => {
                    let dist = Normal::new(0.0, std)
                        .map_err(|e| invalid("coupling.std", e.to_string()))?;
                    (0..n).map(|_| dist.sample(&mut rng)).collect()
                }
            };
            Ok(out)
        }
    }
}

/// Converts microscopic couplings of a disordered dot to effective model parameters.
///
/// Returns `(ū, γ) = (u₀/√n, γ₀√s/n)`, where `n` is the number of sites and `s` the
/// number of sites coupled to the single state. The width scales with `√s` as
/// printed; if the relevant count is the number of sites coupled to the lead,
/// pass that count as `s`.
pub fn microscopic_to_effective(u0: f64, gamma0: f64, n: usize, s: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(invalid("n", "must be ≥ 1"));
    }
    if s == 0 || s > n {
        return Err(invalid(
            "s",
            format!("must satisfy 1 ≤ s ≤ n = {n}, got {s}"),
        ));
    }
    let n = n as f64;
    Ok((u0 / n.sqrt(), gamma0 * (s as f64).sqrt() / n))
}

/// The reduced non-Hermitian Hamiltonian on `|0⟩, |1⟩ … |N⟩`.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    params: ModelParams,
    energies: Vec<f64>,
    couplings: Vec<f64>,
    matrix: Mat<Complex64>,
}

/// Builds the reduced Hamiltonian, sampling couplings from `params.seed`.
pub fn build_reduced_hamiltonian(params: &ModelParams) -> Result<EffectiveHamiltonian> {
    params.validate()?;
    let couplings = sample_couplings(&params.coupling, params.n_levels, params.seed)?;
    EffectiveHamiltonian::with_couplings(params, couplings)
}

impl EffectiveHamiltonian {
    /// Builds the reduced Hamiltonian for an explicit coupling vector.
    pub fn with_couplings(params: &ModelParams, couplings: Vec<f64>) -> Result<Self> {
        params.validate()?;
        if couplings.len() != params.n_levels {
            return Err(invalid(
                "couplings",
                format!(
                    "expected {} entries, got {}",
                    params.n_levels,
                    couplings.len()
                ),
            ));
        }
        if couplings.iter().any(|u| !u.is_finite()) {
            return Err(invalid("couplings", "entries must be finite"));
        }
        let energies = params.pc_energies();
        let n = params.n_levels;
        let g = Complex64::new(0.0, -params.gamma);
        let matrix = Mat::from_fn(n + 1, n + 1, |i, j| match (i, j) {
            (0, 0) => Complex64::new(0.0, 0.0),
            (0, j) => Complex64::new(couplings[j - 1], 0.0),
            (i, 0) => Complex64::new(couplings[i - 1], 0.0),
            (i, j) if i == j => Complex64::new(energies[i - 1], 0.0) + g,
            _ => g,
        });
        Ok(EffectiveHamiltonian {
            params: params.clone(),
            energies,
            couplings,
            matrix,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.n_levels + 1
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    pub fn matrix(&self) -> faer::MatRef<'_, Complex64> {
        self.matrix.as_ref()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// `out = H x` in `O(N)` using the rank-one structure of the width block.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        let pc = &x[1..];
        let sum: Complex64 = pc.iter().sum();
        let width = Complex64::new(0.0, -self.params.gamma) * sum;
        out[0] = self.couplings.iter().zip(pc).map(|(u, a)| a * u).sum();
        for (k, o) in out[1..].iter_mut().enumerate() {
            *o = x[0] * self.couplings[k] + pc[k] * self.energies[k] + width;
        }
    }

    /// Upper bound on the spectral radius from the row sums.
    pub fn norm_bound(&self) -> f64 {
        let col: f64 = self.couplings.iter().map(|u| u.abs()).sum();
        let n = self.params.n_levels as f64;
        let pc = self
            .couplings
            .iter()
            .zip(&self.energies)
            .map(|(u, e)| u.abs() + e.abs() + n * self.params.gamma)
            .fold(0.0, f64::max);
        col.max(pc)
    }
}

/// The Hermitian model with an explicit, uniformly discretized real continuum.
///
/// Basis order is `|0⟩`, the `N` PC levels, then the `M` RC levels. All
/// entries are real.
#[derive(Debug, Clone)]
pub struct FullModel {
    params: ModelParams,
    couplings: Vec<f64>,
    rc_energies: Vec<f64>,
    rc_coupling: f64,
    rc_bandwidth: f64,
    rc_spacing: f64,
    matrix: Mat<f64>,
}

/// Builds the explicit model with `m_levels` RC levels spread over `rc_bandwidth`.
///
/// The RC element is `v = sqrt(γ W/(π M))` so that `π v² ν_c = γ` with
/// `ν_c = M/W`.
pub fn build_full_model(
    params: &ModelParams,
    m_levels: usize,
    rc_bandwidth: f64,
) -> Result<FullModel> {
    params.validate()?;
    if m_levels < 2 {
        return Err(invalid(
            "m_levels",
            "the real continuum needs at least two levels",
        ));
    }
    if !(rc_bandwidth > 0.0 && rc_bandwidth.is_finite()) {
        return Err(invalid(
            "rc_bandwidth",
            format!("must be finite and > 0, got {rc_bandwidth}"),
        ));
    }
    let rc_spacing = rc_bandwidth / (m_levels - 1) as f64;
    let recurrence_time = 2.0 * std::f64::consts::PI / rc_spacing;
    let scale = params.bandwidth.max(params.gamma).max(params.u0());
    if rc_bandwidth < 10.0 * scale {
        return Err(invalid(
            "rc_bandwidth",
            format!(
                "W_RC = {rc_bandwidth} must be ≥ 10·max(D, γ, ū√N) = {}",
                10.0 * scale
            ),
        ));
    }
    if m_levels < 10 * params.n_levels {
        return Err(Error::ContinuumTooCoarse {
            reason: format!("M = {m_levels} must be ≥ 10·N = {}", 10 * params.n_levels),
            recurrence_time,
        });
    }
    let couplings = sample_couplings(&params.coupling, params.n_levels, params.seed)?;
    let n = params.n_levels;
    let rc_coupling =
        (params.gamma * rc_bandwidth / (std::f64::consts::PI * m_levels as f64)).sqrt();
    let rc_energies: Vec<f64> = (0..m_levels)
        .map(|k| -rc_bandwidth / 2.0 + k as f64 * rc_spacing)
        .collect();
    let pc_energies = params.pc_energies();
    let dim = 1 + n + m_levels;
    let matrix = Mat::from_fn(dim, dim, |i, j| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if i == j {
            return match i {
                0 => 0.0,
                i if i <= n => pc_energies[i - 1],
                i => rc_energies[i - 1 - n],
            };
        }
        match (i, j) {
            (0, j) if j <= n => couplings[j - 1],
            (i, j) if i >= 1 && i <= n && j > n => rc_coupling,
            _ => 0.0,
        }
    });
    Ok(FullModel {
        params: params.clone(),
        couplings,
        rc_energies,
        rc_coupling,
        rc_bandwidth,
        rc_spacing,
        matrix,
    })
}

impl FullModel {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn rc_energies(&self) -> &[f64] {
        &self.rc_energies
    }

    pub fn rc_coupling(&self) -> f64 {
        self.rc_coupling
    }

    pub fn rc_bandwidth(&self) -> f64 {
        self.rc_bandwidth
    }

    pub fn rc_spacing(&self) -> f64 {
        self.rc_spacing
    }

    /// `2π/d_rc`, when the discrete continuum rephases.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.rc_spacing
    }

    /// Latest time at which the discretized continuum stands in for a true one.
    pub fn validity_horizon(&self) -> f64 {
        0.5 * self.recurrence_time()
    }

    pub fn check_horizon(&self, t: f64) -> Result<()> {
        if t > self.validity_horizon() {
            return Err(Error::BeyondRecurrence {
                requested: t,
                horizon: self.validity_horizon(),
                recurrence_time: self.recurrence_time(),
            });
        }
        Ok(())
    }

    pub fn matrix(&self) -> faer::MatRef<'_, f64> {
        self.matrix.as_ref()
    }
}
