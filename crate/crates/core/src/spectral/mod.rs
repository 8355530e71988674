//! Spectral decomposition of the reduced Hamiltonian.
//!
//! `H` is complex symmetric (`H = Hᵀ`, not Hermitian), so its left
//! eigenvectors are transposes of the right ones and the natural pairing is
//! the unconjugated bilinear form `xᵀy`. With every right eigenvector scaled
//! so that `VₙᵀVₙ = 1`, the initial state expands as
//!
//! ```text
//! |0⟩ = Σ Cₙ |Vₙ⟩,   Cₙ = Vₙᵀ e₀ = wₙ,   A₀(t) = Σ Cₙ wₙ e^{−iλₙ t}
//! ```
//!
//! where `wₙ = ⟨0|Vₙ⟩` is the first component. `Cₙ` is not the Hermitian
//! projection `⟨Vₙ|0⟩`. When `VₙᵀVₙ` nearly vanishes (an exceptional point)
//! the pair is flagged and the coefficients come from a least-squares solve
//! of `Σ Cₙ Vₙ = e₀` instead.

mod secular;
mod special;
mod three_level;

pub use secular::{eigenvector_from_eigenvalue, secular_function, secular_roots};
pub use special::{
    identify_special_states, SpecialStates, DICKE_THRESHOLD, ZENO_MIN_GAMMA_OVER_SPACING,
};
pub use three_level::{reduce_three_level, ThreeLevelReduction};

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EffectiveHamiltonian, ModelParams};

/// Default cap on the dense problem size.
pub const DEFAULT_MAX_DIM: usize = 5001;
/// `|VₙᵀVₙ|` at or below this marks a bilinear breakdown.
pub const BILINEAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub max_dim: usize,
    pub bilinear_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            max_dim: DEFAULT_MAX_DIM,
            bilinear_tol: BILINEAR_TOL,
        }
    }
}

/// How the expansion coefficients were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMethod {
    Bilinear,
    LeastSquares,
}

/// Eigenvalues, bilinear-normalized right eigenvectors and the expansion of `|0⟩`.
///
/// Eigenpairs are sorted by real part, then imaginary part.
#[derive(Debug, Clone)]
pub struct Spectrum {
    params: ModelParams,
    trace: Complex64,
    pub eigenvalues: Vec<Complex64>,
    /// Column `n` is `Vₙ`.
    pub right_vectors: Mat<Complex64>,
    pub coefficients: Vec<Complex64>,
    pub overlaps: Vec<Complex64>,
    /// `VₙᵀVₙ` of the unit 2-norm eigenvector, before bilinear rescaling.
    pub bilinear_norms: Vec<Complex64>,
    /// Indices whose bilinear norm fell below tolerance.
    pub defective: Vec<usize>,
    pub method: CoefficientMethod,
}

pub fn eigendecompose(h: &EffectiveHamiltonian) -> Result<Spectrum> {
    eigendecompose_with(h, &EigenOptions::default())
}

pub fn eigendecompose_with(h: &EffectiveHamiltonian, opts: &EigenOptions) -> Result<Spectrum> {
    let dim = h.dim();
    if dim > opts.max_dim {
        return Err(Error::DimensionCap {
            dim,
            cap: opts.max_dim,
        });
    }
    let evd = h
        .matrix()
        .eigen()
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        s[a].re
            .total_cmp(&s[b].re)
            .then(s[a].im.total_cmp(&s[b].im))
    });

    let mut eigenvalues = Vec::with_capacity(dim);
    let mut vectors = Mat::<Complex64>::zeros(dim, dim);
    let mut bilinear_norms = Vec::with_capacity(dim);
    let mut defective = Vec::new();
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(s[src]);
        let norm2 = (0..dim).map(|i| u[(i, src)].norm_sqr()).sum::<f64>().sqrt();
        let b: Complex64 = (0..dim)
            .map(|i| u[(i, src)] * u[(i, src)])
            .sum::<Complex64>()
            / (norm2 * norm2);
        bilinear_norms.push(b);
        let scale = if b.norm() > opts.bilinear_tol {
            1.0 / (Complex64::new(norm2, 0.0) * b.sqrt())
        } else {
            defective.push(col);
            Complex64::new(1.0 / norm2, 0.0)
        };
        for i in 0..dim {
            vectors[(i, col)] = u[(i, src)] * scale;
        }
    }

    let overlaps: Vec<Complex64> = (0..dim).map(|n| vectors[(0, n)]).collect();
    let (coefficients, method) = if defective.is_empty() {
        (overlaps.clone(), CoefficientMethod::Bilinear)
    } else {
        let mut rhs = Mat::<Complex64>::zeros(dim, 1);
        rhs[(0, 0)] = Complex64::new(1.0, 0.0);
        let c = vectors.col_piv_qr().solve_lstsq(&rhs);
        let coeffs: Vec<Complex64> = (0..dim).map(|n| c[(n, 0)]).collect();
        if coeffs
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::DefectiveSpectrum { indices: defective });
        }
        (coeffs, CoefficientMethod::LeastSquares)
    };

    Ok(Spectrum {
        params: h.params().clone(),
        trace: h.trace(),
        eigenvalues,
        right_vectors: vectors,
        coefficients,
        overlaps,
        bilinear_norms,
        defective,
        method,
    })
}

impl Spectrum {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Trace of the matrix this spectrum came from.
    pub fn trace(&self) -> Complex64 {
        self.trace
    }

    /// Weights `Cₙ wₙ` of each mode in `A₀(t)`.
    pub fn weights(&self) -> Vec<Complex64> {
        self.coefficients
            .iter()
            .zip(&self.overlaps)
            .map(|(c, w)| c * w)
            .collect()
    }

    pub fn survival_amplitude(&self, t: f64) -> Complex64 {
        self.coefficients
            .iter()
            .zip(&self.overlaps)
            .zip(&self.eigenvalues)
            .map(|((c, w), l)| c * w * (Complex64::new(0.0, -t) * l).exp())
            .sum()
    }

    /// `Σ λₙ`, to compare with the trace.
    pub fn eigenvalue_sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }

    /// Max-norm of `Σ Cₙ Vₙ − e₀`.
    pub fn reconstruction_error(&self) -> f64 {
        let dim = self.len();
        (0..dim)
            .map(|i| {
                let target = if i == 0 { 1.0 } else { 0.0 };
                let s: Complex64 = (0..dim)
                    .map(|n| self.coefficients[n] * self.right_vectors[(i, n)])
                    .sum();
                (s - target).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|VₘᵀVₙ|` over `m ≠ n`.
    pub fn max_bilinear_cross_overlap(&self) -> f64 {
        let v = &self.right_vectors;
        let g = v.transpose() * v;
        let mut worst = 0.0f64;
        for m in 0..self.len() {
            for n in 0..self.len() {
                if m != n {
                    worst = worst.max(g[(m, n)].norm());
                }
            }
        }
        worst
    }

    /// The eigenvector `Vₙ` as an owned vector.
    pub fn vector(&self, n: usize) -> Vec<Complex64> {
        (0..self.len())
            .map(|i| self.right_vectors[(i, n)])
            .collect()
    }
}

/// Matches each reference value to its nearest candidate.
///
/// Returns `None` if two references pick the same candidate.
pub fn match_nearest(reference: &[Complex64], candidates: &[Complex64]) -> Option<Vec<usize>> {
    let mut taken = vec![false; candidates.len()];
    let mut out = Vec::with_capacity(reference.len());
    for r in reference {
        let best = candidates
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - r).norm().total_cmp(&(b.1 - r).norm()))?
            .0;
        if taken[best] {
            return None;
        }
        taken[best] = true;
        out.push(best);
    }
    Some(out)
}
