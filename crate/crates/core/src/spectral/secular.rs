//! Roots of the exact eigenvalue equation for constant `γ`.
//!
//! With `S₁ = Σ 1/(λ−E_μ)`, `S_u = Σ u_μ/(λ−E_μ)` and `S_uu = Σ u_μ²/(λ−E_μ)`,
//! eliminating the PC amplitudes gives
//!
//! ```text
//! S_uu − iγ Σ₁ S_u = λ,   Σ₁ = S_u / (iγ S₁ + 1)
//! ```
//!
//! Clearing the `1 + iγS₁` denominator, the characteristic polynomial is
//! `p(λ) = Π(λ−E_μ) · g(λ)` with `g = (1 + iγS₁)(λ − S_uu) + iγ S_u²`, so
//! `p'/p = S₁ + g'/g` is available in `O(N)` without forming coefficients.
//! Roots are seeded from the `γ = 0` problem, whose roots interlace the poles
//! and are found by bisection, then refined simultaneously by Aberth–Ehrlich
//! iteration on `p`.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result, UnconvergedRoot};
use crate::model::ModelParams;

const MAX_ITER: usize = 500;
const STEP_TOL: f64 = 1e-14;

struct Sums {
    s1: Complex64,
    su: Complex64,
    suu: Complex64,
    ds1: Complex64,
    dsu: Complex64,
    dsuu: Complex64,
}

fn sums(z: Complex64, energies: &[f64], u: &[f64]) -> Sums {
    let zero = Complex64::new(0.0, 0.0);
    let mut s = Sums {
        s1: zero,
        su: zero,
        suu: zero,
        ds1: zero,
        dsu: zero,
        dsuu: zero,
    };
    for (&e, &u) in energies.iter().zip(u) {
        let r = 1.0 / (z - e);
        let r2 = r * r;
        s.s1 += r;
        s.su += r * u;
        s.suu += r * (u * u);
        s.ds1 -= r2;
        s.dsu -= r2 * u;
        s.dsuu -= r2 * (u * u);
    }
    s
}

/// Residual `S_uu − iγ Σ₁ S_u − λ` of the eigenvalue equation.
pub fn secular_function(lambda: Complex64, gamma: f64, energies: &[f64], u: &[f64]) -> Complex64 {
    let s = sums(lambda, energies, u);
    let ig = Complex64::new(0.0, gamma);
    let sigma1 = s.su / (ig * s.s1 + 1.0);
    s.suu - ig * sigma1 * s.su - lambda
}

/// `p'(z)/p(z)` for the characteristic polynomial, or `None` when `z` is a root.
fn log_derivative(z: Complex64, gamma: f64, energies: &[f64], u: &[f64]) -> Option<Complex64> {
    let s = sums(z, energies, u);
    let ig = Complex64::new(0.0, gamma);
    let a = ig * s.s1 + 1.0;
    let b = z - s.suu;
    let g = a * b + ig * s.su * s.su;
    let dg = ig * s.ds1 * b + a * (1.0 - s.dsuu) + 2.0 * ig * s.su * s.dsu;
    if g == Complex64::new(0.0, 0.0) {
        return None;
    }
    Some(s.s1 + dg / g)
}

/// Real root of `λ − Σ u²/(λ−E)` inside an interval where it is increasing.
fn bisect_hermitian(mut lo: f64, mut hi: f64, energies: &[f64], u: &[f64]) -> f64 {
    let f = |x: f64| {
        x - energies
            .iter()
            .zip(u)
            .map(|(e, u)| u * u / (x - e))
            .sum::<f64>()
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_inputs(params: &ModelParams, u: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    if u.len() != params.n_levels {
        return Err(invalid(
            "u",
            format!("expected {} couplings, got {}", params.n_levels, u.len()),
        ));
    }
    let energies = params.pc_energies();
    let scale = params.bandwidth.max(1.0);
    for (k, pair) in energies.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        if gap <= 1e-12 * scale {
            return Err(Error::QuasiDegeneratePoles {
                first: k,
                second: k + 1,
                gap,
            });
        }
    }
    Ok(energies)
}

/// The `N+1` roots of the eigenvalue equation, one per real-axis bracket.
///
/// Root `k` is seeded in the `k`-th bracket of the sorted poles: below `E₁`,
/// between consecutive `E_μ`, then above `E_N`.
pub fn secular_roots(params: &ModelParams, u: &[f64]) -> Result<Vec<Complex64>> {
    let energies = check_inputs(params, u)?;
    let n = energies.len();
    let unorm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let first = energies[0];
    let last = energies[n - 1];
    let reach = unorm + first.abs().max(last.abs()) + 1.0;

    let mut brackets = Vec::with_capacity(n + 1);
    brackets.push((first - reach, first));
    for pair in energies.windows(2) {
        brackets.push((pair[0], pair[1]));
    }
    brackets.push((last, last + reach));

    let seeds: Vec<f64> = brackets
        .iter()
        .map(|&(lo, hi)| bisect_hermitian(lo, hi, &energies, u))
        .collect();
    if params.gamma == 0.0 {
        return Ok(seeds.into_iter().map(|x| Complex64::new(x, 0.0)).collect());
    }

    // Pushing the seeds slightly into the lower half plane breaks the real-axis symmetry.
    let spacing = if n > 1 {
        (last - first) / (n - 1) as f64
    } else {
        1.0
    };
    let nudge = 1e-3 * spacing.min(params.gamma).max(1e-12);
    let mut z: Vec<Complex64> = seeds.iter().map(|&x| Complex64::new(x, -nudge)).collect();
    let mut converged = vec![false; z.len()];

    for _ in 0..MAX_ITER {
        let mut all = true;
        for k in 0..z.len() {
            let step = match log_derivative(z[k], params.gamma, &energies, u) {
                None => Complex64::new(0.0, 0.0),
                Some(ratio) => {
                    let newton = 1.0 / ratio;
                    let repulsion: Complex64 = (0..z.len())
                        .filter(|&j| j != k)
                        .map(|j| 1.0 / (z[k] - z[j]))
                        .sum();
                    newton / (1.0 - newton * repulsion)
                }
            };
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
            }
            converged[k] = step.norm() <= STEP_TOL * (1.0 + z[k].norm());
            all &= converged[k];
        }
        if all {
            return Ok(z);
        }
    }

    let roots = converged
        .iter()
        .enumerate()
        .filter(|(_, &ok)| !ok)
        .map(|(k, _)| UnconvergedRoot {
            index: k,
            estimate: z[k],
            bracket: brackets[k],
        })
        .collect();
    Err(Error::SecularUnconverged { roots })
}

/// Right eigenvector `|0⟩ + Σ (u_μ − iγΣ₁)/(λ − E_μ) |μ⟩` for an eigenvalue `λ`.
///
/// The first component is 1; no normalization is applied.
pub fn eigenvector_from_eigenvalue(
    lambda: Complex64,
    params: &ModelParams,
    u: &[f64],
) -> Result<Vec<Complex64>> {
    params.validate()?;
    if u.len() != params.n_levels {
        return Err(invalid(
            "u",
            format!("expected {} couplings, got {}", params.n_levels, u.len()),
        ));
    }
    let energies = params.pc_energies();
    for (index, &e) in energies.iter().enumerate() {
        let distance = (lambda - e).norm();
        if distance < 1e-12 {
            return Err(Error::PoleProximity {
                index,
                lambda,
                distance,
            });
        }
    }
    let s = sums(lambda, &energies, u);
    let ig = Complex64::new(0.0, params.gamma);
    let sigma1 = s.su / (ig * s.s1 + 1.0);
    let mut v = Vec::with_capacity(energies.len() + 1);
    v.push(Complex64::new(1.0, 0.0));
    v.extend(
        energies
            .iter()
            .zip(u)
            .map(|(&e, &u)| (u - ig * sigma1) / (lambda - e)),
    );
    Ok(v)
}
