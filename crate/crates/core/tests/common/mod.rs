//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use hierdecay::model::{EffectiveHamiltonian, ModelParams};
use hierdecay::Complex64;

/// Dense copy of the reduced matrix, built entry by entry from its definition.
pub fn dense_reduced(params: &ModelParams, u: &[f64]) -> Vec<Vec<Complex64>> {
    let n = params.n_levels;
    let e = params.pc_energies();
    let mut h = vec![vec![Complex64::new(0.0, 0.0); n + 1]; n + 1];
    for mu in 1..=n {
        h[0][mu] = Complex64::new(u[mu - 1], 0.0);
        h[mu][0] = h[0][mu];
        for nu in 1..=n {
            h[mu][nu] = Complex64::new(if mu == nu { e[mu - 1] } else { 0.0 }, -params.gamma);
        }
    }
    h
}

pub fn dense_from(h: &EffectiveHamiltonian) -> Vec<Vec<Complex64>> {
    (0..h.dim())
        .map(|i| (0..h.dim()).map(|j| h.get(i, j)).collect())
        .collect()
}

/// Characteristic polynomial coefficients `c[k]` of `λ^k` by Faddeev–LeVerrier.
pub fn char_poly(a: &[Vec<Complex64>]) -> Vec<Complex64> {
    let n = a.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut c = vec![zero; n + 1];
    c[n] = Complex64::new(1.0, 0.0);
    let mut m = vec![vec![zero; n]; n];
    for k in 1..=n {
        // M_k = A M_{k−1} + c_{n−k+1} I
        let mut next = vec![vec![zero; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = zero;
                for l in 0..n {
                    s += a[i][l] * m[l][j];
                }
                next[i][j] = s;
            }
            next[i][i] += c[n - k + 1];
        }
        m = next;
        let mut tr = zero;
        for i in 0..n {
            for l in 0..n {
                tr += a[i][l] * m[l][i];
            }
        }
        c[n - k] = -tr / k as f64;
    }
    c
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, ck| acc * z + ck)
}

/// All roots of a monic polynomial by Durand–Kerner iteration.
pub fn durand_kerner(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let radius = 1.0 + c[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..10_000 {
        let mut change = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = horner(c, z[i]) / den;
            z[i] -= step;
            change = change.max(step.norm());
        }
        if change < 1e-15 * radius {
            break;
        }
    }
    z
}

/// `tr((z − A)⁻¹) = p'(z)/p(z)` by Gauss–Jordan elimination with partial pivoting.
pub fn resolvent_trace(a: &[Vec<Complex64>], z: Complex64) -> Complex64 {
    let n = a.len();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut m: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { z - a[i][j] } else { -a[i][j] })
                .collect()
        })
        .collect();
    let mut inv: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { one } else { zero }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        for k in 0..n {
            m[col][k] /= d;
            inv[col][k] /= d;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                for k in 0..n {
                    let (mc, ic) = (m[col][k], inv[col][k]);
                    m[row][k] -= f * mc;
                    inv[row][k] -= f * ic;
                }
            }
        }
    }
    (0..n).map(|i| inv[i][i]).sum()
}

/// Eigenvalues of a small dense matrix: Durand–Kerner roots of the
/// Faddeev–LeVerrier polynomial, polished by Aberth steps on `det(z − A)`.
pub fn oracle_eigenvalues(a: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut z = durand_kerner(&char_poly(a));
    let scale = 1.0 + z.iter().map(|x| x.norm()).fold(0.0, f64::max);
    for _ in 0..100 {
        let mut change = 0.0f64;
        for i in 0..z.len() {
            let repulsion: Complex64 = (0..z.len())
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = 1.0 / (resolvent_trace(a, z[i]) - repulsion);
            if step.is_finite() {
                z[i] -= step;
                change = change.max(step.norm());
            }
        }
        if change < 1e-16 * scale {
            break;
        }
    }
    z
}

/// Largest distance from each expected value to its closest unused candidate.
pub fn max_matched_distance(expected: &[Complex64], got: &[Complex64]) -> f64 {
    let mut used = vec![false; got.len()];
    let mut worst = 0.0f64;
    for e in expected {
        let (k, d) = got
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, g)| (k, (g - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("as many candidates as expected values");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// `‖Hv − λv‖ / ‖v‖` on a dense matrix.
pub fn residual(h: &[Vec<Complex64>], lambda: Complex64, v: &[Complex64]) -> f64 {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let r2: f64 = h
        .iter()
        .zip(v)
        .map(|(row, vi)| {
            let hv: Complex64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            (hv - lambda * vi).norm_sqr()
        })
        .sum();
    r2.sqrt() / norm
}
