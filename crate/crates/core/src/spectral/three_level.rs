use faer::Mat;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Exact reduction of the degenerate (`D = 0`) problem.
///
/// With `W₁ ∝ Σ u_μ|μ⟩`, `W₃ = N^{-1/2} Σ|μ⟩` and `W₂` the Gram–Schmidt
/// complement of `W₁` against `W₃`, the Hamiltonian acts on `|0⟩, W₂, W₃` as
///
/// ```text
/// ⎡ 0          U₂√(1−c²)  cU₂  ⎤
/// ⎢ U₂√(1−c²)  0          0    ⎥
/// ⎣ cU₂        0          −iγN ⎦
/// ```
///
/// with `U₁ = Σu`, `U₂ = √Σu²`, `c = U₁/(U₂√N)`. The remaining `N−2`
/// eigenvalues are exactly zero. When all `u_μ` are equal, `W₂` does not
/// exist and the reduction collapses to the 2×2 block on `|0⟩, W₃`.
#[derive(Debug, Clone)]
pub struct ThreeLevelReduction {
    pub u1: f64,
    pub u2: f64,
    pub c: f64,
    /// 3×3, or 2×2 when collapsed.
    pub matrix: Mat<Complex64>,
    /// Sorted by imaginary part, most damped last.
    pub eigenvalues: Vec<Complex64>,
}

impl ThreeLevelReduction {
    pub fn is_collapsed(&self) -> bool {
        self.matrix.nrows() == 2
    }

    /// The two least-damped eigenvalues (the `±U₂ − iδ` pair), ordered by real part.
    pub fn slow_pair(&self) -> Option<[Complex64; 2]> {
        if self.is_collapsed() {
            return None;
        }
        let mut pair = [self.eigenvalues[0], self.eigenvalues[1]];
        pair.sort_by(|a, b| a.re.total_cmp(&b.re));
        Some(pair)
    }

    /// Mean amplitude decay rate `δ` of the slow pair.
    pub fn slow_pair_decay_rate(&self) -> Option<f64> {
        self.slow_pair().map(|[a, b]| -(a.im + b.im) / 2.0)
    }
}

pub fn reduce_three_level(u: &[f64], gamma: f64, n: usize) -> Result<ThreeLevelReduction> {
    if n == 0 || u.len() != n {
        return Err(invalid(
            "u",
            format!("expected {n} ≥ 1 couplings, got {}", u.len()),
        ));
    }
    if !(gamma >= 0.0) {
        return Err(invalid("gamma", "must be ≥ 0"));
    }
    let u1: f64 = u.iter().sum();
    let u2 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if u2 == 0.0 {
        return Err(invalid("u", "all couplings vanish; W₁ is undefined"));
    }
    let nf = n as f64;
    let c = (u1 / (u2 * nf.sqrt())).clamp(-1.0, 1.0);
    let width = Complex64::new(0.0, -gamma * nf);
    let re = |x: f64| Complex64::new(x, 0.0);
    // 1 − c² = Σ(u − ⟨u⟩)²/U₂², free of cancellation for near-equal couplings.
    let mean = u1 / nf;
    let s = (u.iter().map(|x| (x - mean).powi(2)).sum::<f64>().sqrt() / u2).min(1.0);

    let matrix = if s <= 1e-12 {
        Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => re(0.0),
            (1, 1) => width,
            _ => re(c * u2),
        })
    } else {
        Mat::from_fn(3, 3, |i, j| match (i.min(j), i.max(j)) {
            (0, 1) => re(u2 * s),
            (0, 2) => re(c * u2),
            (2, 2) => width,
            _ => re(0.0),
        })
    };
    let mut eigenvalues = matrix
        .eigenvalues()
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    eigenvalues.sort_by(|a, b| b.im.total_cmp(&a.im).then(a.re.total_cmp(&b.re)));
    Ok(ThreeLevelReduction {
        u1,
        u2,
        c,
        matrix,
        eigenvalues,
    })
}
