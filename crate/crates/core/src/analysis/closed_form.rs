use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Dominant amplitude decay rate `Γ = u²/(γ + d/π)` for constant couplings.
///
/// Reduces to the golden-rule rate `πu²/d` at `γ = 0`; grows slower as the
/// width `γ` increases.
pub fn gamma_closed_form(u: f64, gamma: f64, d: f64) -> Result<f64> {
    if gamma < 0.0 || d < 0.0 {
        return Err(invalid("gamma/d", "must be ≥ 0"));
    }
    if gamma == 0.0 && d == 0.0 {
        return Err(invalid("gamma/d", "γ and d cannot both vanish"));
    }
    Ok(u * u / (gamma + d / PI))
}

/// Golden-rule rate `λ₀ = πū²/d`.
pub fn fgr_rate(u_bar: f64, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(invalid("d", "level spacing must be > 0"));
    }
    Ok(PI * u_bar * u_bar / d)
}

/// Time `(γ/u²)·ln(γ/d)` after which the slow non-Zeno modes take over.
pub fn crossover_time(u: f64, gamma: f64, d: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(invalid("u", "must be > 0"));
    }
    if !(d > 0.0) || gamma <= d {
        return Err(invalid(
            "gamma",
            format!("Zeno regime needs γ > d > 0 (γ = {gamma}, d = {d})"),
        ));
    }
    Ok(gamma / (u * u) * (gamma / d).ln())
}
