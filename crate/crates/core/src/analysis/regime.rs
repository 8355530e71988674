use serde::{Deserialize, Serialize};

use super::closed_form::crossover_time;
use crate::model::ModelParams;

/// Above this ratio `u₀/D` the band is effectively degenerate.
pub const CASE_I_RATIO: f64 = 3.0;
/// `ū/d` above which the intermediate case decays at the golden-rule rate.
pub const FGR_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeCase {
    /// Constant couplings; the closed-form rate applies.
    #[serde(rename = "ordered")]
    Ordered,
    /// `u₀ > 3D`: oscillations through many states.
    I,
    /// `u₀/D ∈ [1/3, 3]`: sinc decay then mesoscopic fluctuations.
    II,
    /// `d ≤ u₀ < D/3` without a golden-rule window.
    III,
    /// Case III with `ū > 10d`.
    #[serde(rename = "III_FGR")]
    IIIFgr,
    /// `u₀ < d`: a single continuum state matters.
    IV,
}

impl RegimeCase {
    pub fn label(&self) -> &'static str {
        match self {
            RegimeCase::Ordered => "ordered",
            RegimeCase::I => "I",
            RegimeCase::II => "II",
            RegimeCase::III => "III",
            RegimeCase::IIIFgr => "III_FGR",
            RegimeCase::IV => "IV",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRatios {
    pub u0_over_bandwidth: f64,
    pub u0_over_spacing: f64,
    pub ubar_over_spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub case: RegimeCase,
    pub u_bar: f64,
    pub u0: f64,
    pub ratios: RegimeRatios,
    /// `πū²/d`; absent when `d = 0`.
    pub lambda0: Option<f64>,
    /// `(γ/ū²)·ln(γ/d)` when `γ > d > 0`.
    pub crossover_time: Option<f64>,
    pub thresholds: String,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    }
}

/// Assigns one of the disorder regimes from `u₀ = ū√N`, `D` and `d`.
pub fn classify_regime(params: &ModelParams) -> RegimeReport {
    let u_bar = params.coupling.typical();
    let u0 = params.u0();
    let big_d = params.bandwidth;
    let d = params.level_spacing();
    let ratios = RegimeRatios {
        u0_over_bandwidth: ratio(u0, big_d),
        u0_over_spacing: ratio(u0, d),
        ubar_over_spacing: ratio(u_bar, d),
    };
    let case = if !params.coupling.is_random() {
        RegimeCase::Ordered
    } else if big_d > 0.0 && u0 >= big_d / CASE_I_RATIO && u0 <= CASE_I_RATIO * big_d {
        RegimeCase::II
    } else if u0 > CASE_I_RATIO * big_d {
        RegimeCase::I
    } else if u0 < d {
        RegimeCase::IV
    } else if u_bar > FGR_RATIO * d {
        RegimeCase::IIIFgr
    } else {
        RegimeCase::III
    };
    let lambda0 = (d > 0.0).then(|| std::f64::consts::PI * u_bar * u_bar / d);
    RegimeReport {
        case,
        u_bar,
        u0,
        ratios,
        lambda0,
        crossover_time: crossover_time(u_bar, params.gamma, d).ok(),
        thresholds: format!(
            "I: u0 > {CASE_I_RATIO}D; II: D/{CASE_I_RATIO} <= u0 <= {CASE_I_RATIO}D; IV: u0 < d; \
             III otherwise, FGR when u_bar > {FGR_RATIO}d"
        ),
    }
}
