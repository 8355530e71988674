use serde::Serialize;

use super::Spectrum;
use crate::model::ModelParams;

/// A mode counts as the superradiant (Dicke) state when `Im λ < −DICKE_THRESHOLD·Nγ`.
pub const DICKE_THRESHOLD: f64 = 0.5;
/// The slow (Zeno) state is only sought when `γ ≥ this × d`.
pub const ZENO_MIN_GAMMA_OVER_SPACING: f64 = 10.0;

/// Indices of the Dicke and Zeno states in a [`Spectrum`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialStates {
    pub dicke_index: Option<usize>,
    pub zeno_index: Option<usize>,
    /// `Σ |Cₙwₙ|` over all other modes.
    pub residual_weight_bound: f64,
    /// Why a field is empty, when one is.
    pub diagnostic: Option<String>,
}

pub fn identify_special_states(spec: &Spectrum, params: &ModelParams) -> SpecialStates {
    let weights: Vec<f64> = spec.weights().iter().map(|w| w.norm()).collect();
    let residual = |skip: &[Option<usize>]| {
        weights
            .iter()
            .enumerate()
            .filter(|(n, _)| !skip.contains(&Some(*n)))
            .map(|(_, w)| w)
            .sum::<f64>()
    };

    if params.gamma == 0.0 {
        return SpecialStates {
            dicke_index: None,
            zeno_index: None,
            residual_weight_bound: residual(&[]),
            diagnostic: Some("γ = 0: Hermitian limit, no Dicke/Zeno split".into()),
        };
    }

    let n_gamma = params.n_levels as f64 * params.gamma;
    let (most_damped, min_im) = spec
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, l)| (k, l.im))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("spectrum is nonempty");
    let dicke = (min_im < -DICKE_THRESHOLD * n_gamma).then_some(most_damped);

    let d = params.level_spacing();
    let mut diagnostic = None;
    let zeno = if params.coupling.is_random() {
        diagnostic = Some("random couplings: no single Zeno state".into());
        None
    } else if d > 0.0 && params.gamma < ZENO_MIN_GAMMA_OVER_SPACING * d {
        diagnostic = Some(format!(
            "γ/d = {:.3} below {ZENO_MIN_GAMMA_OVER_SPACING}: Zeno regime not reached",
            params.gamma / d
        ));
        None
    } else {
        weights
            .iter()
            .enumerate()
            .filter(|(k, _)| Some(*k) != dicke)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
    };
    if dicke.is_none() {
        let msg =
            format!("no eigenvalue with Im λ < −{DICKE_THRESHOLD}·Nγ (min Im λ = {min_im:.6})");
        diagnostic = Some(match diagnostic {
            Some(prev) => format!("{prev}; {msg}"),
            None => msg,
        });
    }

    SpecialStates {
        dicke_index: dicke,
        zeno_index: zeno,
        residual_weight_bound: residual(&[dicke, zeno]),
        diagnostic,
    }
}
