//! Decay-law fits, closed-form rates, regime classification and ensembles.

mod closed_form;
mod ensemble;
mod fit;
mod fluctuation;
mod regime;

pub use closed_form::{crossover_time, fgr_rate, gamma_closed_form};
pub use ensemble::{
    realization_seed, run_ensemble, run_ensemble_with, EnsembleOptions, EnsembleStats, SEED_RULE,
};
pub use fit::{
    first_departure, fit_damped_cosine, fit_damped_cosine_samples, fit_exponential,
    fit_exponential_samples, fit_sinc, fit_sinc_samples, FitModel, FitResult, MIN_PERIODS,
    MIN_PROBABILITY, MIN_WINDOW_SAMPLES,
};
pub use fluctuation::{
    ensemble_fluctuation, fluctuation_amplitude, FluctuationMeasure, FluctuationWindow,
    MIN_FLUCTUATION_SAMPLES,
};
pub use regime::{
    classify_regime, RegimeCase, RegimeRatios, RegimeReport, CASE_I_RATIO, FGR_RATIO,
};
