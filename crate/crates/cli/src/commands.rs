use std::path::{Path, PathBuf};

use hierdecay::analysis::{
    classify_regime, fit_damped_cosine_samples, fit_exponential_samples, fit_sinc_samples,
    run_ensemble_with, EnsembleOptions, FitModel, FluctuationWindow,
};
use hierdecay::dynamics::{
    evolve_full_model, evolve_reduced_ode, evolve_spectral, survival_probability, Method,
    Trajectory,
};
use hierdecay::export::{self, Metadata};
use hierdecay::model::{build_full_model, build_reduced_hamiltonian};
use hierdecay::spectral::{eigendecompose_with, identify_special_states, EigenOptions};
use serde_json::{json, Value};

use crate::config::{Format, MethodChoice, RunConfig};
use crate::error::CliError;

/// Spectral and ODE amplitudes must agree to this in `--method all`.
pub const REDUCED_TOLERANCE: f64 = 1e-4;
/// Full-model and reduced survival probabilities must agree to this.
pub const FULL_TOLERANCE: f64 = 1e-2;

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub quiet: bool,
}

impl Context<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.cfg.output.directory.join(name)
    }

    fn meta(&self) -> Metadata {
        Metadata::new(&self.cfg.model).with_config(self.cfg.echo())
    }

    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(hierdecay::Error::from)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn spectrum_of(cfg: &RunConfig) -> Result<hierdecay::spectral::Spectrum, CliError> {
    let h = build_reduced_hamiltonian(&cfg.model)?;
    let opts = EigenOptions {
        max_dim: cfg.solver.max_dim,
        ..EigenOptions::default()
    };
    Ok(eigendecompose_with(&h, &opts)?)
}

pub fn spectrum(ctx: &Context) -> Result<(), CliError> {
    let spec = spectrum_of(ctx.cfg)?;
    let special = identify_special_states(&spec, &ctx.cfg.model);
    let meta = ctx.meta();
    let out = &ctx.cfg.output;
    if out.wants(Format::Json) {
        let mut doc = export::spectrum_json(&spec, &meta);
        doc["special_states"] = serde_json::to_value(&special).map_err(hierdecay::Error::from)?;
        write_json(&ctx.path("spectrum.json"), &doc)?;
    }
    if out.wants(Format::Csv) {
        let csv = ctx.path("spectrum.csv");
        std::fs::write(&csv, export::spectrum_csv(&spec))?;
        write_json(&export::sidecar_path(&csv), &json!({ "metadata": meta }))?;
    }
    let min_im = spec
        .eigenvalues
        .iter()
        .map(|l| l.im)
        .fold(f64::INFINITY, f64::min);
    ctx.say(format!(
        "{} eigenvalues, min Im λ = {min_im:.6}, dicke = {:?}, zeno = {:?}",
        spec.len(),
        special.dicke_index,
        special.zeno_index
    ));
    Ok(())
}

fn run_method(cfg: &RunConfig, method: Method, times: &[f64]) -> Result<Trajectory, CliError> {
    Ok(match method {
        Method::Spectral => evolve_spectral(&spectrum_of(cfg)?, times)?,
        Method::ReducedOde => evolve_reduced_ode(
            &build_reduced_hamiltonian(&cfg.model)?,
            times,
            &cfg.ode_options(),
        )?,
        Method::FullModel => {
            let rc = cfg.rc.ok_or_else(|| {
                CliError::Config("method `full` needs an [rc] section (m_levels, bandwidth)".into())
            })?;
            evolve_full_model(
                &build_full_model(&cfg.model, rc.m_levels, rc.bandwidth)?,
                times,
            )?
        }
        Method::Imported => unreachable!("never requested"),
    })
}

pub fn evolve(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let times = cfg.times();
    let methods: Vec<Method> = match cfg.solver.method {
        MethodChoice::Spectral => vec![Method::Spectral],
        MethodChoice::Ode => vec![Method::ReducedOde],
        MethodChoice::Full => vec![Method::FullModel],
        MethodChoice::All if cfg.rc.is_some() => {
            vec![Method::Spectral, Method::ReducedOde, Method::FullModel]
        }
        MethodChoice::All => vec![Method::Spectral, Method::ReducedOde],
    };
    let mut trajectories = Vec::new();
    for method in methods {
        let traj = run_method(cfg, method, &times)?;
        let path = ctx.path(&format!("trajectory_{}.csv", method.as_str()));
        export::write_trajectory(&path, &traj, &ctx.meta().with_method(method))?;
        let p = survival_probability(&traj);
        ctx.say(format!(
            "{}: {} samples, p₀(t_max) = {:.6e} -> {}",
            method.as_str(),
            traj.len(),
            p.last().copied().unwrap_or(f64::NAN),
            path.display()
        ));
        trajectories.push(traj);
    }
    if cfg.solver.method != MethodChoice::All {
        return Ok(());
    }

    let spectral_vs_ode = trajectories[0].max_amplitude_deviation(&trajectories[1])?;
    let full_vs_reduced = match trajectories.get(2) {
        Some(full) => Some(full.max_probability_deviation(&trajectories[0])?),
        None => None,
    };
    let passed = spectral_vs_ode <= REDUCED_TOLERANCE
        && full_vs_reduced.map_or(true, |d| d <= FULL_TOLERANCE);
    write_json(
        &ctx.path("deviation.json"),
        &json!({
            "metadata": ctx.meta(),
            "spectral_vs_ode_max_amplitude": spectral_vs_ode,
            "spectral_vs_ode_tolerance": REDUCED_TOLERANCE,
            "full_vs_reduced_max_probability": full_vs_reduced,
            "full_vs_reduced_tolerance": FULL_TOLERANCE,
            "passed": passed,
        }),
    )?;
    ctx.say(format!(
        "spectral vs ode: {spectral_vs_ode:.3e}; full vs reduced: {}",
        full_vs_reduced.map_or("n/a".to_string(), |d| format!("{d:.3e}"))
    ));
    if !passed {
        return Err(CliError::Validation(format!(
            "spectral vs ode {spectral_vs_ode:.3e} (tolerance {REDUCED_TOLERANCE:e}), \
             full vs reduced {full_vs_reduced:?} (tolerance {FULL_TOLERANCE:e})"
        )));
    }
    Ok(())
}

pub fn ensemble(ctx: &Context, workers: Option<usize>) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let ens = cfg
        .ensemble
        .ok_or_else(|| CliError::Config("missing [ensemble] section (n_realizations)".into()))?;
    let window = match ens.window {
        Some((a, b)) => Some(FluctuationWindow::new(a, b, cfg.model.bandwidth)?),
        None => None,
    };
    let opts = EnsembleOptions { workers, window };
    let stats = run_ensemble_with(&cfg.model, ens.n_realizations, &cfg.times(), &opts)?;
    let meta = ctx.meta();
    let csv = ctx.path("ensemble.csv");
    if cfg.output.wants(Format::Csv) {
        std::fs::write(&csv, export::ensemble_csv(&stats))?;
        write_json(&export::sidecar_path(&csv), &json!({ "metadata": meta }))?;
    }
    if cfg.output.wants(Format::Json) {
        write_json(
            &ctx.path("ensemble.json"),
            &json!({
                "metadata": meta,
                "n_realizations": stats.n_realizations,
                "base_seed": stats.base_seed,
                "seed_rule": stats.seed_rule,
                "fluct_rms": stats.fluct_rms,
                "window": stats.window,
            }),
        )?;
    }
    ctx.say(format!(
        "{} realizations, fluct_rms = {}",
        stats.n_realizations,
        stats
            .fluct_rms
            .map_or("n/a".to_string(), |f| format!("{f:.6e}"))
    ));
    Ok(())
}

pub fn classify(ctx: &Context) -> Result<(), CliError> {
    let report = classify_regime(&ctx.cfg.model);
    let doc = json!({ "metadata": ctx.meta(), "report": report });
    write_json(&ctx.path("regime.json"), &doc)?;
    ctx.say(serde_json::to_string_pretty(&doc["report"]).map_err(hierdecay::Error::from)?);
    Ok(())
}

pub fn fit(ctx: &Context, trajectory: &Path) -> Result<(), CliError> {
    let file = std::fs::File::open(trajectory)
        .map_err(|e| CliError::Config(format!("cannot open {}: {e}", trajectory.display())))?;
    let traj = export::read_trajectory_csv(std::io::BufReader::new(file))?;
    let p = survival_probability(&traj);
    let (model, window) = match ctx.cfg.fit {
        Some(f) => (f.model, f.window),
        None => (FitModel::Exponential, None),
    };
    let window = window.unwrap_or((traj.times[0], traj.times[traj.len() - 1]));
    let result = match model {
        FitModel::Exponential => fit_exponential_samples(&traj.times, &p, window)?,
        FitModel::DampedCosine => fit_damped_cosine_samples(&traj.times, &p, window)?,
        FitModel::Sinc => fit_sinc_samples(&traj.times, &p, window)?,
    };
    let doc = json!({
        "metadata": ctx.meta(),
        "trajectory": trajectory.display().to_string(),
        "fit": result,
    });
    write_json(&ctx.path("fit.json"), &doc)?;
    ctx.say(serde_json::to_string_pretty(&doc["fit"]).map_err(hierdecay::Error::from)?);
    Ok(())
}
