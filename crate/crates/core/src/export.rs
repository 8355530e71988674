//! CSV and JSON writers with a metadata block sufficient to rerun a computation.
//!
//! Numbers are written with `{:.16e}` (17 significant digits), which is
//! locale-independent and round-trips `f64` exactly. CSV files carry their
//! metadata in a `<stem>.meta.json` sidecar so the header row stays exact.

use std::fmt::Write as _;
use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::EnsembleStats;
use crate::dynamics::{Method, Trajectory};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectral::Spectrum;

pub const TRAJECTORY_HEADER: &str = "t,re_a0,im_a0,p0";
pub const SPECTRUM_HEADER: &str = "re_lambda,im_lambda,abs_c";
pub const ENSEMBLE_HEADER: &str = "t,mean_p0,var_p0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub params: ModelParams,
    pub params_hash: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Echo of the run configuration that produced the file.
    #[serde(default)]
    pub config: Value,
}

impl Metadata {
    pub fn new(params: &ModelParams) -> Self {
        Metadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            params: params.clone(),
            params_hash: params.digest(),
            seed: params.seed,
            method: None,
            config: Value::Null,
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = Some(method.as_str().to_string());
        self
    }

    pub fn with_config(mut self, config: Value) -> Self {
        self.config = config;
        self
    }
}

/// `dir/name.csv` → `dir/name.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    csv.with_file_name(format!("{stem}.meta.json"))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(80 * (traj.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (t, a) in traj.times.iter().zip(&traj.a0) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            num(*t),
            num(a.re),
            num(a.im),
            num(a.norm_sqr())
        );
    }
    out
}

fn parse_field(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: `{s}` is not a number")))
}

/// Reads a trajectory CSV. The `p0` column is ignored in favour of `|A₀|²`.
pub fn read_trajectory_csv(reader: impl BufRead) -> Result<Trajectory> {
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != TRAJECTORY_HEADER {
        return Err(Error::Parse(format!(
            "expected header `{TRAJECTORY_HEADER}`, found `{}`",
            header.trim()
        )));
    }
    let mut times = Vec::new();
    let mut a0 = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "line {}: expected 4 fields, found {}",
                i + 2,
                fields.len()
            )));
        }
        times.push(parse_field(fields[0], i + 2)?);
        a0.push(Complex64::new(
            parse_field(fields[1], i + 2)?,
            parse_field(fields[2], i + 2)?,
        ));
    }
    if times.is_empty() {
        return Err(Error::Parse("trajectory file has no rows".into()));
    }
    Ok(Trajectory {
        times,
        a0,
        method: Method::Imported,
        params_hash: String::new(),
        norms: Vec::new(),
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes `path` and its metadata sidecar.
pub fn write_trajectory(path: &Path, traj: &Trajectory, meta: &Metadata) -> Result<()> {
    fs::write(path, trajectory_csv(traj))?;
    let norms: Vec<[f64; 2]> = traj.norms.iter().map(|(t, n)| [*t, *n]).collect();
    write_json(
        &sidecar_path(path),
        &json!({ "metadata": meta, "norm_checkpoints": norms }),
    )
}

fn pairs(z: &[Complex64]) -> Vec<[f64; 2]> {
    z.iter().map(|z| [z.re, z.im]).collect()
}

pub fn spectrum_json(spec: &Spectrum, meta: &Metadata) -> Value {
    json!({
        "metadata": meta,
        "coefficient_method": format!("{:?}", spec.method),
        "eigenvalues": pairs(&spec.eigenvalues),
        "coefficients": pairs(&spec.coefficients),
        "overlaps": pairs(&spec.overlaps),
        "weights": pairs(&spec.weights()),
        "defective": spec.defective,
    })
}

/// `(Re λ, Im λ, |Cₙ|)` sorted by `Re λ`.
pub fn spectrum_csv(spec: &Spectrum) -> String {
    let mut rows: Vec<(Complex64, f64)> = spec
        .eigenvalues
        .iter()
        .zip(&spec.coefficients)
        .map(|(l, c)| (*l, c.norm()))
        .collect();
    rows.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let mut out = String::from(SPECTRUM_HEADER);
    out.push('\n');
    for (l, c) in rows {
        let _ = writeln!(out, "{},{},{}", num(l.re), num(l.im), num(c));
    }
    out
}

pub fn write_spectrum(
    json_path: &Path,
    csv_path: &Path,
    spec: &Spectrum,
    meta: &Metadata,
) -> Result<()> {
    write_json(json_path, &spectrum_json(spec, meta))?;
    fs::write(csv_path, spectrum_csv(spec))?;
    write_json(&sidecar_path(csv_path), &json!({ "metadata": meta }))
}

pub fn ensemble_csv(stats: &EnsembleStats) -> String {
    let mut out = String::from(ENSEMBLE_HEADER);
    out.push('\n');
    for i in 0..stats.times.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            num(stats.times[i]),
            num(stats.mean_p0[i]),
            num(stats.var_p0[i])
        );
    }
    out
}

/// Writes the ensemble CSV, its sidecar and a JSON summary with `extra` merged in.
pub fn write_ensemble(
    csv_path: &Path,
    summary_path: &Path,
    stats: &EnsembleStats,
    meta: &Metadata,
    extra: Value,
) -> Result<()> {
    fs::write(csv_path, ensemble_csv(stats))?;
    write_json(&sidecar_path(csv_path), &json!({ "metadata": meta }))?;
    let mut summary = json!({
        "metadata": meta,
        "n_realizations": stats.n_realizations,
        "base_seed": stats.base_seed,
        "seed_rule": stats.seed_rule,
        "fluct_rms": stats.fluct_rms,
        "window": stats.window,
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut summary, extra) {
        dst.extend(src);
    }
    write_json(summary_path, &summary)
}
