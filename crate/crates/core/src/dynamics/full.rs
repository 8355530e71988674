use faer::Side;
use num_complex::Complex64;

use super::{check_times, Method, Trajectory};
use crate::error::{Error, Result};
use crate::model::FullModel;

/// Number of grid points at which the full state norm is reconstructed.
const NORM_CHECKPOINTS: usize = 8;

/// Exact unitary propagation of the explicit model through its eigenbasis.
///
/// `A₀(t) = Σ_k |⟨0|k⟩|² e^{−iε_k t}`. Every requested time must lie within
/// the continuum's validity horizon.
pub fn evolve_full_model(fm: &FullModel, times: &[f64]) -> Result<Trajectory> {
    check_times(times)?;
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    fm.check_horizon(t_max)?;

    let evd = fm
        .matrix()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let energies: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let basis = evd.U();
    let dim = fm.dim();
    let first_row: Vec<f64> = (0..dim).map(|k| basis[(0, k)]).collect();

    let phase = |t: f64, k: usize| Complex64::new(0.0, -energies[k] * t).exp();
    let a0: Vec<Complex64> = times
        .iter()
        .map(|&t| {
            (0..dim)
                .map(|k| phase(t, k) * (first_row[k] * first_row[k]))
                .sum()
        })
        .collect();

    let stride = (times.len() / NORM_CHECKPOINTS).max(1);
    let mut norms = Vec::new();
    for &t in times.iter().step_by(stride) {
        let coeffs: Vec<Complex64> = (0..dim).map(|k| phase(t, k) * first_row[k]).collect();
        let norm2: f64 = (0..dim)
            .map(|i| {
                let amp: Complex64 = (0..dim).map(|k| coeffs[k] * basis[(i, k)]).sum();
                amp.norm_sqr()
            })
            .sum();
        norms.push((t, norm2.sqrt()));
    }

    Ok(Trajectory {
        times: times.to_vec(),
        a0,
        method: Method::FullModel,
        params_hash: fm.params().digest(),
        norms,
    })
}
