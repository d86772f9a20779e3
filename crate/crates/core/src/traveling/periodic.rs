//! Periodic traveling waves of
//! `u_t + u u_x + u_xxx - l 𝒯_δ(u_xx) = 0`, i.e. profiles solving
//!
//! ```text
//! φ'' - l 𝒯_δ φ + φ²/2 - c φ = A,
//! ```
//!
//! with `𝒯_δ` the multiplier `k coth(δk)`. For mean-zero `φ` the integration
//! constant is forced to `A = mean(φ²)/2 = (1/(4L'))∫φ²` over the half-period
//! `L'`. The solver replaces the `k = 0` equation by `mean(φ) = 0`.

use serde::{Deserialize, Serialize};

use super::newton::{ProfileProblem, SolverConfig};
use super::SolitaryWave;
use crate::error::{Error, Result};
use crate::model::{Family, Model};
use crate::spectral::{tilbert_unchecked, RealField, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicData {
    /// Weight of the nonlocal term.
    pub l: f64,
    /// The integration constant `A`.
    pub integration_constant: f64,
}

fn periodic_symbol(k: f64, delta: f64, l: f64, c: f64) -> f64 {
    if k == 0.0 {
        // the k = 0 row is replaced by the mean constraint
        0.0
    } else {
        -k * k - l * tilbert_unchecked(k, delta) - c
    }
}

fn problem<'a>(grid: &'a std::sync::Arc<crate::Grid>, model: &Model, l: f64, c: f64, cfg: &SolverConfig) -> ProfileProblem<'a> {
    let delta = model.delta();
    ProfileProblem {
        grid,
        symbol: grid.wavenumbers().iter().map(|&k| periodic_symbol(k, delta, l, c)).collect(),
        mean_constraint: true,
        dealias: cfg.dealias,
        exec: cfg.exec,
    }
}

pub(crate) fn periodic_residual(phi: &RealField, model: &Model, l: f64, c: f64) -> SpectralField {
    let cfg = SolverConfig::default();
    let p = problem(phi.grid(), model, l, c, &cfg);
    SpectralField::from_raw(phi.grid().clone(), p.residual_spectral(phi.values()))
}

/// Solve the mean-zero periodic profile equation by Newton-Krylov from `seed`.
pub fn periodic_traveling_wave(model: &Model, l: f64, c: f64, seed: &RealField, cfg: &SolverConfig) -> Result<SolitaryWave> {
    if !matches!(model.family(), Family::IlwBenjamin | Family::Ilw) {
        return Err(Error::invalid(format!(
            "periodic waves need an ILW-type model with a depth delta, got {}",
            model.family()
        )));
    }
    let mean = seed.values().iter().sum::<f64>() / seed.values().len() as f64;
    if mean.abs() > 1e-10 * seed.max_abs().max(1.0) {
        return Err(Error::invalid(format!("seed must have zero mean, mean is {mean:e}")));
    }
    let grid = seed.grid();
    let p = problem(grid, model, l, c, cfg);
    let (phi, rn, history) = p.solve(seed.values(), cfg)?;
    let a = 0.5 * phi.iter().map(|v| v * v).sum::<f64>() / phi.len() as f64;
    Ok(SolitaryWave::assemble(
        RealField::from_raw(grid.clone(), phi),
        c,
        *model,
        rn,
        history,
        Some(PeriodicData {
            l,
            integration_constant: a,
        }),
    ))
}
