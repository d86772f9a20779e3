//! Traveling waves `u(x, t) = Q(x - ct)`.
//!
//! Integrating the evolution equation once gives the profile equation
//! `-cQ + Q²/2 - α N Q - β Q_xx = 0`, solved in Fourier space as
//!
//! ```text
//! ℱ(Q̂) = ℒ Q̂ + ½ FT(Q²) = 0,    ℒ(k) = βk² - α n(k) - c.
//! ```
//!
//! [`newton_krylov_solve`] runs Newton's method on ℱ with GMRES for the
//! linear solves; the Jacobian is only ever applied to vectors.
//! [`trace_branch`] continues a converged wave in one parameter.

mod branch;
pub mod gmres;
mod newton;
mod periodic;
mod tail;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{energy, pohozaev_residuals, Family, Model, Pohozaev};
use crate::spectral::{Grid, RealField, SpectralField};

pub use branch::{far_field_ratio, trace_branch, Branch, BranchPoint, StepControl, Termination};
pub use gmres::{GmresConfig, GmresOutcome};
pub use newton::{jacobian_action, newton_krylov_solve, residual, residual_with, SolverConfig};
pub use periodic::{periodic_traveling_wave, PeriodicData};
pub use tail::{tail_classify, tail_classify_profile, TailFit, TailKind};

/// A converged traveling-wave profile with its diagnostics.
#[derive(Debug, Clone)]
pub struct SolitaryWave {
    pub profile: RealField,
    pub velocity: f64,
    pub model: Model,
    /// `‖ℱ(Q̂)‖_∞` of the stored profile.
    pub residual_norm: f64,
    pub newton_iterations: usize,
    pub residual_history: Vec<f64>,
    /// Largest `|Q̂_k|` over the top decile of |k|.
    pub spectral_tail: f64,
    /// Largest `|Q|` over the outermost 1% of the domain.
    pub boundary_tail: f64,
    /// Only for families with homogeneous nonlocal symbols.
    pub pohozaev: Option<Pohozaev>,
    pub energy: f64,
    /// Set for periodic waves with an integration constant.
    pub periodic: Option<PeriodicData>,
}

impl SolitaryWave {
    pub(crate) fn assemble(
        profile: RealField,
        velocity: f64,
        model: Model,
        residual_norm: f64,
        residual_history: Vec<f64>,
        periodic: Option<PeriodicData>,
    ) -> SolitaryWave {
        let spectral_tail = profile.forward().spectral_tail();
        let boundary_tail = profile.boundary_tail();
        let pohozaev = if periodic.is_none() {
            pohozaev_residuals(&model, &profile, velocity).ok()
        } else {
            None
        };
        let energy = energy(&model, &profile);
        SolitaryWave {
            newton_iterations: residual_history.len().saturating_sub(1),
            profile,
            velocity,
            model,
            residual_norm,
            residual_history,
            spectral_tail,
            boundary_tail,
            pohozaev,
            energy,
            periodic,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.profile.grid()
    }

    /// Signed value of largest magnitude.
    pub fn peak(&self) -> f64 {
        self.profile.peak()
    }

    /// `‖Q‖²_{L²}`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.profile.grid().spacing() * self.profile.values().iter().map(|v| v * v).sum::<f64>()
    }

    /// `|r4| / ‖Q‖²`, the relative violation of the Fourier Pohozaev identity.
    pub fn pohozaev_relative(&self) -> Option<f64> {
        self.pohozaev.map(|p| p.r4.abs() / self.l2_norm_sq())
    }

    /// Recompute `‖ℱ(Q̂)‖_∞` from the stored profile.
    pub fn recompute_residual(&self) -> f64 {
        match &self.periodic {
            None => residual(&self.profile.forward(), &self.model, self.velocity).max_abs(),
            Some(p) => periodic::periodic_residual(&self.profile, &self.model, p.l, self.velocity).max_abs(),
        }
    }
}

/// KdV soliton `Q(x) = 3c sech²((x/2)·√(-c/β))`, an exact solution of the
/// profile equation with `α = 0`.
pub fn kdv_soliton(c: f64, beta: f64, grid: &Arc<Grid>) -> Result<RealField> {
    if !(c < 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("KdV soliton needs c < 0, got {c}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("KdV soliton needs beta > 0, got {beta}")));
    }
    let a = 0.5 * (-c / beta).sqrt();
    Ok(RealField::from_fn(grid.clone(), |x| {
        let s = 1.0 / (a * x).cosh();
        3.0 * c * s * s
    }))
}

/// BO soliton `Q(x) = 4c/(1 + c²x²)`, exact for `α = 1`, `β = 0` on the line.
pub fn bo_soliton(c: f64, grid: &Arc<Grid>) -> Result<RealField> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("BO soliton needs c > 0, got {c}")));
    }
    Ok(RealField::from_fn(grid.clone(), |x| 4.0 * c / (1.0 + c * c * x * x)))
}

/// Classification of a velocity against the known existence results for
/// Benjamin solitary waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Existence {
    /// `c < -α²/(4β)`.
    KnownExists,
    /// `-α²/(4β) ≤ c ≤ α²/(5β)`: neither existence nor nonexistence is proven.
    OpenWindow,
    /// `c > α²/(5β)`: excluded by the Pohozaev identity.
    Nonexistent,
    /// Not a Benjamin model with `α, β > 0`.
    NotApplicable,
}

pub fn existence_guard(model: &Model, c: f64) -> Existence {
    let (a, b) = (model.alpha(), model.beta());
    if model.family() != Family::Benjamin || a <= 0.0 || b <= 0.0 {
        return Existence::NotApplicable;
    }
    if c < -a * a / (4.0 * b) {
        Existence::KnownExists
    } else if c > a * a / (5.0 * b) {
        Existence::Nonexistent
    } else {
        Existence::OpenWindow
    }
}

/// Upper velocity bound `α²/(5β)` above which no Benjamin solitary wave exists.
pub fn nonexistence_threshold(model: &Model) -> f64 {
    model.alpha() * model.alpha() / (5.0 * model.beta())
}

/// Evaluate ℱ for a profile given in physical space.
pub fn residual_of_profile(q: &RealField, model: &Model, c: f64) -> SpectralField {
    residual(&q.forward(), model, c)
}
