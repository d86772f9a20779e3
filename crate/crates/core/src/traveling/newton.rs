use std::sync::Arc;

use log::{debug, warn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gmres::{gmres, GmresConfig};
use super::{existence_guard, nonexistence_threshold, Existence, SolitaryWave};
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::model::Model;
use crate::spectral::{Dealias, Grid, RealField, SpectralField};

/// Newton-Krylov settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Target for `‖ℱ(Q̂)‖_∞`.
    pub tol: f64,
    pub max_iter: usize,
    pub gmres: GmresConfig,
    /// Diagonal Fourier preconditioner `1/ℒ(k)` for the GMRES solves.
    pub precondition: bool,
    /// Backtrack along the Newton direction until the residual L² norm decreases.
    pub line_search: bool,
    pub dealias: Dealias,
    /// Solve even inside the proven nonexistence window.
    pub force: bool,
    /// Newton gives up once the residual exceeds this bound.
    pub divergence_bound: f64,
    pub exec: ExecPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            max_iter: 50,
            gmres: GmresConfig::default(),
            precondition: true,
            line_search: false,
            dealias: Dealias::Off,
            force: false,
            divergence_bound: 1e12,
            exec: ExecPolicy::default(),
        }
    }
}

/// `ℱ(Q̂)_k = ℒ(k) Q̂_k + ½ FT(Q²)_k` with `ℒ(k) = βk² - α n(k) - c`.
pub fn residual(qhat: &SpectralField, model: &Model, c: f64) -> SpectralField {
    residual_with(qhat, model, c, Dealias::Off)
}

pub fn residual_with(qhat: &SpectralField, model: &Model, c: f64, dealias: Dealias) -> SpectralField {
    let grid = qhat.grid();
    let problem = ProfileProblem::solitary(grid, model, c, dealias, ExecPolicy::Sequential);
    let q = grid.inverse_real(qhat.coeffs());
    SpectralField::from_raw(grid.clone(), problem.residual_spectral(&q))
}

/// A profile equation `s(k) Q̂_k + ½ FT(Q²)_k = 0` with a real even symbol
/// `s`, optionally with the `k = 0` row replaced by `mean(Q) = 0`.
pub(crate) struct ProfileProblem<'a> {
    pub grid: &'a Arc<Grid>,
    pub symbol: Vec<f64>,
    pub mean_constraint: bool,
    pub dealias: Dealias,
    pub exec: ExecPolicy,
}

const PRECOND_FLOOR: f64 = 1e-2;

impl<'a> ProfileProblem<'a> {
    pub fn solitary(grid: &'a Arc<Grid>, model: &Model, c: f64, dealias: Dealias, exec: ExecPolicy) -> Self {
        let symbol = grid.wavenumbers().iter().map(|&k| model.traveling_symbol(k, c)).collect();
        ProfileProblem {
            grid,
            symbol,
            mean_constraint: false,
            dealias,
            exec,
        }
    }

    pub fn residual_spectral(&self, q: &[f64]) -> Vec<Complex64> {
        let mut sq: Vec<Complex64> = q.iter().map(|&v| Complex64::new(0.5 * v * v, 0.0)).collect();
        self.grid.forward_in_place(&mut sq);
        self.dealias.apply(self.grid, &mut sq);
        let mut qh = self.grid.forward_real(q);
        let sym = &self.symbol;
        self.exec.for_each_indexed(&mut qh, |j, c| *c = *c * sym[j] + sq[j]);
        if self.mean_constraint {
            qh[0] = Complex64::new(q.iter().sum::<f64>() / q.len() as f64, 0.0);
        }
        qh
    }

    fn jacobian_apply(&self, q: &[f64], h: &[f64], out: &mut [f64]) {
        let mut hh = self.grid.forward_real(h);
        let h0 = hh[0].re;
        let sym = &self.symbol;
        self.exec.for_each_indexed(&mut hh, |j, c| *c *= sym[j]);
        let lin = self.grid.inverse_real(&hh);
        if matches!(self.dealias, Dealias::Off) {
            for i in 0..out.len() {
                out[i] = lin[i] + q[i] * h[i];
            }
        } else {
            let mut qhp: Vec<Complex64> = q.iter().zip(h).map(|(a, b)| Complex64::new(a * b, 0.0)).collect();
            self.grid.forward_in_place(&mut qhp);
            self.dealias.apply(self.grid, &mut qhp);
            let prod = self.grid.inverse_real(&qhp);
            for i in 0..out.len() {
                out[i] = lin[i] + prod[i];
            }
        }
        if self.mean_constraint {
            let mean_qh = q.iter().zip(h).map(|(a, b)| a * b).sum::<f64>() / q.len() as f64;
            let shift = h0 - self.symbol[0] * h0 - mean_qh;
            out.iter_mut().for_each(|o| *o += shift);
        }
    }

    fn precondition(&self, v: &[f64], out: &mut [f64]) {
        let mut vh = self.grid.forward_real(v);
        let sym = &self.symbol;
        let constrained = self.mean_constraint;
        self.exec.for_each_indexed(&mut vh, |j, c| {
            let s = sym[j];
            let p = if constrained && j == 0 {
                1.0
            } else if s.abs() >= PRECOND_FLOOR {
                1.0 / s
            } else {
                1.0 / PRECOND_FLOOR.copysign(s)
            };
            *c *= p;
        });
        out.copy_from_slice(&self.grid.inverse_real(&vh));
    }

    /// Newton iteration from `seed`. Returns the final iterate, its residual
    /// norm and the residual history (one entry per evaluated iterate).
    pub fn solve(&self, seed: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, f64, Vec<f64>)> {
        let n = seed.len();
        let mut q = seed.to_vec();
        let mut history = Vec::new();
        let mut delta = vec![0.0; n];
        for it in 0..=cfg.max_iter {
            let f = self.residual_spectral(&q);
            let rn = f.iter().fold(0.0f64, |m, c| m.max(c.norm()));
            history.push(rn);
            debug!("newton iteration {it}: residual {rn:e}");
            let failure = if !rn.is_finite() || q.iter().any(|v| !v.is_finite()) {
                Some("non-finite residual")
            } else if rn > cfg.divergence_bound {
                Some("residual exceeded divergence bound")
            } else if rn <= cfg.tol {
                return Ok((q, rn, history));
            } else if it == cfg.max_iter {
                Some("maximum number of iterations reached")
            } else {
                None
            };
            if let Some(reason) = failure {
                return Err(Error::NewtonDiverged {
                    iterations: it,
                    last_residual: rn,
                    reason: reason.to_string(),
                    residual_history: history,
                    last_iterate: Box::new(RealField::from_raw(self.grid.clone(), q)),
                });
            }
            let rhs: Vec<f64> = self.grid.inverse_real(&f).into_iter().map(|v| -v).collect();
            delta.iter_mut().for_each(|d| *d = 0.0);
            let q_ref = &q;
            let outcome = if cfg.precondition {
                gmres(
                    |h: &[f64], out: &mut [f64]| self.jacobian_apply(q_ref, h, out),
                    |v: &[f64], out: &mut [f64]| self.precondition(v, out),
                    &rhs,
                    &mut delta,
                    &cfg.gmres,
                )
            } else {
                gmres(
                    |h: &[f64], out: &mut [f64]| self.jacobian_apply(q_ref, h, out),
                    |v: &[f64], out: &mut [f64]| out.copy_from_slice(v),
                    &rhs,
                    &mut delta,
                    &cfg.gmres,
                )
            };
            debug!("  gmres: {outcome:?}");
            let lambda = if cfg.line_search { self.backtrack(&q, &delta, &f) } else { 1.0 };
            for (qi, di) in q.iter_mut().zip(&delta) {
                *qi += lambda * di;
            }
        }
        unreachable!("loop returns on the last iteration")
    }

    /// Armijo backtracking on `‖ℱ‖₂`; falls back to the smallest trial step.
    fn backtrack(&self, q: &[f64], delta: &[f64], f: &[Complex64]) -> f64 {
        let norm = |r: &[Complex64]| r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let f0 = norm(f);
        let mut lambda = 1.0;
        let mut trial = vec![0.0; q.len()];
        for _ in 0..10 {
            for ((t, qi), di) in trial.iter_mut().zip(q).zip(delta) {
                *t = qi + lambda * di;
            }
            let ft = norm(&self.residual_spectral(&trial));
            if ft.is_finite() && ft <= (1.0 - 1e-4 * lambda) * f0 {
                return lambda;
            }
            lambda *= 0.5;
        }
        debug!("  line search found no decrease; taking step {lambda}");
        lambda
    }

    pub fn jacobian(&self, q: &[f64], h: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; q.len()];
        self.jacobian_apply(q, h, &mut out);
        out
    }
}

/// Solve `ℱ(Q̂) = 0` by Newton's method from `seed`, with matrix-free
/// Jacobian actions `Jac(ℱ)·ĥ = ℒĥ + FT(Q·h)` inside GMRES.
///
/// For Benjamin models the velocity is checked against the existence
/// windows first: the proven nonexistence range is refused unless
/// `cfg.force` is set.
pub fn newton_krylov_solve(seed: &RealField, model: &Model, c: f64, cfg: &SolverConfig) -> Result<SolitaryWave> {
    if !(cfg.tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {}", cfg.tol)));
    }
    match existence_guard(model, c) {
        Existence::Nonexistent if !cfg.force => {
            return Err(Error::NonexistenceWindow {
                c,
                threshold: nonexistence_threshold(model),
            });
        }
        Existence::Nonexistent => warn!("forcing a solve at c = {c} inside the nonexistence window"),
        Existence::OpenWindow => warn!("c = {c} lies in the open existence window"),
        _ => {}
    }
    if c == 0.0 {
        warn!("stationary wave requested (c = 0); the linear symbol vanishes at k = 0");
    }
    let grid = seed.grid();
    let problem = ProfileProblem::solitary(grid, model, c, cfg.dealias, cfg.exec);
    let (q, rn, history) = problem.solve(seed.values(), cfg)?;
    Ok(SolitaryWave::assemble(
        RealField::from_raw(grid.clone(), q),
        c,
        *model,
        rn,
        history,
        None,
    ))
}

/// Matrix-free Jacobian action in physical space, exposed for consistency checks.
pub fn jacobian_action(q: &RealField, model: &Model, c: f64, h: &RealField) -> Result<RealField> {
    if q.grid() != h.grid() {
        return Err(Error::GridMismatch("profile and direction live on different grids".into()));
    }
    let problem = ProfileProblem::solitary(q.grid(), model, c, Dealias::Off, ExecPolicy::Sequential);
    Ok(RealField::from_raw(q.grid().clone(), problem.jacobian(q.values(), h.values())))
}
