//! Fourth-order exponential time differencing (Cox–Matthews ETDRK4) for
//! `û_t = 𝕃û + 𝒩(û)`.
//!
//! The stage weights involve `(e^z - 1)/z` and third-order analogues that
//! cancel catastrophically for small `|z| = |𝕃 dt|`; they are evaluated as
//! the mean of the integrand over `M` points on the circle of radius 1
//! around each `z` (exact for entire functions up to the trapezoidal error).

use std::f64::consts::PI;
use std::sync::Arc;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::model::{self, conserved, ConservedSet, Model};
use crate::spectral::{Dealias, Grid, RealField, SpectralField};

/// Default number of contour points.
pub const CONTOUR_POINTS: usize = 32;
/// Maximum allowed change of any weight when the contour resolution is doubled.
pub const CONTOUR_SELF_CONVERGENCE: f64 = 1e-12;

/// Precomputed per-mode ETDRK4 weights for one time step.
#[derive(Debug, Clone)]
pub struct EtdCoefficients {
    pub dt: f64,
    pub linear: Vec<Complex64>,
    /// `exp(𝕃 dt)`.
    pub e_full: Vec<Complex64>,
    /// `exp(𝕃 dt/2)`.
    pub e_half: Vec<Complex64>,
    /// `dt·(e^{z/2} - 1)/z`, weight of the half-step stages.
    pub q_half: Vec<Complex64>,
    pub f1: Vec<Complex64>,
    pub f2: Vec<Complex64>,
    pub f3: Vec<Complex64>,
    /// Largest relative change of any weight between `M` and `2M` contour points.
    pub contour_defect: f64,
    grid: Arc<Grid>,
    model: Model,
}

/// Below this `|r|` the closed forms lose too many digits and the
/// integrand is summed from its Taylor series instead.
const SERIES_RADIUS: f64 = 0.5;
const SERIES_TERMS: usize = 24;

fn integrand(r: Complex64) -> [Complex64; 4] {
    if r.norm() < SERIES_RADIUS {
        return integrand_series(r);
    }
    let er = r.exp();
    let r3 = r * r * r;
    [
        ((r * 0.5).exp() - 1.0) / r,
        (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3,
        (2.0 + r + er * (r - 2.0)) / r3,
        (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3,
    ]
}

fn integrand_series(r: Complex64) -> [Complex64; 4] {
    // 1/n! for n = 0..SERIES_TERMS + 3
    let mut inv = [1.0f64; SERIES_TERMS + 4];
    for n in 1..inv.len() {
        inv[n] = inv[n - 1] / n as f64;
    }
    let mut out = [Complex64::new(0.0, 0.0); 4];
    let mut rp = Complex64::new(1.0, 0.0);
    for p in 0..SERIES_TERMS {
        let n = p + 3;
        out[0] += rp * (0.5f64.powi(p as i32 + 1) * inv[p + 1]);
        out[1] += rp * (4.0 * inv[n] - 3.0 * inv[n - 1] + inv[n - 2]);
        out[2] += rp * (-2.0 * inv[n] + inv[n - 1]);
        out[3] += rp * (4.0 * inv[n] - inv[n - 1]);
        rp *= r;
    }
    out
}

/// Contour-mean weights `(q, f1, f2, f3)/dt` at `z`.
fn contour_weights(z: Complex64, m: usize) -> [Complex64; 4] {
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for j in 0..m {
        // half-offset nodes keep r away from 0 when |z| = 1 on the imaginary axis
        let theta = PI * (2 * j + 1) as f64 / m as f64;
        let w = integrand(z + Complex64::from_polar(1.0, theta));
        for (a, v) in acc.iter_mut().zip(w) {
            *a += v;
        }
    }
    let inv = 1.0 / m as f64;
    acc.map(|a| a * inv)
}

/// Weights with the default contour (`M = 32`).
pub fn precompute_coefficients(model: &Model, grid: &Arc<Grid>, dt: f64) -> Result<EtdCoefficients> {
    precompute_with(model, grid, dt, CONTOUR_POINTS, ExecPolicy::default())
}

pub fn precompute_with(
    model: &Model,
    grid: &Arc<Grid>,
    dt: f64,
    contour_points: usize,
    exec: ExecPolicy,
) -> Result<EtdCoefficients> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    if contour_points < 4 || !contour_points.is_multiple_of(4) {
        return Err(Error::invalid("contour point count must be a positive multiple of 4"));
    }
    let n = grid.n_modes();
    let ny = grid.nyquist_index();
    let ks = grid.wavenumbers();
    let linear: Vec<Complex64> = (0..n)
        .map(|j| if j == ny { Complex64::new(0.0, 0.0) } else { model.linear_multiplier(ks[j]) })
        .collect();

    let weights = exec.collect_indexed(n, |j| contour_weights(linear[j] * dt, contour_points));
    let check = exec.collect_indexed(n, |j| contour_weights(linear[j] * dt, 2 * contour_points));
    let contour_defect = weights
        .iter()
        .zip(&check)
        .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm() / y.norm().max(1e-300)))
        .fold(0.0, f64::max);
    if contour_defect > CONTOUR_SELF_CONVERGENCE {
        warn!("ETD contour weights not converged: doubling M changes them by {contour_defect:e}");
    }

    let pick = |i: usize| weights.iter().map(|w| w[i] * dt).collect::<Vec<_>>();
    Ok(EtdCoefficients {
        dt,
        e_full: linear.iter().map(|l| (l * dt).exp()).collect(),
        e_half: linear.iter().map(|l| (l * (0.5 * dt)).exp()).collect(),
        q_half: pick(0),
        f1: pick(1),
        f2: pick(2),
        f3: pick(3),
        contour_defect,
        linear,
        grid: grid.clone(),
        model: *model,
    })
}

impl EtdCoefficients {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn model(&self) -> &Model {
        &self.model
    }
}

/// ETDRK4 stepper with reusable work buffers.
pub struct Stepper {
    coeffs: EtdCoefficients,
    dealias: Dealias,
    exec: ExecPolicy,
    nonlinear: bool,
    nv: Vec<Complex64>,
    a: Vec<Complex64>,
    na: Vec<Complex64>,
    b: Vec<Complex64>,
    nb: Vec<Complex64>,
    c: Vec<Complex64>,
    nc: Vec<Complex64>,
}

impl Stepper {
    pub fn new(coeffs: EtdCoefficients, dealias: Dealias, exec: ExecPolicy) -> Self {
        let n = coeffs.linear.len();
        let z = vec![Complex64::new(0.0, 0.0); n];
        Stepper {
            coeffs,
            dealias,
            exec,
            nonlinear: true,
            nv: z.clone(),
            a: z.clone(),
            na: z.clone(),
            b: z.clone(),
            nb: z.clone(),
            c: z.clone(),
            nc: z,
        }
    }

    /// Same scheme with `𝒩 ≡ 0`; one step multiplies by `exp(𝕃 dt)`.
    pub fn linear_only(coeffs: EtdCoefficients) -> Self {
        let mut s = Stepper::new(coeffs, Dealias::Off, ExecPolicy::Sequential);
        s.nonlinear = false;
        s
    }

    pub fn coefficients(&self) -> &EtdCoefficients {
        &self.coeffs
    }

    fn eval_n(&self, src: &[Complex64], dst: &mut [Complex64]) {
        dst.copy_from_slice(src);
        if self.nonlinear {
            model::nonlinear_in_place(&self.coeffs.grid, dst, self.dealias, self.exec);
        } else {
            dst.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        }
    }

    /// Advance `v` by one step in place.
    pub fn step_in_place(&mut self, v: &mut [Complex64]) {
        let ex = self.exec;
        let k = &self.coeffs;
        let mut nv = std::mem::take(&mut self.nv);
        let mut a = std::mem::take(&mut self.a);
        let mut na = std::mem::take(&mut self.na);
        let mut b = std::mem::take(&mut self.b);
        let mut nb = std::mem::take(&mut self.nb);
        let mut c = std::mem::take(&mut self.c);
        let mut nc = std::mem::take(&mut self.nc);

        self.eval_n(v, &mut nv);
        {
            let vv: &[Complex64] = v;
            ex.for_each_indexed(&mut a, |j, x| *x = k.e_half[j] * vv[j] + k.q_half[j] * nv[j]);
        }
        self.eval_n(&a, &mut na);
        {
            let vv: &[Complex64] = v;
            ex.for_each_indexed(&mut b, |j, x| *x = k.e_half[j] * vv[j] + k.q_half[j] * na[j]);
        }
        self.eval_n(&b, &mut nb);
        ex.for_each_indexed(&mut c, |j, x| *x = k.e_half[j] * a[j] + k.q_half[j] * (2.0 * nb[j] - nv[j]));
        self.eval_n(&c, &mut nc);
        ex.for_each_indexed(v, |j, x| {
            *x = k.e_full[j] * *x + nv[j] * k.f1[j] + 2.0 * (na[j] + nb[j]) * k.f2[j] + nc[j] * k.f3[j];
        });

        self.nv = nv;
        self.a = a;
        self.na = na;
        self.b = b;
        self.nb = nb;
        self.c = c;
        self.nc = nc;
    }
}

/// One ETDRK4 step. Fails if the result is not finite.
pub fn step(u_hat: &SpectralField, coeffs: &EtdCoefficients) -> Result<SpectralField> {
    if u_hat.grid() != coeffs.grid() {
        return Err(Error::GridMismatch("field and coefficients use different grids".into()));
    }
    let mut stepper = Stepper::new(coeffs.clone(), Dealias::Off, ExecPolicy::Sequential);
    let mut v = u_hat.coeffs().to_vec();
    stepper.step_in_place(&mut v);
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::BlowUp {
            time: coeffs.dt,
            reason: "non-finite Fourier coefficients".into(),
            trajectory: Box::new(Trajectory::empty(coeffs.model, coeffs.grid.clone(), coeffs.dt)),
        });
    }
    Ok(SpectralField::from_raw(u_hat.grid().clone(), v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveConfig {
    pub t_end: f64,
    pub n_steps: usize,
    pub snapshot_stride: usize,
    pub dealias: Dealias,
    /// `‖u‖_∞` above this bound counts as blow-up.
    pub blowup_bound: f64,
    pub contour_points: usize,
    pub exec: ExecPolicy,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            t_end: 1.0,
            n_steps: 1000,
            snapshot_stride: 100,
            dealias: Dealias::Off,
            blowup_bound: 1e6,
            contour_points: CONTOUR_POINTS,
            exec: ExecPolicy::default(),
        }
    }
}

/// Per-step diagnostic series; entry `i` belongs to `times[i]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub linf: Vec<f64>,
    pub energy_rel_drift: Vec<f64>,
    pub mass_rel_drift: Vec<f64>,
    pub spectral_tail: Vec<f64>,
}

impl Series {
    pub fn max_energy_drift(&self) -> f64 {
        self.energy_rel_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_mass_drift(&self) -> f64 {
        self.mass_rel_drift.iter().copied().fold(0.0, f64::max)
    }
}

/// Time-evolution record.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub model: Model,
    pub grid: Arc<Grid>,
    pub dt: f64,
    pub times: Vec<f64>,
    pub snapshots: Vec<(f64, RealField)>,
    pub series: Series,
    pub initial: Option<ConservedSet>,
    pub final_state: Option<RealField>,
}

impl Trajectory {
    fn empty(model: Model, grid: Arc<Grid>, dt: f64) -> Trajectory {
        Trajectory {
            model,
            grid,
            dt,
            times: Vec::new(),
            snapshots: Vec::new(),
            series: Series::default(),
            initial: None,
            final_state: None,
        }
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}

fn rel(x: f64, x0: f64, scale: f64) -> f64 {
    (x - x0).abs() / scale
}

struct Monitor {
    model: Model,
    e0: f64,
    m0: f64,
    e_scale: f64,
    m_scale: f64,
}

impl Monitor {
    fn new(model: &Model, u0: &RealField) -> (Monitor, ConservedSet) {
        let c0 = conserved(model, u0);
        let l1 = u0.grid().spacing() * u0.values().iter().map(|v| v.abs()).sum::<f64>();
        let e_scale = if c0.energy != 0.0 { c0.energy.abs() } else { 1.0 };
        let m_scale = if c0.mass.abs() > 1e-12 * l1 { c0.mass.abs() } else { l1.max(f64::MIN_POSITIVE) };
        (
            Monitor {
                model: *model,
                e0: c0.energy,
                m0: c0.mass,
                e_scale,
                m_scale,
            },
            c0,
        )
    }

    fn record(&self, series: &mut Series, u: &RealField, uh: &SpectralField) {
        series.linf.push(u.max_abs());
        series.energy_rel_drift.push(rel(model::energy(&self.model, u), self.e0, self.e_scale));
        series.mass_rel_drift.push(rel(model::mass(u), self.m0, self.m_scale));
        series.spectral_tail.push(uh.spectral_tail());
    }
}

/// Evolve `u0` to `t_end` in `n_steps` fixed steps, storing every
/// `snapshot_stride`-th state (plus the first and last).
pub fn evolve(u0: &RealField, model: &Model, t_end: f64, n_steps: usize, snapshot_stride: usize) -> Result<Trajectory> {
    evolve_with(
        u0,
        model,
        &EvolveConfig {
            t_end,
            n_steps,
            snapshot_stride,
            ..Default::default()
        },
    )
}

pub fn evolve_with(u0: &RealField, model: &Model, cfg: &EvolveConfig) -> Result<Trajectory> {
    if cfg.n_steps == 0 {
        return Err(Error::invalid("n_steps must be at least 1"));
    }
    if !(cfg.t_end.is_finite() && cfg.t_end > 0.0) {
        return Err(Error::invalid(format!("t_end must be positive, got {}", cfg.t_end)));
    }
    let stride = cfg.snapshot_stride.max(1);
    let grid = u0.grid().clone();
    let dt = cfg.t_end / cfg.n_steps as f64;
    let coeffs = precompute_with(model, &grid, dt, cfg.contour_points, cfg.exec)?;
    let mut stepper = Stepper::new(coeffs, cfg.dealias, cfg.exec);

    let (monitor, c0) = Monitor::new(model, u0);
    let mut traj = Trajectory::empty(*model, grid.clone(), dt);
    traj.initial = Some(c0);
    let mut vh = u0.forward();
    traj.times.push(0.0);
    monitor.record(&mut traj.series, u0, &vh);
    traj.snapshots.push((0.0, u0.clone()));

    for n in 1..=cfg.n_steps {
        stepper.step_in_place(vh.coeffs_mut());
        let t = n as f64 * dt;
        let u = vh.inverse();
        let linf = u.max_abs();
        if !linf.is_finite() || linf > cfg.blowup_bound {
            let reason = if linf.is_finite() {
                format!("sup norm {linf:e} exceeded {:e}", cfg.blowup_bound)
            } else {
                "non-finite solution".to_string()
            };
            traj.final_state = traj.snapshots.last().map(|s| s.1.clone());
            return Err(Error::BlowUp {
                time: t,
                reason,
                trajectory: Box::new(traj),
            });
        }
        traj.times.push(t);
        monitor.record(&mut traj.series, &u, &vh);
        if n % stride == 0 || n == cfg.n_steps {
            traj.snapshots.push((t, u.clone()));
        }
        if n == cfg.n_steps {
            traj.final_state = Some(u);
        }
    }
    Ok(traj)
}
