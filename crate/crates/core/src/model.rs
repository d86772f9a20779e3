//! Equation families and their Fourier symbols.
//!
//! Every family is written as
//!
//! ```text
//! u_t + u u_x - α (N u)_x - β u_xxx = 0
//! ```
//!
//! where `N` is a nonnegative even Fourier multiplier `n(k)`:
//! `|k|` for Benjamin/BO (`N = H∂ₓ`), `k coth(δk) - 1/δ` for ILW and
//! ILW-Benjamin, the sum of two such terms for the two-depth variant, and
//! `0` for KdV. In Fourier variables `û_t = 𝕃û + 𝒩(û)` with
//! `𝕃(k) = ik(α n(k) - βk²)` and `𝒩(û) = -(ik/2)·FT(u²)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::spectral::{ilw_symbol, Dealias, Grid, RealField, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Benjamin,
    #[serde(rename = "ilw_benjamin")]
    IlwBenjamin,
    #[serde(rename = "mod_ilw_benjamin")]
    ModIlwBenjamin,
    Kdv,
    Bo,
    Ilw,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Benjamin => "benjamin",
            Family::IlwBenjamin => "ilw_benjamin",
            Family::ModIlwBenjamin => "mod_ilw_benjamin",
            Family::Kdv => "kdv",
            Family::Bo => "bo",
            Family::Ilw => "ilw",
        };
        f.write_str(s)
    }
}

/// Continuation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Alpha,
    Beta,
    C,
    Delta,
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parameter::Alpha => "alpha",
            Parameter::Beta => "beta",
            Parameter::C => "c",
            Parameter::Delta => "delta",
        })
    }
}

/// An equation of the Benjamin family with its coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    family: Family,
    alpha: f64,
    beta: f64,
    #[serde(default)]
    delta: f64,
    #[serde(default)]
    delta1: f64,
    #[serde(default)]
    delta2: f64,
}

impl Model {
    /// Benjamin equation. `alpha = 0` is allowed so that continuation can
    /// start from the KdV limit.
    pub fn benjamin(alpha: f64, beta: f64) -> Result<Model> {
        Model::raw(Family::Benjamin, alpha, beta, 0.0, 0.0, 0.0).validated()
    }

    pub fn ilw_benjamin(alpha: f64, beta: f64, delta: f64) -> Result<Model> {
        Model::raw(Family::IlwBenjamin, alpha, beta, delta, 0.0, 0.0).validated()
    }

    pub fn mod_ilw_benjamin(alpha: f64, beta: f64, delta1: f64, delta2: f64) -> Result<Model> {
        Model::raw(Family::ModIlwBenjamin, alpha, beta, 0.0, delta1, delta2).validated()
    }

    pub fn kdv(beta: f64) -> Result<Model> {
        Model::raw(Family::Kdv, 0.0, beta, 0.0, 0.0, 0.0).validated()
    }

    pub fn bo(alpha: f64) -> Result<Model> {
        Model::raw(Family::Bo, alpha, 0.0, 0.0, 0.0, 0.0).validated()
    }

    pub fn ilw(alpha: f64, delta: f64) -> Result<Model> {
        Model::raw(Family::Ilw, alpha, 0.0, delta, 0.0, 0.0).validated()
    }

    /// Build from explicit fields (as read from a config file) and validate.
    pub fn from_parts(
        family: Family,
        alpha: f64,
        beta: f64,
        delta: f64,
        delta1: f64,
        delta2: f64,
    ) -> Result<Model> {
        Model::raw(family, alpha, beta, delta, delta1, delta2).validated()
    }

    fn raw(family: Family, alpha: f64, beta: f64, delta: f64, delta1: f64, delta2: f64) -> Model {
        Model {
            family,
            alpha,
            beta,
            delta,
            delta1,
            delta2,
        }
    }

    pub fn validated(self) -> Result<Model> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !finite_nonneg(self.alpha) || !finite_nonneg(self.beta) {
            return Err(Error::invalid(format!(
                "alpha and beta must be finite and nonnegative (alpha={}, beta={})",
                self.alpha, self.beta
            )));
        }
        let ok = match self.family {
            Family::Benjamin => self.beta > 0.0,
            Family::Kdv => self.alpha == 0.0 && self.beta > 0.0,
            Family::Bo => self.beta == 0.0 && self.alpha > 0.0,
            Family::Ilw => self.beta == 0.0 && self.alpha > 0.0 && positive(self.delta),
            Family::IlwBenjamin => self.beta > 0.0 && positive(self.delta),
            Family::ModIlwBenjamin => {
                self.beta > 0.0 && positive(self.delta1) && positive(self.delta2)
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::invalid(format!("inconsistent parameters for family {}: {self:?}", self.family)))
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn delta1(&self) -> f64 {
        self.delta1
    }
    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    /// Copy with one coefficient replaced. `Parameter::C` is not a model
    /// coefficient and is rejected.
    pub fn with_parameter(&self, p: Parameter, value: f64) -> Result<Model> {
        let mut m = *self;
        match p {
            Parameter::Alpha => m.alpha = value,
            Parameter::Beta => m.beta = value,
            Parameter::Delta => match m.family {
                Family::IlwBenjamin | Family::Ilw => m.delta = value,
                _ => return Err(Error::invalid(format!("family {} has no single delta", m.family))),
            },
            Parameter::C => return Err(Error::invalid("c is not a model coefficient")),
        }
        m.validated()
    }

    pub fn parameter(&self, p: Parameter) -> Option<f64> {
        match p {
            Parameter::Alpha => Some(self.alpha),
            Parameter::Beta => Some(self.beta),
            Parameter::Delta => Some(self.delta),
            Parameter::C => None,
        }
    }

    /// The even nonlocal symbol `n(k)`.
    pub fn nonlocal_symbol(&self, k: f64) -> f64 {
        match self.family {
            Family::Benjamin | Family::Bo => k.abs(),
            Family::IlwBenjamin | Family::Ilw => ilw_symbol(k, self.delta),
            Family::ModIlwBenjamin => ilw_symbol(k, self.delta1) + ilw_symbol(k, self.delta2),
            Family::Kdv => 0.0,
        }
    }

    /// `𝕃(k) = ik(α n(k) - βk²)`: purely imaginary, odd, zero at `k = 0`.
    pub fn linear_multiplier(&self, k: f64) -> Complex64 {
        Complex64::new(0.0, k * (self.alpha * self.nonlocal_symbol(k) - self.beta * k * k))
    }

    /// Phase velocity `c(k) = -𝕃(k)/(ik) = βk² - α n(k)`; zero at `k = 0`.
    pub fn phase_velocity(&self, k: f64) -> f64 {
        self.beta * k * k - self.alpha * self.nonlocal_symbol(k)
    }

    /// Symbol of the linear part of the traveling-wave equation,
    /// `ℒ(k) = βk² - α n(k) - c`.
    pub fn traveling_symbol(&self, k: f64, c: f64) -> f64 {
        self.phase_velocity(k) - c
    }

    /// Whether solitary waves of this family decay algebraically (non-smooth
    /// symbol at `k = 0`) rather than exponentially.
    pub fn has_algebraic_tails(&self) -> bool {
        matches!(self.family, Family::Benjamin | Family::Bo) && self.alpha > 0.0
    }
}

/// `𝒩(û) = -(ik/2)·FT(u²)`, the Fourier image of `-u u_x`.
pub fn nonlinear_term(f: &SpectralField) -> SpectralField {
    nonlinear_term_with(f, Dealias::Off, ExecPolicy::default())
}

pub fn nonlinear_term_with(f: &SpectralField, dealias: Dealias, exec: ExecPolicy) -> SpectralField {
    let grid = f.grid();
    let mut buf = f.coeffs().to_vec();
    nonlinear_in_place(grid, &mut buf, dealias, exec);
    SpectralField::from_raw(grid.clone(), buf)
}

/// In-place `𝒩` on a coefficient buffer.
pub(crate) fn nonlinear_in_place(grid: &Grid, buf: &mut [Complex64], dealias: Dealias, exec: ExecPolicy) {
    grid.inverse_in_place(buf);
    exec.for_each_indexed(buf, |_, c| *c = Complex64::new(c.re * c.re, 0.0));
    grid.forward_in_place(buf);
    dealias.apply(grid, buf);
    let ks = grid.wavenumbers();
    let ny = grid.nyquist_index();
    exec.for_each_indexed(buf, |j, c| {
        *c = if j == ny {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -0.5 * ks[j]) * *c
        };
    });
}

/// `∫ u dx`.
pub fn mass(u: &RealField) -> f64 {
    u.integral()
}

/// `½ ∫ u² dx`.
pub fn momentum(u: &RealField) -> f64 {
    0.5 * u.grid().spacing() * u.values().iter().map(|v| v * v).sum::<f64>()
}

/// Hamiltonian `∫ (β/2 u_x² - α/2 u N u + u³/6) dx`.
///
/// `u_t = -∂ₓ(δH/δu)` reproduces the evolution equation, and solitary waves
/// are critical points of `H + c·momentum`.
pub fn energy(model: &Model, u: &RealField) -> f64 {
    let grid = u.grid();
    let f = u.forward();
    let quad: f64 = f
        .coeffs()
        .iter()
        .zip(grid.wavenumbers())
        .map(|(c, &k)| (0.5 * model.beta * k * k - 0.5 * model.alpha * model.nonlocal_symbol(k)) * c.norm_sqr())
        .sum();
    let cubic = grid.spacing() * u.values().iter().map(|v| v * v * v).sum::<f64>();
    grid.period() * quad + cubic / 6.0
}

/// The monitored invariants of a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedSet {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

pub fn conserved(model: &Model, u: &RealField) -> ConservedSet {
    ConservedSet {
        mass: mass(u),
        momentum: momentum(u),
        energy: energy(model, u),
    }
}

/// Integral identities satisfied by solitary waves of the Benjamin equation.
///
/// * `r1 = ∫(-c v² + β v_x² - α v|D|v + v³/2)` (multiplying by `v`),
/// * `r2 = ∫(c/2 v² + β/2 v_x² - v³/6)` (multiplying by `x v_x`),
/// * `r4 = ∫(c/2 + 5β/2 ξ² - α|ξ|)|v̂|² dξ`.
///
/// Algebraically `r4 = r1 + 3 r2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pohozaev {
    pub r1: f64,
    pub r2: f64,
    pub r4: f64,
}

pub fn pohozaev_residuals(model: &Model, v: &RealField, c: f64) -> Result<Pohozaev> {
    if !matches!(model.family, Family::Benjamin | Family::Kdv | Family::Bo) {
        return Err(Error::invalid(format!(
            "Pohozaev identities need a homogeneous symbol; family {} unsupported",
            model.family
        )));
    }
    let grid = v.grid();
    let f = v.forward();
    let (alpha, beta) = (model.alpha, model.beta);
    let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
    for (coef, &k) in f.coeffs().iter().zip(grid.wavenumbers()) {
        let p = coef.norm_sqr();
        let ak = k.abs();
        s1 += (-c + beta * k * k - alpha * ak) * p;
        s2 += (0.5 * c + 0.5 * beta * k * k) * p;
        s4 += (0.5 * c + 2.5 * beta * k * k - alpha * ak) * p;
    }
    let cubic = grid.spacing() * v.values().iter().map(|x| x * x * x).sum::<f64>();
    let period = grid.period();
    Ok(Pohozaev {
        r1: period * s1 + 0.5 * cubic,
        r2: period * s2 - cubic / 6.0,
        r4: period * s4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn benjamin_multiplier_value() {
        let m = Model::benjamin(1.0, 1.0).unwrap();
        assert_eq!(m.linear_multiplier(2.0), Complex64::new(0.0, -4.0));
        assert_eq!(m.linear_multiplier(0.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn ilw_benjamin_multiplier_value() {
        let m = Model::ilw_benjamin(1.0, 1.0, 0.1).unwrap();
        // coth(0.1) = 10.033311132253989 (30-digit reference, rounded)
        let expect = 10.033_311_132_253_989 - 10.0 - 1.0;
        assert_relative_eq!(m.linear_multiplier(1.0).im, expect, max_relative = 1e-13);
        assert_eq!(m.linear_multiplier(1.0).re, 0.0);
    }

    #[test]
    fn zero_at_origin_all_families() {
        let models = [
            Model::benjamin(1.0, 1.0).unwrap(),
            Model::ilw_benjamin(2.0, 1.0, 0.5).unwrap(),
            Model::mod_ilw_benjamin(1.0, 1.0, 0.3, 2.0).unwrap(),
            Model::kdv(1.0).unwrap(),
            Model::bo(1.0).unwrap(),
            Model::ilw(1.0, 0.4).unwrap(),
        ];
        for m in models {
            assert_eq!(m.linear_multiplier(0.0).norm(), 0.0);
            assert_eq!(m.phase_velocity(0.0), 0.0);
        }
    }

    #[test]
    fn phase_velocity_split() {
        let m = Model::benjamin(1.0, 0.06).unwrap();
        assert_relative_eq!(m.phase_velocity(10.0), -4.0, max_relative = 1e-14);
        assert_relative_eq!(m.phase_velocity(20.0), 4.0, max_relative = 1e-14);
        let kstar = 1.0 / 0.06;
        assert!(m.phase_velocity(kstar * 0.999) < 0.0);
        assert!(m.phase_velocity(kstar * 1.001) > 0.0);
        assert!(m.phase_velocity(kstar).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(Model::kdv(0.0).is_err());
        assert!(Model::ilw_benjamin(1.0, 1.0, 0.0).is_err());
        assert!(Model::mod_ilw_benjamin(1.0, 1.0, 1.0, -1.0).is_err());
        assert!(Model::benjamin(-1.0, 1.0).is_err());
        assert!(Model::from_parts(Family::Kdv, 1.0, 1.0, 0.0, 0.0, 0.0).is_err());
        let m = Model::benjamin(0.0, 1.0).unwrap();
        assert_eq!(m.with_parameter(Parameter::Alpha, 1.5).unwrap().alpha(), 1.5);
        assert!(m.with_parameter(Parameter::C, 1.0).is_err());
        assert!(m.with_parameter(Parameter::Delta, 1.0).is_err());
    }

    #[test]
    fn bo_limit_of_ilw_symbol() {
        // k coth(δk) -> |k| pointwise; m_δ itself carries the -1/δ shift
        let delta = 1e3;
        let m = Model::ilw(1.0, delta).unwrap();
        for &k in &[0.5, 1.0, -3.0, 10.0] {
            assert!((crate::spectral::tilbert_unchecked(k, delta) - k.abs()).abs() < 1e-6);
            assert!((m.nonlocal_symbol(k) - (k.abs() - 1.0 / delta)).abs() < 1e-12);
        }
    }

    #[test]
    fn nonlinear_of_constant_is_zero() {
        let g = make_grid(32, 1.0).unwrap();
        let u = RealField::from_fn(g, |_| 2.5);
        assert!(nonlinear_term(&u.forward()).max_abs() < 1e-15);
    }

    #[test]
    fn nonlinear_of_cosine() {
        // -∂x(cos²x)/2 = sin(2x)/2
        let g = make_grid(32, 1.0).unwrap();
        let u = RealField::from_fn(g.clone(), f64::cos);
        let n = nonlinear_term(&u.forward());
        assert!(n.hermitian_defect() < 1e-16);
        let phys = n.inverse();
        let expect = RealField::from_fn(g.clone(), |x| 0.5 * (2.0 * x).sin());
        assert!(phys.max_abs_diff(&expect).unwrap() < 1e-14);
        for (j, c) in n.coeffs().iter().enumerate() {
            if g.mode(j).abs() != 2 {
                assert!(c.norm() < 1e-15);
            }
        }
    }

    #[test]
    fn simple_conserved_values() {
        let g = make_grid(64, 1.0).unwrap();
        let z = RealField::zeros(g.clone());
        assert_eq!((mass(&z), momentum(&z)), (0.0, 0.0));
        let u = RealField::from_fn(g, f64::cos);
        assert!(mass(&u).abs() < 1e-14);
        assert_relative_eq!(momentum(&u), PI / 2.0, max_relative = 1e-14);

        let g = make_grid(1024, 50.0).unwrap();
        let u = RealField::from_fn(g, |x| 5.0 * (-x * x).exp());
        assert_relative_eq!(mass(&u), 5.0 * PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn energy_is_translation_invariant() {
        let m = Model::benjamin(1.3, 0.7).unwrap();
        let g = make_grid(256, 8.0).unwrap();
        let u = RealField::from_fn(g, |x| (-(x - 1.0) * (x - 1.0) / 3.0).exp() - 0.4 * (-(x + 2.0).powi(2)).exp());
        let e0 = energy(&m, &u);
        for &a in &[0.3, -5.0, 17.1] {
            assert_relative_eq!(energy(&m, &u.translate(a)), e0, max_relative = 1e-12);
        }
        assert_eq!(energy(&m, &RealField::zeros(u.grid().clone())), 0.0);
    }

    #[test]
    fn pohozaev_combination_identity() {
        let m = Model::benjamin(0.8, 1.7).unwrap();
        let g = make_grid(128, 4.0).unwrap();
        let v = RealField::from_fn(g, |x| (x / 4.0).sin() * (-x * x / 10.0).exp() + 0.2);
        for &c in &[-3.0, 0.0, 0.9] {
            let p = pohozaev_residuals(&m, &v, c).unwrap();
            let scale = p.r1.abs() + p.r2.abs() + p.r4.abs();
            assert!((p.r4 - (p.r1 + 3.0 * p.r2)).abs() <= 1e-12 * scale);
        }
        let z = RealField::zeros(v.grid().clone());
        let p = pohozaev_residuals(&m, &z, -1.0).unwrap();
        assert_eq!((p.r1, p.r2, p.r4), (0.0, 0.0, 0.0));
        assert!(pohozaev_residuals(&Model::ilw_benjamin(1.0, 1.0, 1.0).unwrap(), &v, -1.0).is_err());
    }
}
