//! Periodic grid, discrete Fourier transform and Fourier multipliers.
//!
//! Conventions:
//!
//! * nodes `x_j = L·(-π + 2πj/N)`, `j = 0..N`;
//! * wavenumbers in FFT-native order, `k_j = m_j / L` with
//!   `m_j = j` for `j < N/2` and `m_j = j - N` otherwise;
//! * `forward` returns Fourier series amplitudes
//!   `û_k = (1/N) Σ_j u_j e^{-i k x_j}`, `inverse` evaluates
//!   `u_j = Σ_k û_k e^{i k x_j}`.
//!
//! With this normalization Parseval reads
//! `Σ_j |u_j|² · (2πL/N) = 2πL · Σ_k |û_k|²`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;

/// Uniform periodic grid on `L·[-π, π)` with cached FFT plans.
pub struct Grid {
    n: usize,
    scale: f64,
    nodes: Vec<f64>,
    wavenumbers: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_modes", &self.n)
            .field("scale", &self.scale)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.scale.to_bits() == other.scale.to_bits()
    }
}

/// Build a grid with `n_modes` collocation points on `scale·[-π, π)`.
pub fn make_grid(n_modes: usize, scale: f64) -> Result<Arc<Grid>> {
    Grid::new(n_modes, scale)
}

impl Grid {
    pub fn new(n_modes: usize, scale: f64) -> Result<Arc<Grid>> {
        if n_modes < 4 || !n_modes.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "n_modes must be even and >= 4, got {n_modes}"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::invalid(format!("scale must be positive, got {scale}")));
        }
        let n = n_modes;
        let h = 2.0 * PI / n as f64;
        let nodes = (0..n).map(|j| scale * (-PI + h * j as f64)).collect();
        let wavenumbers = (0..n).map(|j| signed_index(j, n) as f64 / scale).collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        Ok(Arc::new(Grid {
            n,
            scale,
            nodes,
            wavenumbers,
            fft,
            ifft,
        }))
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Node spacing `2πL/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI * self.scale / self.n as f64
    }

    /// Period `2πL` of the domain.
    pub fn period(&self) -> f64 {
        2.0 * PI * self.scale
    }

    /// Half-width `πL`; the domain is `[-πL, πL)`.
    pub fn half_width(&self) -> f64 {
        PI * self.scale
    }

    /// Signed integer mode number of FFT slot `j`.
    pub fn mode(&self, j: usize) -> i64 {
        signed_index(j, self.n)
    }

    /// FFT slot of the unpaired mode `k = -N/(2L)`.
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Largest resolved |k|.
    pub fn k_max(&self) -> f64 {
        (self.n / 2) as f64 / self.scale
    }

    /// Slots belonging to the top decile of |k| (used for spectral tails).
    pub fn top_decile(&self) -> impl Iterator<Item = usize> + '_ {
        let cutoff = 0.9 * (self.n / 2) as f64;
        (0..self.n).filter(move |&j| (self.mode(j).unsigned_abs() as f64) > cutoff)
    }

    /// Forward transform of real samples.
    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    /// Forward transform in place (input in physical space, complex samples).
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n, "buffer length does not match grid");
        self.fft.process(buf);
        let inv_n = 1.0 / self.n as f64;
        for (j, c) in buf.iter_mut().enumerate() {
            // (-1)^j shifts the phase origin from x_0 = -πL to x = 0
            let s = if j % 2 == 0 { inv_n } else { -inv_n };
            *c *= s;
        }
    }

    /// Inverse transform, returning the real part of the samples.
    pub fn inverse_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.inverse_in_place(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Inverse transform in place (input coefficients, output complex samples).
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n, "buffer length does not match grid");
        for (j, c) in buf.iter_mut().enumerate() {
            if j % 2 == 1 {
                *c = -*c;
            }
        }
        self.ifft.process(buf);
    }

    /// Spectral quadrature `∫ f dx` over one period.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.spacing() * values.iter().sum::<f64>()
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "grids differ: (N={}, L={}) vs (N={}, L={})",
                self.n, self.scale, other.n, other.scale
            )))
        }
    }
}

fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Physical-space samples of a real function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl RealField {
    /// Wrap samples; rejects wrong length and non-finite values.
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.n,
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample at node {j}")));
        }
        Ok(RealField { grid, values })
    }

    pub(crate) fn from_raw(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n);
        RealField { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.n;
        RealField::from_raw(grid, vec![0.0; n])
    }

    /// Sample `f` at the grid nodes.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        RealField::from_raw(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn forward(&self) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self.grid.forward_real(&self.values),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Value of largest magnitude, keeping its sign.
    pub fn peak(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(0.0, |m: f64, v| if v.abs() > m.abs() { v } else { m })
    }

    /// `∫ u dx` by the trapezoidal (spectral) rule.
    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// `u(x - shift)`, evaluated spectrally.
    pub fn translate(&self, shift: f64) -> RealField {
        let f = self.forward();
        let g = f.apply_real_preserving(|k| Complex64::from_polar(1.0, -k * shift));
        g.inverse()
    }

    /// `u(-x)`. Node `x_j` maps to `x_{N-j}`; node `x_0 = -πL` is its own image.
    pub fn reflect(&self) -> RealField {
        let n = self.grid.n;
        let values = (0..n).map(|j| self.values[(n - j) % n]).collect();
        RealField::from_raw(self.grid.clone(), values)
    }

    /// Largest |u| over nodes with `|x| >= 0.99 πL` (outermost 1% of the domain).
    pub fn boundary_tail(&self) -> f64 {
        let edge = 0.99 * self.grid.half_width();
        self.grid
            .nodes
            .iter()
            .zip(&self.values)
            .filter(|(x, _)| x.abs() >= edge)
            .fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    /// `max_j |u(x_j) - u(-x_j)|`.
    pub fn evenness_defect(&self) -> f64 {
        let r = self.reflect();
        max_abs_diff(&self.values, &r.values)
    }

    pub fn max_abs_diff(&self, other: &RealField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(max_abs_diff(&self.values, &other.values))
    }

    pub fn add(&self, other: &RealField) -> Result<RealField> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(RealField::from_raw(self.grid.clone(), values))
    }

    pub fn scaled(&self, s: f64) -> RealField {
        RealField::from_raw(self.grid.clone(), self.values.iter().map(|v| s * v).collect())
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Fourier coefficients of a field on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients, got {}",
                grid.n,
                coeffs.len()
            )));
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub(crate) fn from_raw(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.n);
        SpectralField { grid, coeffs }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Real part of the inverse transform. No finiteness check.
    pub fn inverse(&self) -> RealField {
        RealField::from_raw(self.grid.clone(), self.grid.inverse_real(&self.coeffs))
    }

    /// `max |û_{-k} - conj(û_k)|`, with the Nyquist slot required to be real.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n;
        let mut d: f64 = 0.0;
        for j in 1..n / 2 {
            d = d.max((self.coeffs[n - j] - self.coeffs[j].conj()).norm());
        }
        d.max(self.coeffs[0].im.abs())
            .max(self.coeffs[n / 2].im.abs())
    }

    /// Max coefficient magnitude over the top decile of |k|.
    pub fn spectral_tail(&self) -> f64 {
        self.grid
            .top_decile()
            .fold(0.0, |m, j| m.max(self.coeffs[j].norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// `Σ_k |û_k|²` (mean of u² over the period).
    pub fn power(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `coeffs_out[k] = m(k) · coeffs_in[k]` on every slot.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> Complex64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&self.grid.wavenumbers)
            .map(|(c, &k)| m(k) * c)
            .collect();
        SpectralField::from_raw(self.grid.clone(), coeffs)
    }

    /// Like [`apply_multiplier`](Self::apply_multiplier) but keeps only the
    /// real part of the symbol at the unpaired Nyquist slot, so that odd
    /// symbols (`ik`, `ik|k|`, `-i sgn k`) annihilate it and real fields stay real.
    pub fn apply_real_preserving(&self, m: impl Fn(f64) -> Complex64) -> SpectralField {
        let mult = Multiplier::real_preserving(&self.grid, m);
        mult.apply(self)
    }
}

/// A Fourier multiplier tabulated on a grid.
#[derive(Debug, Clone)]
pub struct Multiplier {
    values: Vec<Complex64>,
}

impl Multiplier {
    /// Tabulate `m(k)` on every slot verbatim.
    pub fn exact(grid: &Grid, m: impl Fn(f64) -> Complex64) -> Self {
        Multiplier {
            values: grid.wavenumbers.iter().map(|&k| m(k)).collect(),
        }
    }

    /// Tabulate `m(k)`, replacing the Nyquist entry by its real part.
    pub fn real_preserving(grid: &Grid, m: impl Fn(f64) -> Complex64) -> Self {
        let mut mult = Multiplier::exact(grid, m);
        let ny = grid.nyquist_index();
        mult.values[ny] = Complex64::new(mult.values[ny].re, 0.0);
        mult
    }

    /// Real-valued even symbol.
    pub fn real(grid: &Grid, m: impl Fn(f64) -> f64) -> Self {
        Multiplier::exact(grid, |k| Complex64::new(m(k), 0.0))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn apply(&self, f: &SpectralField) -> SpectralField {
        let coeffs = f.coeffs.iter().zip(&self.values).map(|(c, m)| c * m).collect();
        SpectralField::from_raw(f.grid.clone(), coeffs)
    }

    pub fn apply_in_place(&self, coeffs: &mut [Complex64], exec: ExecPolicy) {
        let vals = &self.values;
        exec.for_each_indexed(coeffs, |j, c| *c *= vals[j]);
    }
}

/// Anti-aliasing policy for quadratic products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    #[default]
    Off,
    /// Zero modes with `|m| > N/3` after forming the product.
    TwoThirds,
}

impl Dealias {
    pub(crate) fn apply(self, grid: &Grid, coeffs: &mut [Complex64]) {
        if self == Dealias::TwoThirds {
            let cut = grid.n as i64 / 3;
            for (j, c) in coeffs.iter_mut().enumerate() {
                if grid.mode(j).abs() > cut {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
}

/// Symbol of the Hilbert transform, `-i sgn(k)` with `sgn(0) = 0`.
pub fn hilbert_symbol(k: f64) -> Complex64 {
    let s = if k > 0.0 {
        1.0
    } else if k < 0.0 {
        -1.0
    } else {
        0.0
    };
    Complex64::new(0.0, -s)
}

/// Symbol `k coth(δk)` of the Tilbert-type operator.
pub fn tilbert_symbol(k: f64, delta: f64) -> Result<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid(format!("delta must be positive, got {delta}")));
    }
    Ok(tilbert_unchecked(k, delta))
}

pub(crate) fn tilbert_unchecked(k: f64, delta: f64) -> f64 {
    let z = delta * k;
    if z == 0.0 {
        1.0 / delta
    } else if z.abs() < 1e-4 {
        1.0 / delta + delta * k * k / 3.0
    } else {
        k / z.tanh()
    }
}

/// ILW dispersion `m_δ(k) = k coth(δk) - 1/δ`, evaluated without cancellation
/// near `k = 0`. Nonnegative, zero only at `k = 0`, tends to `|k|` as `δ → ∞`.
pub fn ilw_symbol(k: f64, delta: f64) -> f64 {
    let z = (delta * k).abs();
    if z < 0.1 {
        // z coth z - 1 = z²/3 - z⁴/45 + 2z⁶/945 - z⁸/4725 + 2z¹⁰/93555
        let z2 = z * z;
        let s = z2
            * (1.0 / 3.0
                + z2 * (-1.0 / 45.0 + z2 * (2.0 / 945.0 + z2 * (-1.0 / 4725.0 + z2 * 2.0 / 93555.0))));
        s / delta
    } else {
        tilbert_unchecked(k, delta) - 1.0 / delta
    }
}
