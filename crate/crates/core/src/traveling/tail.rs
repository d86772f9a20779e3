//! Decay-type classification of localized profiles.
//!
//! Two model classes are fitted to the outer part of the decayed region:
//! algebraic `φ ≈ C/x²` (also in its periodized form
//! `C·(π/P)²/sin²(πx/P)`, the sum over all periodic images) and exponential
//! `φ ≈ A e^{-κ|x|}`. Both are scored by the same relative L² misfit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SolitaryWave;
use crate::error::{Error, Result};
use crate::spectral::RealField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    Algebraic,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub kind: TailKind,
    /// `C` in `x²φ → C` for algebraic tails, the rate `κ` for exponential ones.
    pub constant_or_rate: f64,
    pub algebraic_constant: f64,
    pub algebraic_misfit: f64,
    pub exponential_rate: f64,
    pub exponential_misfit: f64,
    /// `|x|` range of the fit window.
    pub window: (f64, f64),
}

/// Samples below this fraction of `max|φ|` are treated as round-off.
const NOISE_FLOOR: f64 = 1e-10;
/// Profiles whose boundary value exceeds this fraction of the peak are not localized.
const UNDECAYED: f64 = 1e-2;
const MIN_POINTS: usize = 6;

pub fn tail_classify(w: &SolitaryWave) -> Result<TailFit> {
    tail_classify_profile(&w.profile)
}

pub fn tail_classify_profile(phi: &RealField) -> Result<TailFit> {
    let grid = phi.grid();
    let peak = phi.max_abs();
    if peak == 0.0 {
        return Err(Error::NotClassifiable("profile vanishes identically".into()));
    }
    if phi.boundary_tail() > UNDECAYED * peak {
        return Err(Error::NotClassifiable(format!(
            "profile has not decayed at the boundary ({:e} of peak)",
            phi.boundary_tail() / peak
        )));
    }
    let pts: Vec<(f64, f64)> = grid
        .nodes()
        .iter()
        .zip(phi.values())
        .map(|(&x, &v)| (x.abs(), v))
        .collect();
    let x_edge = pts
        .iter()
        .filter(|(_, v)| v.abs() > NOISE_FLOOR * peak)
        .fold(0.0f64, |m, (x, _)| m.max(*x));
    let lo = 0.8 * x_edge;
    let window: Vec<(f64, f64)> = pts
        .into_iter()
        .filter(|&(x, v)| x >= lo && x <= x_edge && x > 0.0 && v.abs() > NOISE_FLOOR * peak)
        .collect();
    if window.len() < MIN_POINTS {
        return Err(Error::NotClassifiable(format!(
            "only {} samples above the noise floor in the tail window",
            window.len()
        )));
    }
    let norm: f64 = window.iter().map(|(_, v)| v * v).sum();
    let misfit = |model: &dyn Fn(f64) -> f64| -> f64 {
        (window.iter().map(|&(x, v)| (v - model(x)).powi(2)).sum::<f64>() / norm).sqrt()
    };
    let lsq_scale = |g: &dyn Fn(f64) -> f64| -> f64 {
        let num: f64 = window.iter().map(|&(x, v)| v * g(x)).sum();
        let den: f64 = window.iter().map(|&(x, _)| g(x) * g(x)).sum();
        num / den
    };

    let line = |x: f64| 1.0 / (x * x);
    let period = grid.period();
    let images = move |x: f64| (PI / period).powi(2) / (PI * x / period).sin().powi(2);
    let c_line = lsq_scale(&line);
    let c_img = lsq_scale(&images);
    let m_line = misfit(&|x| c_line * line(x));
    let m_img = misfit(&|x| c_img * images(x));
    let (alg_c, alg_m) = if m_img < m_line { (c_img, m_img) } else { (c_line, m_line) };

    // log-linear fit on the dominant sign
    let sign = if window.iter().map(|(_, v)| v).sum::<f64>() >= 0.0 { 1.0 } else { -1.0 };
    let logs: Vec<(f64, f64)> = window
        .iter()
        .filter(|(_, v)| v * sign > 0.0)
        .map(|&(x, v)| (x, (v * sign).ln()))
        .collect();
    let (rate, exp_m) = if logs.len() >= 2 {
        let n = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let icpt = my - slope * mx;
        (-slope, misfit(&|x| sign * (icpt + slope * x).exp()))
    } else {
        (f64::NAN, f64::INFINITY)
    };

    let (kind, value) = if alg_m <= exp_m {
        (TailKind::Algebraic, alg_c)
    } else {
        (TailKind::Exponential, rate)
    };
    Ok(TailFit {
        kind,
        constant_or_rate: value,
        algebraic_constant: alg_c,
        algebraic_misfit: alg_m,
        exponential_rate: rate,
        exponential_misfit: exp_m,
        window: (lo, x_edge),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use crate::traveling::{bo_soliton, kdv_soliton};

    #[test]
    fn kdv_tail_is_exponential_with_unit_rate() {
        let g = make_grid(1024, 20.0).unwrap();
        let q = kdv_soliton(-1.0, 1.0, &g).unwrap();
        let fit = tail_classify_profile(&q).unwrap();
        assert_eq!(fit.kind, TailKind::Exponential);
        assert!((fit.constant_or_rate - 1.0).abs() < 1e-3, "{fit:?}");
    }

    #[test]
    fn bo_tail_is_algebraic_with_constant_four() {
        let g = make_grid(1 << 12, 50.0).unwrap();
        let q = bo_soliton(1.0, &g).unwrap();
        let fit = tail_classify_profile(&q).unwrap();
        assert_eq!(fit.kind, TailKind::Algebraic);
        assert!((fit.constant_or_rate - 4.0).abs() < 1e-3, "{fit:?}");
    }

    #[test]
    fn undecayed_profile_is_rejected() {
        let g = make_grid(128, 2.0).unwrap();
        let q = RealField::from_fn(g, |x| 1.0 + 0.1 * x.cos());
        assert!(matches!(tail_classify_profile(&q), Err(Error::NotClassifiable(_))));
    }
}
