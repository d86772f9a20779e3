//! Post-hoc analysis of runs: plateau detection, spectral splitting at the
//! zero of the phase velocity, decay certificates, hump extraction and
//! run reports.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::spectral::{RealField, SpectralField};
use crate::traveling::TailFit;

/// Default trailing-window fraction for [`plateau_detect`].
pub const PLATEAU_WINDOW: f64 = 0.25;
/// Default relative tolerance for [`plateau_detect`].
pub const PLATEAU_REL_TOL: f64 = 0.05;
const PLATEAU_BLOCKS: usize = 4;

/// Whether the oscillation envelope of `series` is flat over its trailing
/// `window_fraction`.
///
/// The window is cut into four blocks; each block contributes the midpoint
/// of its range, `(max + min)/2`. The verdict is true iff those midpoints
/// spread by less than `rel_tol` of their mean magnitude.
pub fn plateau_detect(series: &[f64], window_fraction: f64, rel_tol: f64) -> Result<bool> {
    Ok(plateau_variation(series, window_fraction)? < rel_tol)
}

/// The relative envelope variation that [`plateau_detect`] compares against its tolerance.
pub fn plateau_variation(series: &[f64], window_fraction: f64) -> Result<f64> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::invalid(format!("window fraction must lie in (0, 1], got {window_fraction}")));
    }
    let need = (10.0 / window_fraction).ceil() as usize;
    if series.len() < need {
        return Err(Error::invalid(format!(
            "series has {} samples, plateau detection needs at least {need}",
            series.len()
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("series contains non-finite samples"));
    }
    let start = series.len() - ((series.len() as f64 * window_fraction).round() as usize).max(PLATEAU_BLOCKS);
    let tail = &series[start..];
    let mids: Vec<f64> = (0..PLATEAU_BLOCKS)
        .map(|b| {
            let lo = b * tail.len() / PLATEAU_BLOCKS;
            let hi = (b + 1) * tail.len() / PLATEAU_BLOCKS;
            let blk = &tail[lo..hi];
            let mx = blk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mn = blk.iter().copied().fold(f64::INFINITY, f64::min);
            0.5 * (mx + mn)
        })
        .collect();
    let mean = mids.iter().sum::<f64>() / mids.len() as f64;
    let spread = mids.iter().copied().fold(f64::NEG_INFINITY, f64::max) - mids.iter().copied().fold(f64::INFINITY, f64::min);
    if spread == 0.0 {
        return Ok(0.0);
    }
    Ok(spread / mean.abs())
}

/// L² energy `∫u²` split at `|k| = α/β`: modes below travel left, modes
/// above travel right.
pub fn radiation_split(f: &SpectralField, model: &Model) -> Result<(f64, f64)> {
    let (a, b) = (model.alpha(), model.beta());
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::invalid(format!(
            "radiation split needs alpha > 0 and beta > 0, got alpha = {a}, beta = {b}"
        )));
    }
    let grid = f.grid();
    let k_star = a / b;
    if k_star > grid.k_max() {
        warn!("k* = {k_star} lies beyond the largest resolved wavenumber {}; all energy is left-going", grid.k_max());
    } else if k_star < 1.0 / grid.scale() {
        warn!("k* = {k_star} lies below the first nonzero wavenumber; all oscillatory energy is right-going");
    }
    let p = grid.period();
    let (mut left, mut right) = (0.0, 0.0);
    for (c, &k) in f.coeffs().iter().zip(grid.wavenumbers()) {
        if k.abs() < k_star {
            left += c.norm_sqr();
        } else {
            right += c.norm_sqr();
        }
    }
    Ok((p * left, p * right))
}

/// True iff the top decile of `|k|` carries no coefficient above
/// `threshold · max_k |û_k|`.
pub fn spectral_decay_certificate(f: &SpectralField, threshold: f64) -> bool {
    f.spectral_tail() <= threshold * f.max_abs()
}

/// Number of sign changes of `u` along the grid, ignoring samples with
/// `|u| ≤ floor · max|u|`.
pub fn sign_changes(u: &RealField, floor: f64) -> usize {
    let cut = floor * u.max_abs();
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in u.values() {
        if v.abs() <= cut {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            count += 1;
        }
        last = v.signum();
    }
    count
}

/// A coherent hump isolated from a trajectory.
#[derive(Debug, Clone)]
pub struct LeadingStructure {
    /// The tapered hump, recentred on `x = 0` and symmetrized.
    pub window: RealField,
    pub speed: f64,
    /// Peak position in the last snapshot.
    pub position: f64,
    /// Signed peak value.
    pub amplitude: f64,
    /// Number of grid points inside the window before tapering.
    pub width_points: usize,
}

/// Humps below this absolute level count as noise.
const HUMP_FLOOR: f64 = 1e-10;
/// The flank search stops only after the field fell below this share of the peak.
const FLANK_LEVEL: f64 = 0.01;
const TAPER: f64 = 0.1;

fn wrap(j: isize, n: usize) -> usize {
    j.rem_euclid(n as isize) as usize
}

/// Sub-grid peak location of `s·u` near index `j` by a parabola through three samples.
fn refine_peak(v: &[f64], j: usize, s: f64, h: f64) -> f64 {
    let n = v.len();
    let (ym, y0, yp) = (s * v[wrap(j as isize - 1, n)], s * v[j], s * v[(j + 1) % n]);
    let den = ym - 2.0 * y0 + yp;
    let off = if den < 0.0 { 0.5 * (ym - yp) / den } else { 0.0 };
    off.clamp(-0.5, 0.5) * h
}

fn local_peak(v: &[f64], center: usize, radius: usize, s: f64) -> usize {
    let n = v.len();
    let mut best = center;
    for d in -(radius as isize)..=(radius as isize) {
        let j = wrap(center as isize + d, n);
        if s * v[j] > s * v[best] {
            best = j;
        }
    }
    best
}

/// Isolate the largest-amplitude hump in the last snapshot and estimate its
/// speed by tracking its peak backwards through the trailing half of the
/// snapshots.
///
/// The hump is cut between the nearest local minima of `|u|` that lie
/// beyond the point where `|u|` drops below 1% of the peak, tapered with a
/// raised cosine over 10% of its width, shifted to `x = 0` and made even.
pub fn extract_leading_structure(snapshots: &[(f64, RealField)]) -> Result<LeadingStructure> {
    if snapshots.len() < 2 {
        return Err(Error::invalid("speed estimation needs at least two snapshots"));
    }
    let (t_last, last) = snapshots.last().unwrap();
    let grid = last.grid().clone();
    let n = grid.n_modes();
    let h = grid.spacing();
    let v = last.values();
    let (jp, _) = v
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bj, bv), (j, &x)| if x.abs() > bv { (j, x.abs()) } else { (bj, bv) });
    let amp = v[jp];
    if amp.abs() <= HUMP_FLOOR {
        return Err(Error::NotFound(format!("no hump above the noise floor {HUMP_FLOOR:e}")));
    }
    let s = amp.signum();

    // flanks
    let flank = |dir: isize| -> usize {
        let mut d = 0usize;
        let mut below = false;
        while d + 1 < n / 2 {
            let here = v[wrap(jp as isize + dir * d as isize, n)].abs();
            let next = v[wrap(jp as isize + dir * (d as isize + 1), n)].abs();
            if here <= FLANK_LEVEL * amp.abs() || s * v[wrap(jp as isize + dir * d as isize, n)] <= 0.0 {
                below = true;
            }
            if below && next >= here {
                break;
            }
            d += 1;
        }
        d
    };
    let (dl, dr) = (flank(-1), flank(1));
    let width = dl + dr + 1;
    let ramp = ((TAPER * width as f64).round() as usize).max(1);
    let mut w = vec![0.0; n];
    for i in 0..width {
        let j = wrap(jp as isize - dl as isize + i as isize, n);
        let edge = i.min(width - 1 - i);
        let taper = if edge >= ramp {
            1.0
        } else {
            0.5 * (1.0 - (PI * (edge as f64 + 0.5) / ramp as f64).cos())
        };
        w[j] = v[j] * taper;
    }

    let position = grid.nodes()[jp] + refine_peak(v, jp, s, h);
    let centered = RealField::from_raw(grid.clone(), w).translate(-position);
    let mirrored = centered.reflect();
    let window = RealField::from_raw(
        grid.clone(),
        centered.values().iter().zip(mirrored.values()).map(|(a, b)| 0.5 * (a + b)).collect(),
    );

    // peak tracking
    let t0 = snapshots[0].0;
    let t_mid = t0 + 0.5 * (t_last - t0);
    let track: Vec<&(f64, RealField)> = {
        let tr: Vec<_> = snapshots.iter().filter(|(t, _)| *t >= t_mid).collect();
        if tr.len() >= 2 { tr } else { snapshots.iter().collect() }
    };
    let radius = (n / 50).max(8);
    let period = grid.period();
    let mut j = jp;
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(track.len());
    let mut prev_x: Option<f64> = None;
    for (t, u) in track.iter().rev() {
        if u.grid() != &grid {
            return Err(Error::GridMismatch("snapshots use different grids".into()));
        }
        let uv = u.values();
        j = local_peak(uv, j, radius, s);
        let mut x = grid.nodes()[j] + refine_peak(uv, j, s, h);
        if let Some(px) = prev_x {
            x -= period * ((x - px) / period).round();
        }
        prev_x = Some(x);
        pts.push((*t, x));
    }
    let m = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let stx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mx)).sum();
    if stt == 0.0 {
        return Err(Error::invalid("snapshots must be taken at distinct times"));
    }

    Ok(LeadingStructure {
        window,
        speed: stx / stt,
        position,
        amplitude: amp,
        width_points: width,
    })
}

/// How a check's value is compared to its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Le,
    Lt,
    Ge,
    Gt,
}

impl Comparator {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Le => value <= threshold,
            Comparator::Lt => value < threshold,
            Comparator::Ge => value >= threshold,
            Comparator::Gt => value > threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Le => "<=",
            Comparator::Lt => "<",
            Comparator::Ge => ">=",
            Comparator::Gt => ">",
        }
    }
}

/// A single pass/fail flag together with the numbers that decided it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparator: Comparator,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, comparator: Comparator, threshold: f64) -> Check {
        Check {
            name: name.into(),
            value,
            comparator,
            threshold,
            passed: comparator.holds(value, threshold),
        }
    }

    /// A boolean verdict encoded as `value ∈ {0, 1}` against threshold 1.
    pub fn flag(name: impl Into<String>, ok: bool) -> Check {
        Check::new(name, if ok { 1.0 } else { 0.0 }, Comparator::Ge, 1.0)
    }

    /// Re-evaluate the stored comparison.
    pub fn consistent(&self) -> bool {
        self.passed == self.comparator.holds(self.value, self.threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauVerdict {
    pub window_fraction: f64,
    pub rel_tol: f64,
    pub variation: f64,
    pub plateau: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSplit {
    pub k_star: f64,
    pub left_initial: f64,
    pub right_initial: f64,
    pub left_final: f64,
    pub right_final: f64,
}

impl SpectralSplit {
    fn share(a: f64, b: f64) -> f64 {
        if a + b > 0.0 { a / (a + b) } else { 0.0 }
    }

    pub fn right_share_initial(&self) -> f64 {
        Self::share(self.right_initial, self.left_initial)
    }

    pub fn right_share_final(&self) -> f64 {
        Self::share(self.right_final, self.left_final)
    }

    pub fn left_share_initial(&self) -> f64 {
        Self::share(self.left_initial, self.right_initial)
    }

    pub fn left_share_final(&self) -> f64 {
        Self::share(self.left_final, self.right_final)
    }
}

/// Summary of one experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub kind: String,
    /// Flattened `section.key = value` echo of the configuration.
    pub config: BTreeMap<String, String>,
    /// Max relative drift per conserved quantity.
    pub conservation: BTreeMap<String, f64>,
    pub plateau: Option<PlateauVerdict>,
    pub spectral_split: Option<SpectralSplit>,
    pub tail: Option<TailFit>,
    /// Scalar results (residuals, amplitudes, speeds, ...).
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn new(name: impl Into<String>, kind: impl Into<String>) -> RunReport {
        RunReport {
            name: name.into(),
            kind: kind.into(),
            ..Default::default()
        }
    }

    pub fn check(&mut self, c: Check) -> bool {
        let ok = c.passed;
        self.checks.push(c);
        ok
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        writeln!(s, "run: {} ({})", self.name, self.kind)?;
        if !self.config.is_empty() {
            writeln!(s, "\n[config]")?;
            for (k, v) in &self.config {
                writeln!(s, "  {k} = {v}")?;
            }
        }
        if !self.conservation.is_empty() {
            writeln!(s, "\n[conservation: max relative drift]")?;
            for (k, v) in &self.conservation {
                writeln!(s, "  {k:<10} {v:.3e}")?;
            }
        }
        if let Some(p) = &self.plateau {
            writeln!(s, "\n[plateau]")?;
            writeln!(
                s,
                "  trailing {:.0}%: variation {:.3e} vs tol {:.3e} -> {}",
                100.0 * p.window_fraction,
                p.variation,
                p.rel_tol,
                if p.plateau { "plateau" } else { "no plateau" }
            )?;
        }
        if let Some(sp) = &self.spectral_split {
            writeln!(s, "\n[spectral split at k* = {:.6}]", sp.k_star)?;
            writeln!(s, "  initial: left {:.6e}  right {:.6e}", sp.left_initial, sp.right_initial)?;
            writeln!(s, "  final:   left {:.6e}  right {:.6e}", sp.left_final, sp.right_final)?;
        }
        if let Some(t) = &self.tail {
            writeln!(s, "\n[tail]")?;
            writeln!(s, "  {:?}: {:.6e} (window {:.3}..{:.3})", t.kind, t.constant_or_rate, t.window.0, t.window.1)?;
        }
        if !self.metrics.is_empty() {
            writeln!(s, "\n[metrics]")?;
            for (k, v) in &self.metrics {
                writeln!(s, "  {k:<28} {v:.10e}")?;
            }
        }
        writeln!(s, "\n[checks]")?;
        for c in &self.checks {
            writeln!(
                s,
                "  {} {:<32} {:.6e} {} {:.6e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.comparator.symbol(),
                c.threshold
            )?;
        }
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn constant_series_is_a_plateau() {
        assert!(plateau_detect(&[2.0; 100], PLATEAU_WINDOW, PLATEAU_REL_TOL).unwrap());
    }

    #[test]
    fn linear_decay_is_not_a_plateau() {
        // 10% drop over the trailing quarter
        let s: Vec<f64> = (0..400).map(|i| 1.0 - 0.1 * (i as f64 - 300.0) / 100.0).collect();
        assert!(!plateau_detect(&s, PLATEAU_WINDOW, PLATEAU_REL_TOL).unwrap());
    }

    #[test]
    fn short_series_is_rejected() {
        assert!(plateau_detect(&[1.0; 39], 0.25, 0.05).is_err());
        assert!(plateau_detect(&[1.0; 40], 0.25, 0.05).is_ok());
    }

    #[test]
    fn oscillation_about_a_level_is_a_plateau() {
        let s: Vec<f64> = (0..400).map(|i| 3.0 + 0.4 * (i as f64 * 0.7).sin()).collect();
        assert!(plateau_detect(&s, PLATEAU_WINDOW, PLATEAU_REL_TOL).unwrap());
    }

    #[test]
    fn single_modes_split_by_direction() {
        let g = make_grid(64, 1.0).unwrap();
        let m = Model::benjamin(1.0, 0.25).unwrap(); // k* = 4
        let slow = RealField::from_fn(g.clone(), |x| (2.0 * x).cos()).forward();
        let fast = RealField::from_fn(g, |x| (9.0 * x).cos()).forward();
        let (l, r) = radiation_split(&slow, &m).unwrap();
        assert!((l - PI).abs() < 1e-12 && r < 1e-25);
        let (l, r) = radiation_split(&fast, &m).unwrap();
        assert!(l < 1e-25 && (r - PI).abs() < 1e-12);
    }

    #[test]
    fn certificate_on_band_limited_and_noise() {
        let g = make_grid(128, 1.0).unwrap();
        let band = RealField::from_fn(g.clone(), |x| x.sin() + 0.5 * (3.0 * x).cos()).forward();
        assert!(spectral_decay_certificate(&band, 1e-14));
        // deterministic pseudo-noise
        let mut state = 12345u64;
        let noise: Vec<f64> = (0..128)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        let noise = RealField::new(g, noise).unwrap().forward();
        assert!(!spectral_decay_certificate(&noise, 1e-10));
    }

    #[test]
    fn zero_field_has_no_hump() {
        let g = make_grid(64, 1.0).unwrap();
        let z = RealField::zeros(g);
        let snaps = vec![(0.0, z.clone()), (1.0, z)];
        assert!(matches!(extract_leading_structure(&snaps), Err(Error::NotFound(_))));
    }

    #[test]
    fn sign_changes_of_cosine() {
        let g = make_grid(256, 1.0).unwrap();
        let u = RealField::from_fn(g, |x| (3.0 * x).cos());
        assert_eq!(sign_changes(&u, 1e-8), 6);
    }

    #[test]
    fn check_comparators() {
        assert!(Check::new("a", 1.0, Comparator::Le, 1.0).passed);
        assert!(!Check::new("a", 1.0, Comparator::Lt, 1.0).passed);
        assert!(Check::flag("b", true).passed);
        assert!(!Check::flag("b", false).passed);
    }
}
