use log::{debug, info};
use serde::{Deserialize, Serialize};

use super::newton::{newton_krylov_solve, SolverConfig};
use super::SolitaryWave;
use crate::error::{Error, Result};
use crate::model::Parameter;
use crate::spectral::RealField;

/// Step-size and termination control for [`trace_branch`].
///
/// A converged wave counts as delocalized when its boundary tail exceeds
/// `delocalization_threshold` (absolute, or times `max|Q|` when
/// `relative_to_peak` is set) and, if `max_decay_ratio` is set, its far
/// field also fails to decay: the ratio of `max|Q|` over the outer tenth of
/// the half-domain to `max|Q|` around its middle exceeds that bound.
/// Pure `1/x²` tails give a ratio near 0.42 on the torus, exponential tails
/// give almost zero, and resonant radiation tails give about one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepControl {
    /// Smallest sub-step, relative to the distance between consecutive targets,
    /// before giving up on Newton failures.
    pub min_rel_step: f64,
    pub delocalization_threshold: f64,
    pub relative_to_peak: bool,
    pub max_decay_ratio: Option<f64>,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            min_rel_step: 1e-4,
            delocalization_threshold: 1e-8,
            relative_to_peak: true,
            max_decay_ratio: Some(0.6),
        }
    }
}

impl StepControl {
    /// Only the tail threshold, measured absolutely.
    pub fn absolute(threshold: f64) -> Self {
        StepControl {
            delocalization_threshold: threshold,
            relative_to_peak: false,
            max_decay_ratio: None,
            ..Default::default()
        }
    }

    pub fn is_delocalized(&self, w: &SolitaryWave) -> bool {
        let scale = if self.relative_to_peak { w.profile.max_abs() } else { 1.0 };
        if w.boundary_tail <= self.delocalization_threshold * scale {
            return false;
        }
        match self.max_decay_ratio {
            Some(bound) => far_field_ratio(&w.profile) > bound,
            None => true,
        }
    }
}

/// `max|Q|` over `|x| ≥ 0.9X` divided by `max|Q|` over `0.45X ≤ |x| ≤ 0.55X`,
/// with `X` the half-width of the domain.
pub fn far_field_ratio(q: &RealField) -> f64 {
    let half = q.grid().half_width();
    let (mut outer, mut mid) = (0.0f64, 0.0f64);
    for (x, v) in q.grid().nodes().iter().zip(q.values()) {
        let r = x.abs() / half;
        if r >= 0.9 {
            outer = outer.max(v.abs());
        }
        if (0.45..=0.55).contains(&r) {
            mid = mid.max(v.abs());
        }
    }
    if mid == 0.0 {
        return if outer == 0.0 { 0.0 } else { f64::INFINITY };
    }
    outer / mid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    NewtonDiverged,
    Delocalized,
}

#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub value: f64,
    pub wave: SolitaryWave,
}

/// Converged waves along a continuation path.
#[derive(Debug, Clone)]
pub struct Branch {
    pub parameter: Parameter,
    pub points: Vec<BranchPoint>,
    pub termination: Termination,
    /// Target at which the branch stopped, if it did not complete.
    pub stopped_at: Option<f64>,
}

impl Branch {
    pub fn last(&self) -> &BranchPoint {
        self.points.last().expect("a branch always holds its start point")
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

fn parameter_value(w: &SolitaryWave, p: Parameter) -> f64 {
    match p {
        Parameter::C => w.velocity,
        other => w.model.parameter(other).expect("model parameter"),
    }
}

fn solve_at(seed: &SolitaryWave, p: Parameter, value: f64, cfg: &SolverConfig) -> Result<SolitaryWave> {
    match p {
        Parameter::C => newton_krylov_solve(&seed.profile, &seed.model, value, cfg),
        other => {
            let model = seed.model.with_parameter(other, value)?;
            newton_krylov_solve(&seed.profile, &model, seed.velocity, cfg)
        }
    }
}

/// Continue `start` through `targets` in `parameter`, seeding each solve
/// with the previous converged profile.
///
/// A failed solve is retried with halved sub-steps until the step drops
/// below `control.min_rel_step` times the target spacing; the branch then
/// ends with [`Termination::NewtonDiverged`]. A converged wave whose
/// boundary tail exceeds the delocalization threshold ends the branch with
/// [`Termination::Delocalized`] and is not recorded.
pub fn trace_branch(
    start: &SolitaryWave,
    parameter: Parameter,
    targets: &[f64],
    control: &StepControl,
    cfg: &SolverConfig,
) -> Result<Branch> {
    let p0 = parameter_value(start, parameter);
    let targets: Vec<f64> = targets.iter().copied().filter(|&t| t != p0).collect();
    if let Some(&first) = targets.first() {
        let dir = (first - p0).signum();
        let mut prev = p0;
        for &t in &targets {
            if !t.is_finite() || (t - prev).signum() != dir {
                return Err(Error::invalid(format!(
                    "continuation targets must be strictly monotone away from {p0}"
                )));
            }
            prev = t;
        }
    }

    let mut branch = Branch {
        parameter,
        points: vec![BranchPoint {
            value: p0,
            wave: start.clone(),
        }],
        termination: Termination::Completed,
        stopped_at: None,
    };
    let mut current = start.clone();
    let mut p = p0;

    for &target in &targets {
        let min_step = control.min_rel_step * (target - p).abs();
        let mut step = target - p;
        while p != target {
            let trial = if (target - p).abs() <= step.abs() { target } else { p + step };
            match solve_at(&current, parameter, trial, cfg) {
                Ok(w) => {
                    debug!("{parameter} = {trial}: converged in {} iterations", w.newton_iterations);
                    current = w;
                    p = trial;
                    step *= 2.0;
                }
                Err(e @ Error::InvalidArgument(_)) | Err(e @ Error::NonexistenceWindow { .. }) => return Err(e),
                Err(e) => {
                    step *= 0.5;
                    debug!("{parameter} = {trial}: {e}; halving step to {step}");
                    if step.abs() < min_step {
                        info!("branch in {parameter} stopped at {p}: Newton failed toward {target}");
                        branch.termination = Termination::NewtonDiverged;
                        branch.stopped_at = Some(target);
                        return Ok(branch);
                    }
                }
            }
        }
        if control.is_delocalized(&current) {
            info!(
                "branch in {parameter} delocalized at {target} (boundary tail {:e})",
                current.boundary_tail
            );
            branch.termination = Termination::Delocalized;
            branch.stopped_at = Some(target);
            return Ok(branch);
        }
        branch.points.push(BranchPoint {
            value: target,
            wave: current.clone(),
        });
    }
    Ok(branch)
}
