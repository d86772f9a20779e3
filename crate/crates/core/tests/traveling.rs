use std::sync::Arc;

use benjamin_core::diagnostics::spectral_decay_certificate;
use benjamin_core::model::Parameter;
use benjamin_core::spectral::make_grid;
use benjamin_core::traveling::{
    kdv_soliton, newton_krylov_solve, periodic_traveling_wave, residual_of_profile, tail_classify, trace_branch,
    Branch, SolitaryWave, SolverConfig, StepControl, TailKind, Termination,
};
use benjamin_core::{Grid, Model, RealField};

fn paper_grid() -> Arc<Grid> {
    make_grid(1024, 20.0).unwrap()
}

fn kdv_start(model: Model, g: &Arc<Grid>) -> SolitaryWave {
    let seed = kdv_soliton(-1.0, 1.0, g).unwrap();
    newton_krylov_solve(&seed, &model, -1.0, &SolverConfig::default()).unwrap()
}

fn alpha_branch(model: Model, g: &Arc<Grid>, targets: &[f64]) -> Branch {
    let start = kdv_start(model, g);
    trace_branch(&start, Parameter::Alpha, targets, &StepControl::default(), &SolverConfig::default()).unwrap()
}

fn steps(from: f64, to: f64, h: f64) -> Vec<f64> {
    let n = ((to - from) / h).round() as usize;
    (1..=n).map(|i| from + i as f64 * h).collect()
}

fn assert_amplitude_decreases(b: &Branch) {
    assert_eq!(b.termination, Termination::Completed);
    let peaks: Vec<f64> = b.points.iter().map(|p| p.wave.peak().abs()).collect();
    for w in peaks.windows(2) {
        assert!(w[1] < w[0], "peaks {peaks:?}");
    }
}

#[test]
fn exact_kdv_soliton_is_a_fixed_point() {
    let g = paper_grid();
    let seed = kdv_soliton(-1.0, 1.0, &g).unwrap();
    let m = Model::benjamin(0.0, 1.0).unwrap();
    assert!(residual_of_profile(&seed, &m, -1.0).max_abs() <= 1e-12);
    let w = newton_krylov_solve(&seed, &m, -1.0, &SolverConfig::default()).unwrap();
    assert!(w.newton_iterations <= 2);
    assert!(w.profile.max_abs_diff(&seed).unwrap() <= 1e-10);
}

#[test]
fn stored_residual_matches_recomputation() {
    let g = paper_grid();
    for alpha in [0.0, 0.5] {
        let w = kdv_start(Model::benjamin(alpha, 1.0).unwrap(), &g);
        assert!(w.residual_norm <= 1e-10);
        assert!((w.recompute_residual() - w.residual_norm).abs() <= 1e-13);
    }
}

#[test]
fn even_seeds_give_even_profiles() {
    let g = paper_grid();
    for model in [Model::benjamin(0.5, 1.0).unwrap(), Model::ilw_benjamin(1.0, 1.0, 0.9).unwrap()] {
        let w = kdv_start(model, &g);
        assert!(w.profile.evenness_defect() <= 1e-10, "{:e}", w.profile.evenness_defect());
    }
}

#[test]
fn benjamin_branch_amplitude_decreases() {
    let g = paper_grid();
    let b = alpha_branch(Model::benjamin(0.0, 1.0).unwrap(), &g, &steps(0.0, 1.5, 0.1));
    assert_amplitude_decreases(&b);
}

#[test]
fn ilw_benjamin_branch_amplitude_decreases() {
    let g = paper_grid();
    let b = alpha_branch(Model::ilw_benjamin(0.0, 1.0, 0.9).unwrap(), &g, &steps(0.0, 2.0, 0.1));
    assert_amplitude_decreases(&b);
}

#[test]
fn traced_benjamin_wave_has_algebraic_tails() {
    let g = paper_grid();
    let b = alpha_branch(Model::benjamin(0.0, 1.0).unwrap(), &g, &steps(0.0, 1.0, 0.1));
    let fit = tail_classify(&b.last().wave).unwrap();
    assert_eq!(fit.kind, TailKind::Algebraic, "{fit:?}");
    assert!(fit.constant_or_rate.abs() > 1e-3, "{fit:?}");
}

#[test]
fn traced_wave_passes_the_decay_certificate() {
    let g = paper_grid();
    let mut targets = steps(0.0, 1.9, 0.1);
    targets.push(1.95);
    let b = alpha_branch(Model::benjamin(0.0, 1.0).unwrap(), &g, &targets);
    let w = &b.last().wave;
    assert_eq!(b.last().value, 1.95);
    assert!(spectral_decay_certificate(&w.profile.forward(), 1e-10));
}

fn cnoidal_seed(g: &Arc<Grid>, c: f64) -> (RealField, f64) {
    // positive KdV soliton of φ'' + φ²/2 - cφ = 0, shifted to zero mean
    let a = 0.5 * c.sqrt();
    let q = RealField::from_fn(g.clone(), |x| 3.0 * c / (a * x).cosh().powi(2));
    let mean = q.values().iter().sum::<f64>() / q.values().len() as f64;
    (RealField::from_fn(g.clone(), |_| -mean).add(&q).unwrap(), mean)
}

#[test]
fn cnoidal_wave_without_nonlocal_term() {
    let g = make_grid(256, 3.0).unwrap();
    let m = Model::ilw(1.0, 1.0).unwrap();
    let (seed, mean) = cnoidal_seed(&g, 1.0);
    let c = 1.0 - mean;
    let w = periodic_traveling_wave(&m, 0.0, c, &seed, &SolverConfig::default()).unwrap();
    assert!(w.residual_norm <= 1e-10);
    let phi = w.profile.values();
    let n = phi.len() as f64;
    assert!(phi.iter().sum::<f64>().abs() / n <= 1e-12);

    // independent residual: φ'' by finite spectral differentiation
    let f = w.profile.forward();
    let d2 = f.apply_multiplier(|k| benjamin_core::Complex64::new(-k * k, 0.0)).inverse();
    let a = w.periodic.unwrap().integration_constant;
    let res = phi
        .iter()
        .zip(d2.values())
        .map(|(p, pxx)| (pxx + 0.5 * p * p - c * p - a).abs())
        .fold(0.0, f64::max);
    assert!(res <= 1e-9, "{res:e}");
    // the shifted soliton solves the equation exactly on the line with A = c₀m - m²/2
    let expected = mean - 0.5 * mean * mean;
    assert!((a - expected).abs() <= 1e-3 * expected, "{a} vs {expected}");
}

#[test]
fn cnoidal_integration_constant_is_self_consistent() {
    let g = make_grid(256, 3.0).unwrap();
    let m = Model::ilw(1.0, 0.5).unwrap();
    let (seed, mean) = cnoidal_seed(&g, 1.0);
    let w = periodic_traveling_wave(&m, 0.05, 1.0 - mean, &seed, &SolverConfig::default()).unwrap();
    let a = w.periodic.unwrap().integration_constant;
    // A = (1/(4L')) ∫ φ² over the half-period L' = πL
    let lp = std::f64::consts::PI * g.scale();
    let quad = g.spacing() * w.profile.values().iter().map(|v| v * v).sum::<f64>() / (4.0 * lp);
    assert!((a - quad).abs() <= 1e-10 * quad.max(1.0), "{a} vs {quad}");
}

#[test]
fn zero_is_the_trivial_periodic_wave() {
    let g = make_grid(64, 1.0).unwrap();
    let m = Model::ilw(1.0, 1.0).unwrap();
    let w = periodic_traveling_wave(&m, 0.3, 0.7, &RealField::zeros(g), &SolverConfig::default()).unwrap();
    assert_eq!(w.profile.max_abs(), 0.0);
    assert_eq!(w.periodic.unwrap().integration_constant, 0.0);
}
