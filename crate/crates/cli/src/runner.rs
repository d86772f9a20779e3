//! Execution of one experiment config.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use benjamin_core::diagnostics::{
    extract_leading_structure, plateau_variation, radiation_split, sign_changes, Check, PlateauVerdict, RunReport,
    SpectralSplit,
};
use benjamin_core::evolution::{evolve_with, EvolveConfig, Trajectory};
use benjamin_core::model::Parameter;
use benjamin_core::traveling::{
    bo_soliton, existence_guard, far_field_ratio, kdv_soliton, newton_krylov_solve, nonexistence_threshold,
    tail_classify, trace_branch, Branch, Existence, SolitaryWave, SolverConfig, StepControl, Termination,
};
use benjamin_core::{Error, Family, Grid, Model, RealField};
use log::{info, warn};

use crate::config::{InitialSpec, Kind, LoadedConfig, Seed};
use crate::output;
use crate::snapshot::Snapshot;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const DIVERGED: i32 = 3;
    pub const BLOW_UP: i32 = 4;
    pub const CHECKS_FAILED: i32 = 5;
}

/// Environment variable naming the root directory for run outputs.
pub const OUT_ENV: &str = "BENJAMIN_OUT";

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub code: i32,
    pub reason: String,
    pub detail: String,
}

impl RunFailure {
    fn new(code: i32, reason: &str, detail: impl Into<String>) -> Self {
        RunFailure {
            code,
            reason: reason.to_string(),
            detail: detail.into(),
        }
    }

    pub fn config(detail: impl Into<String>) -> Self {
        RunFailure::new(exit::CONFIG, "config error", detail)
    }

    fn io(e: std::io::Error) -> Self {
        RunFailure::new(exit::IO, "io error", e.to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "status": "failed",
            "exit_code": self.code,
            "reason": self.reason,
            "detail": self.detail,
        })
        .to_string()
    }
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.reason, self.detail)
    }
}

impl std::error::Error for RunFailure {}

impl From<Error> for RunFailure {
    fn from(e: Error) -> Self {
        let detail = e.to_string();
        match e {
            Error::NonexistenceWindow { .. } => RunFailure::new(exit::DIVERGED, "nonexistence window", detail),
            Error::NewtonDiverged { .. } => RunFailure::new(exit::DIVERGED, "solver divergence", detail),
            Error::BlowUp { .. } => RunFailure::new(exit::BLOW_UP, "blow-up", detail),
            Error::InvalidArgument(_) | Error::GridMismatch(_) => RunFailure::config(detail),
            Error::NotClassifiable(_) | Error::NotFound(_) => RunFailure::new(exit::IO, "analysis failed", detail),
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub dir: PathBuf,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            exit::OK
        } else {
            exit::CHECKS_FAILED
        }
    }
}

/// Output directory: `[output] dir` if set (relative to the output root),
/// else `<root>/<name>` with the root taken from `BENJAMIN_OUT` or `runs`.
pub fn output_dir(cfg: &LoadedConfig) -> PathBuf {
    let root = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("runs"));
    match &cfg.config.output.dir {
        Some(d) if d.is_absolute() => d.clone(),
        Some(d) => root.join(d),
        None => root.join(&cfg.config.name),
    }
}

struct Ctx<'a> {
    cfg: &'a LoadedConfig,
    grid: Arc<Grid>,
    model: Model,
    solver: SolverConfig,
    dir: &'a Path,
    report: RunReport,
}

/// Run `cfg`, writing artifacts into `dir`. A failure is also recorded as
/// `failure.json` in `dir` when the directory is writable.
pub fn run(cfg: &LoadedConfig, dir: &Path) -> Result<RunOutcome, RunFailure> {
    std::fs::create_dir_all(dir).map_err(RunFailure::io)?;
    let res = run_inner(cfg, dir);
    if let Err(f) = &res {
        let _ = std::fs::write(dir.join("failure.json"), f.to_json() + "\n");
    } else {
        let _ = std::fs::remove_file(dir.join("failure.json"));
    }
    res
}

fn run_inner(cfg: &LoadedConfig, dir: &Path) -> Result<RunOutcome, RunFailure> {
    let c = &cfg.config;
    let mut report = RunReport::new(&c.name, c.kind.as_str());
    report.config = flatten_config(cfg);
    let mut ctx = Ctx {
        cfg,
        grid: c.grid.build()?,
        model: c.model.build()?,
        solver: cfg.solver(),
        dir,
        report,
    };
    info!("running {} ({})", c.name, c.kind.as_str());
    match c.kind {
        Kind::SolveWave => ctx.solve_wave()?,
        Kind::TraceBranch => ctx.trace()?,
        Kind::Evolve => ctx.evolve(false)?,
        Kind::ResolutionTest => ctx.evolve(true)?,
        Kind::StabilityTest => ctx.stability()?,
    }
    ctx.apply_expectations();
    let mut report = ctx.report;
    sanitize(&mut report);
    output::write_report(dir, &report).map_err(RunFailure::io)?;
    Ok(RunOutcome {
        report,
        dir: dir.to_path_buf(),
    })
}

fn flatten_config(cfg: &LoadedConfig) -> BTreeMap<String, String> {
    fn walk(prefix: &str, v: &toml::Value, out: &mut BTreeMap<String, String>) {
        match v {
            toml::Value::Table(t) => {
                for (k, v) in t {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, v, out);
                }
            }
            other => {
                out.insert(prefix.to_string(), other.to_string());
            }
        }
    }
    let mut out = BTreeMap::new();
    if let Ok(v) = toml::Value::try_from(&cfg.config) {
        walk("", &v, &mut out);
    }
    out
}

/// JSON has no representation for non-finite numbers; drop them so that
/// reports always read back.
fn sanitize(r: &mut RunReport) {
    r.metrics.retain(|_, v| v.is_finite());
    r.conservation.retain(|_, v| v.is_finite());
    if let Some(t) = &r.tail {
        let vals = [t.constant_or_rate, t.algebraic_constant, t.algebraic_misfit, t.exponential_rate, t.exponential_misfit];
        if vals.iter().any(|v| !v.is_finite()) {
            r.tail = None;
        }
    }
    if r.plateau.is_some_and(|p| !p.variation.is_finite()) {
        r.plateau = None;
    }
    for c in &mut r.checks {
        if !c.value.is_finite() {
            c.value = f64::MAX.copysign(c.value);
            c.passed = false;
        }
    }
}

fn termination_code(t: Termination) -> f64 {
    match t {
        Termination::Completed => 0.0,
        Termination::NewtonDiverged => 1.0,
        Termination::Delocalized => 2.0,
    }
}

fn set_parameter(model: &Model, p: Parameter, v: f64) -> Result<Model, RunFailure> {
    Ok(model.with_parameter(p, v)?)
}

impl Ctx<'_> {
    fn metric(&mut self, k: impl Into<String>, v: f64) {
        self.report.metrics.insert(k.into(), v);
    }

    fn velocity(&self) -> Result<f64, RunFailure> {
        self.cfg
            .config
            .wave
            .map(|w| w.c)
            .ok_or_else(|| RunFailure::config("missing [wave] section"))
    }

    fn write_snapshot(&self, name: &str, f: &RealField, t: f64, model: &Model, c: Option<f64>) -> Result<(), RunFailure> {
        if !self.cfg.config.output.snapshots {
            return Ok(());
        }
        Snapshot::new(f, t, model, c).write(&self.dir.join(name)).map_err(RunFailure::io)
    }

    /// Field for an initial-data spec; solitary-wave specs also return the wave.
    fn build(&self, spec: &InitialSpec) -> Result<(RealField, Option<SolitaryWave>), RunFailure> {
        let g = &self.grid;
        match spec {
            InitialSpec::KdvSoliton { c, beta } => Ok((kdv_soliton(*c, *beta, g)?, None)),
            InitialSpec::BoSoliton { c } => Ok((bo_soliton(*c, g)?, None)),
            InitialSpec::Gaussian { amplitude, center, width } => Ok((
                RealField::from_fn(g.clone(), |x| amplitude * (-((x - center) / width).powi(2)).exp()),
                None,
            )),
            InitialSpec::WaveFile { path } => {
                let p = self.cfg.resolve_path(path);
                let s = Snapshot::read(&p).map_err(|e| RunFailure::config(format!("{}: {e}", p.display())))?;
                let f = s.field().map_err(|e| RunFailure::config(format!("{}: {e}", p.display())))?;
                if f.grid().n_modes() != g.n_modes() || f.grid().scale() != g.scale() {
                    return Err(RunFailure::config(format!(
                        "{} holds N = {}, L = {} but [grid] asks N = {}, L = {}",
                        p.display(),
                        f.grid().n_modes(),
                        f.grid().scale(),
                        g.n_modes(),
                        g.scale()
                    )));
                }
                let f = RealField::new(g.clone(), f.into_values())?;
                Ok((f, None))
            }
            InitialSpec::TracedWave { seed, seed_c, start, stages, polish } => {
                let c_end = self.velocity()?;
                let c0 = start.c.unwrap_or(c_end);
                let mut m0 = self.model;
                for (p, v) in [(Parameter::Alpha, start.alpha), (Parameter::Beta, start.beta), (Parameter::Delta, start.delta)] {
                    if let Some(v) = v {
                        m0 = set_parameter(&m0, p, v)?;
                    }
                }
                let sc = seed_c.unwrap_or(c0);
                let seed_field = match seed {
                    Seed::KdvSoliton => kdv_soliton(sc, m0.beta(), g)?,
                    Seed::BoSoliton => bo_soliton(sc, g)?,
                };
                let mut w = newton_krylov_solve(&seed_field, &m0, c0, &self.solver)?;
                for (i, st) in stages.iter().enumerate() {
                    let targets = st.targets().map_err(RunFailure::config)?;
                    let b = trace_branch(&w, st.parameter, &targets, &StepControl::default(), &self.solver)?;
                    if b.termination != Termination::Completed {
                        return Err(RunFailure::new(
                            exit::DIVERGED,
                            "solver divergence",
                            format!(
                                "stage {i} in {} ended {:?} before {:?} (last converged {})",
                                st.parameter,
                                b.termination,
                                b.stopped_at,
                                b.last().value
                            ),
                        ));
                    }
                    w = b.last().wave.clone();
                }
                if let Some(p) = polish {
                    w = newton_krylov_solve(&w.profile, &w.model, w.velocity, &p.apply(self.solver))?;
                }
                if w.model != self.model || w.velocity != c_end {
                    return Err(RunFailure::config(format!(
                        "traced wave ends at {:?}, c = {} but the config asks for {:?}, c = {c_end}",
                        w.model, w.velocity, self.model
                    )));
                }
                Ok((w.profile.clone(), Some(w)))
            }
        }
    }

    fn wave_metrics(&mut self, prefix: &str, w: &SolitaryWave) {
        let floor = self.cfg.config.analysis.sign_change_floor;
        let m = |s: &str| format!("{prefix}{s}");
        self.metric(m("velocity"), w.velocity);
        self.metric(m("residual"), w.residual_norm);
        self.metric(m("newton_iterations"), w.newton_iterations as f64);
        self.metric(m("peak"), w.peak());
        self.metric(m("energy"), w.energy);
        self.metric(m("spectral_tail"), w.spectral_tail);
        self.metric(m("spectral_tail_rel"), w.spectral_tail / w.profile.forward().max_abs());
        self.metric(m("boundary_tail"), w.boundary_tail);
        self.metric(m("far_field_ratio"), far_field_ratio(&w.profile));
        self.metric(m("evenness_defect"), w.profile.evenness_defect());
        self.metric(m("sign_changes"), sign_changes(&w.profile, floor) as f64);
        if let Some(p) = w.pohozaev_relative() {
            self.metric(m("pohozaev_rel"), p);
        }
    }

    fn classify(&mut self, w: &SolitaryWave) {
        match tail_classify(w) {
            Ok(fit) => self.report.tail = Some(fit),
            Err(e) => info!("tail not classified: {e}"),
        }
    }

    fn guard(&mut self, c: f64) -> Result<(), RunFailure> {
        let e = existence_guard(&self.model, c);
        self.report.config.insert("existence".into(), format!("{e:?}"));
        if e == Existence::Nonexistent && !self.solver.force {
            return Err(Error::NonexistenceWindow {
                c,
                threshold: nonexistence_threshold(&self.model),
            }
            .into());
        }
        Ok(())
    }

    fn solve_start(&mut self) -> Result<SolitaryWave, RunFailure> {
        let c = self.velocity()?;
        self.guard(c)?;
        let (seed, wave) = self.build(&self.cfg.config.initial.clone())?;
        match wave {
            Some(w) if w.model == self.model && w.velocity == c => Ok(w),
            _ => Ok(newton_krylov_solve(&seed, &self.model, c, &self.solver)?),
        }
    }

    fn solve_wave(&mut self) -> Result<(), RunFailure> {
        let w = self.solve_start()?;
        self.wave_metrics("", &w);
        self.classify(&w);
        if let Some(spec) = self.cfg.config.reference.clone() {
            let (_, r) = self.build(&spec)?;
            let r = r.ok_or_else(|| RunFailure::config("[reference] must describe a solitary wave (traced_wave)"))?;
            self.wave_metrics("reference.", &r);
            self.metric("energy_ratio", w.energy / r.energy);
        }
        self.write_snapshot("wave.snap", &w.profile, 0.0, &w.model, Some(w.velocity))
    }

    fn trace(&mut self) -> Result<(), RunFailure> {
        let start = self.solve_start()?;
        let sec = self.cfg.config.branch.clone().expect("validated");
        let targets = sec.targets().map_err(RunFailure::config)?;
        let b = trace_branch(&start, sec.parameter, &targets, &sec.step_control(), &self.solver)?;
        let floor = self.cfg.config.analysis.sign_change_floor;
        std::fs::write(self.dir.join("branch.csv"), output::branch_csv(&b, floor)).map_err(RunFailure::io)?;
        if sec.save_profiles {
            for (i, p) in b.points.iter().enumerate() {
                self.write_snapshot(&format!("branch_{i:04}.snap"), &p.wave.profile, 0.0, &p.wave.model, Some(p.wave.velocity))?;
            }
        }
        self.branch_metrics(&b);
        self.classify(&b.last().wave.clone());
        Ok(())
    }

    fn branch_metrics(&mut self, b: &Branch) {
        let floor = self.cfg.config.analysis.sign_change_floor;
        let waves: Vec<&SolitaryWave> = b.points.iter().map(|p| &p.wave).collect();
        let max = |f: &dyn Fn(&SolitaryWave) -> f64| waves.iter().map(|w| f(w)).fold(f64::NEG_INFINITY, f64::max);
        self.report.config.insert("termination".into(), format!("{:?}", b.termination));
        self.metric("termination", termination_code(b.termination));
        self.metric("completed", if b.termination == Termination::Completed { 1.0 } else { 0.0 });
        self.metric("points", b.points.len() as f64);
        self.metric("first_value", b.points[0].value);
        self.metric("last_value", b.last().value);
        if let Some(s) = b.stopped_at {
            self.metric("stopped_at", s);
        }
        self.metric("max_residual", max(&|w| w.residual_norm));
        self.metric("max_spectral_tail", max(&|w| w.spectral_tail));
        self.metric("max_boundary_tail", max(&|w| w.boundary_tail));
        self.metric("max_far_field_ratio", max(&|w| far_field_ratio(&w.profile)));
        if waves.iter().all(|w| w.pohozaev.is_some()) {
            self.metric("max_pohozaev_rel", max(&|w| w.pohozaev_relative().unwrap()));
        }
        let decreasing = waves.windows(2).all(|p| p[1].peak().abs() < p[0].peak().abs());
        self.metric("peaks_strictly_decreasing", if decreasing { 1.0 } else { 0.0 });
        self.metric("first_peak", waves[0].peak());
        self.metric("last_peak", b.last().wave.peak());
        let last_sc = sign_changes(&b.last().wave.profile, floor) as f64;
        self.metric("last_sign_changes", last_sc);
        if let Some(v) = self.cfg.config.analysis.compare_at {
            if let Some(p) = b.points.iter().find(|p| (p.value - v).abs() <= 1e-12) {
                let sc = sign_changes(&p.wave.profile, floor) as f64;
                self.metric("compare_sign_changes", sc);
                self.metric("sign_change_increase", last_sc - sc);
            } else {
                warn!("branch holds no point at {v}");
            }
        }
    }

    fn evolve_cfg(&self) -> EvolveConfig {
        let e = self.cfg.config.evolution.expect("validated");
        EvolveConfig {
            t_end: e.t_end,
            n_steps: e.n_steps,
            snapshot_stride: e.snapshot_stride,
            dealias: e.dealias,
            blowup_bound: e.blowup_bound,
            exec: self.cfg.exec(),
            ..Default::default()
        }
    }

    /// Evolve and write series; blow-ups still write the partial series.
    fn integrate(&mut self, u0: &RealField, tag: &str) -> Result<Trajectory, RunFailure> {
        let ecfg = self.evolve_cfg();
        match evolve_with(u0, &self.model, &ecfg) {
            Ok(tr) => {
                std::fs::write(self.dir.join(format!("series{tag}.csv")), output::series_csv(&tr)).map_err(RunFailure::io)?;
                Ok(tr)
            }
            Err(Error::BlowUp { time, reason, trajectory }) => {
                let _ = std::fs::write(self.dir.join(format!("series{tag}.csv")), output::series_csv(&trajectory));
                Err(RunFailure::new(exit::BLOW_UP, "blow-up", format!("t = {time}: {reason}")))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn trajectory_metrics(&mut self, tr: &Trajectory, prefix: &str) {
        let s = &tr.series;
        self.report.conservation.insert(format!("{prefix}energy"), s.max_energy_drift());
        self.report.conservation.insert(format!("{prefix}mass"), s.max_mass_drift());
        self.metric(format!("{prefix}energy_drift_max"), s.max_energy_drift());
        self.metric(format!("{prefix}mass_drift_max"), s.max_mass_drift());
        self.metric(format!("{prefix}linf_final"), *s.linf.last().unwrap());
        self.metric(format!("{prefix}spectral_tail_final"), *s.spectral_tail.last().unwrap());
        self.metric(format!("{prefix}final_time"), tr.final_time());
    }

    fn plateau(&mut self, tr: &Trajectory) {
        let a = self.cfg.config.analysis;
        match plateau_variation(&tr.series.linf, a.plateau_window) {
            Ok(v) => {
                self.report.plateau = Some(PlateauVerdict {
                    window_fraction: a.plateau_window,
                    rel_tol: a.plateau_rel_tol,
                    variation: v,
                    plateau: v < a.plateau_rel_tol,
                });
                self.metric("plateau_variation", v);
                self.metric("plateau", if v < a.plateau_rel_tol { 1.0 } else { 0.0 });
            }
            Err(e) => warn!("no plateau verdict: {e}"),
        }
    }

    fn split(&mut self, u0: &RealField, u1: &RealField) -> Result<Option<SpectralSplit>, RunFailure> {
        let m = self.model;
        if m.family() != Family::Benjamin || !(m.alpha() > 0.0) {
            return Ok(None);
        }
        let (l0, r0) = radiation_split(&u0.forward(), &m)?;
        let (l1, r1) = radiation_split(&u1.forward(), &m)?;
        Ok(Some(SpectralSplit {
            k_star: m.alpha() / m.beta(),
            left_initial: l0,
            right_initial: r0,
            left_final: l1,
            right_final: r1,
        }))
    }

    fn evolve(&mut self, resolution: bool) -> Result<(), RunFailure> {
        let (u0, wave) = self.build(&self.cfg.config.initial.clone())?;
        let tr = self.integrate(&u0, "")?;
        let fin = tr.final_state.clone().expect("completed run");
        for (i, (t, f)) in tr.snapshots.iter().enumerate() {
            self.write_snapshot(&format!("snap_{i:05}.snap"), f, *t, &self.model, None)?;
        }
        self.write_snapshot("final.snap", &fin, tr.final_time(), &self.model, None)?;
        self.trajectory_metrics(&tr, "");
        self.plateau(&tr);
        if let Some(s) = self.split(&u0, &fin)? {
            self.metric("right_share_initial", s.right_share_initial());
            self.metric("right_share_final", s.right_share_final());
            if s.right_share_initial() > 0.0 {
                self.metric("right_share_growth", s.right_share_final() / s.right_share_initial());
            }
            self.report.spectral_split = Some(s);
        }
        if let Some(w) = wave {
            let moved = w.profile.translate(w.velocity * tr.final_time());
            self.metric("translation_error", fin.max_abs_diff(&moved)?);
            self.wave_metrics("wave.", &w);
        }
        if resolution || self.cfg.config.analysis.leading_structure {
            self.leading(&tr)?;
        }
        Ok(())
    }

    fn leading(&mut self, tr: &Trajectory) -> Result<(), RunFailure> {
        let ls = extract_leading_structure(&tr.snapshots)?;
        self.metric("leading_speed", ls.speed);
        self.metric("leading_amplitude", ls.amplitude);
        self.metric("leading_position", ls.position);
        self.metric("leading_width_points", ls.width_points as f64);
        self.write_snapshot("leading_window.snap", &ls.window, tr.final_time(), &self.model, Some(ls.speed))?;
        let mut cfg = self.solver;
        cfg.force = true;
        match newton_krylov_solve(&ls.window, &self.model, ls.speed, &cfg) {
            Ok(w) => {
                self.metric("resolve_converged", 1.0);
                self.wave_metrics("resolved.", &w);
                self.classify(&w);
                self.write_snapshot("resolved.snap", &w.profile, 0.0, &w.model, Some(w.velocity))?;
            }
            Err(Error::NewtonDiverged { last_residual, .. }) => {
                self.metric("resolve_converged", 0.0);
                self.metric("resolved.residual", last_residual);
            }
            Err(e) => return Err(e.into()),
        }
        Ok(())
    }

    fn stability(&mut self) -> Result<(), RunFailure> {
        let (q, wave) = self.build(&self.cfg.config.initial.clone())?;
        let c = match wave {
            Some(w) => w.velocity,
            None => self.velocity()?,
        };
        let p = self.cfg.config.perturbation.clone().expect("validated");
        let (mut worst_dev, mut worst_growth, mut worst_drift) = (0.0f64, f64::INFINITY, 0.0f64);
        for (i, &a) in p.amplitudes.iter().enumerate() {
            let bump = RealField::from_fn(self.grid.clone(), |x| a * (-((x - p.center) / p.width).powi(2)).exp());
            let u0 = q.add(&bump)?;
            let tag = format!("_amp{i}");
            let tr = self.integrate(&u0, &tag)?;
            let fin = tr.final_state.clone().expect("completed run");
            self.write_snapshot(&format!("final{tag}.snap"), &fin, tr.final_time(), &self.model, None)?;
            let pre = format!("amp{i}.");
            self.trajectory_metrics(&tr, &pre);
            self.metric(format!("{pre}amplitude"), a);
            let dev = (fin.peak() - q.peak()).abs() / q.peak().abs();
            self.metric(format!("{pre}peak_deviation"), dev);
            let moved = q.translate(c * tr.final_time());
            let rest = fin.add(&moved.scaled(-1.0))?;
            if let Some(s) = self.split(&bump, &rest)? {
                self.metric(format!("{pre}left_share_initial"), s.left_share_initial());
                self.metric(format!("{pre}left_share_final"), s.left_share_final());
                let g = s.left_share_final() - s.left_share_initial();
                self.metric(format!("{pre}left_share_gain"), g);
                worst_growth = worst_growth.min(g);
            }
            worst_dev = worst_dev.max(dev);
            worst_drift = worst_drift.max(tr.series.max_energy_drift());
        }
        self.metric("max_peak_deviation", worst_dev);
        self.metric("max_energy_drift", worst_drift);
        if worst_growth.is_finite() {
            self.metric("min_left_share_gain", worst_growth);
        }
        Ok(())
    }

    fn apply_expectations(&mut self) {
        for e in self.cfg.config.expect.clone() {
            let check = match self.report.metrics.get(&e.metric) {
                Some(&v) => Check::new(&e.metric, v, e.op, e.value),
                None => Check::flag(format!("{} (metric missing)", e.metric), false),
            };
            self.report.check(check);
        }
    }
}
