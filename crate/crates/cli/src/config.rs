//! Experiment configuration files.
//!
//! A `.cfg` file is a set of flat sections of `key = value` pairs in TOML
//! syntax. Unknown keys are rejected so that typos surface as parse errors.

use std::path::{Path, PathBuf};

use benjamin_core::diagnostics::{Comparator, PLATEAU_REL_TOL, PLATEAU_WINDOW};
use benjamin_core::model::Parameter;
use benjamin_core::spectral::{make_grid, Dealias};
use benjamin_core::traveling::{GmresConfig, SolverConfig, StepControl};
use benjamin_core::{ExecPolicy, Family, Grid, Model};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    SolveWave,
    TraceBranch,
    Evolve,
    StabilityTest,
    ResolutionTest,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::SolveWave => "solve_wave",
            Kind::TraceBranch => "trace_branch",
            Kind::Evolve => "evolve",
            Kind::StabilityTest => "stability_test",
            Kind::ResolutionTest => "resolution_test",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: Kind,
    /// Human description of what the run reproduces.
    #[serde(default)]
    pub figure: String,
    /// Expected wall-clock budget on a laptop.
    #[serde(default)]
    pub budget_seconds: Option<f64>,
    #[serde(default)]
    pub exec: Option<ExecPolicy>,
    pub model: ModelSection,
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub wave: Option<WaveSection>,
    pub initial: InitialSpec,
    #[serde(default)]
    pub reference: Option<InitialSpec>,
    #[serde(default)]
    pub branch: Option<BranchSection>,
    #[serde(default)]
    pub evolution: Option<EvolutionSection>,
    #[serde(default)]
    pub perturbation: Option<PerturbationSection>,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub expect: Vec<Expectation>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub family: Family,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub delta1: f64,
    #[serde(default)]
    pub delta2: f64,
}

impl ModelSection {
    pub fn build(&self) -> benjamin_core::Result<Model> {
        Model::from_parts(self.family, self.alpha, self.beta, self.delta, self.delta1, self.delta2)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub l: f64,
}

impl GridSection {
    pub fn build(&self) -> benjamin_core::Result<Arc<Grid>> {
        make_grid(self.n, self.l)
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub gmres_restart: Option<usize>,
    pub gmres_rel_tol: Option<f64>,
    pub gmres_max_iter: Option<usize>,
    pub precondition: Option<bool>,
    pub line_search: Option<bool>,
    pub force: Option<bool>,
    pub dealias: Option<Dealias>,
}

impl SolverSection {
    pub fn apply(&self, base: SolverConfig) -> SolverConfig {
        let g = base.gmres;
        SolverConfig {
            tol: self.tol.unwrap_or(base.tol),
            max_iter: self.max_iter.unwrap_or(base.max_iter),
            gmres: GmresConfig {
                restart: self.gmres_restart.unwrap_or(g.restart),
                rel_tol: self.gmres_rel_tol.unwrap_or(g.rel_tol),
                max_iter: self.gmres_max_iter.unwrap_or(g.max_iter),
            },
            precondition: self.precondition.unwrap_or(base.precondition),
            line_search: self.line_search.unwrap_or(base.line_search),
            force: self.force.unwrap_or(base.force),
            dealias: self.dealias.unwrap_or(base.dealias),
            ..base
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSection {
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seed {
    KdvSoliton,
    BoSoliton,
}

/// Initial data for evolutions, or the seed of a Newton solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    KdvSoliton {
        c: f64,
        beta: f64,
    },
    BoSoliton {
        c: f64,
    },
    /// `amplitude · exp(-((x - center)/width)²)`.
    Gaussian {
        amplitude: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
    },
    /// A snapshot written by an earlier run; relative paths are resolved
    /// against the config file's directory.
    WaveFile {
        path: PathBuf,
    },
    /// A solitary wave obtained by solving from a closed-form seed at a start
    /// model and continuing through one or more parameter stages until the
    /// `[model]` section is reached.
    TracedWave {
        seed: Seed,
        #[serde(default)]
        seed_c: Option<f64>,
        #[serde(default)]
        start: StartOverrides,
        #[serde(default)]
        stages: Vec<Stage>,
        /// Final re-solve with tighter settings.
        #[serde(default)]
        polish: Option<SolverSection>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartOverrides {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub c: Option<f64>,
}

/// A monotone list of parameter values, either explicit, as an arithmetic
/// range `from → to` with spacing `step`, or both (merged and sorted).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    #[serde(default)]
    pub values: Vec<f64>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub step: Option<f64>,
}

impl Targets {
    pub fn resolve(&self) -> Result<Vec<f64>, String> {
        let mut out = self.values.clone();
        match (self.from, self.to, self.step) {
            (Some(a), Some(b), Some(h)) => {
                if !(h > 0.0) || !a.is_finite() || !b.is_finite() {
                    return Err(format!("invalid range from {a} to {b} step {h}"));
                }
                let n = ((b - a).abs() / h + 1e-9).floor() as usize;
                let dir = (b - a).signum();
                for i in 1..=n {
                    // rounded to 12 digits so that 0.1-type steps hit their decimal values
                    let v = a + dir * i as f64 * h;
                    out.push((v * 1e12).round() / 1e12);
                }
                if (out.last().copied().unwrap_or(a) - b).abs() > 1e-12 && n > 0 {
                    out.push(b);
                }
            }
            (None, None, None) => {}
            _ => return Err("a range needs all of from, to and step".into()),
        }
        if out.is_empty() {
            return Err("no target values".into());
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err("target values must be finite".into());
        }
        let increasing = match (self.from, self.to) {
            (Some(a), Some(b)) => b >= a,
            _ => out.last() >= out.first(),
        };
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        if !increasing {
            out.reverse();
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    pub parameter: Parameter,
    #[serde(default)]
    pub values: Vec<f64>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub step: Option<f64>,
}

impl Stage {
    pub fn targets(&self) -> Result<Vec<f64>, String> {
        Targets {
            values: self.values.clone(),
            from: self.from,
            to: self.to,
            step: self.step,
        }
        .resolve()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSection {
    pub parameter: Parameter,
    #[serde(default)]
    pub values: Vec<f64>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub step: Option<f64>,
    /// Write one snapshot per branch point.
    #[serde(default)]
    pub save_profiles: bool,
    pub min_rel_step: Option<f64>,
    pub delocalization_threshold: Option<f64>,
    pub relative_to_peak: Option<bool>,
    /// Far-field ratio bound; a negative value disables the far-field test.
    pub max_decay_ratio: Option<f64>,
}

impl BranchSection {
    pub fn targets(&self) -> Result<Vec<f64>, String> {
        Targets {
            values: self.values.clone(),
            from: self.from,
            to: self.to,
            step: self.step,
        }
        .resolve()
    }

    pub fn step_control(&self) -> StepControl {
        let d = StepControl::default();
        StepControl {
            min_rel_step: self.min_rel_step.unwrap_or(d.min_rel_step),
            delocalization_threshold: self.delocalization_threshold.unwrap_or(d.delocalization_threshold),
            relative_to_peak: self.relative_to_peak.unwrap_or(d.relative_to_peak),
            max_decay_ratio: match self.max_decay_ratio {
                Some(r) if r < 0.0 => None,
                Some(r) => Some(r),
                None => d.max_decay_ratio,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    pub t_end: f64,
    pub n_steps: usize,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default)]
    pub dealias: Dealias,
    #[serde(default = "default_blowup")]
    pub blowup_bound: f64,
}

fn default_stride() -> usize {
    100
}

fn default_blowup() -> f64 {
    1e6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSection {
    pub amplitudes: Vec<f64>,
    #[serde(default = "one")]
    pub width: f64,
    #[serde(default)]
    pub center: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(default = "default_window")]
    pub plateau_window: f64,
    #[serde(default = "default_rel_tol")]
    pub plateau_rel_tol: f64,
    /// Isolate the leading hump at the final time and re-solve it.
    #[serde(default)]
    pub leading_structure: bool,
    /// Samples below this fraction of the peak are ignored when counting sign changes.
    #[serde(default = "default_floor")]
    pub sign_change_floor: f64,
    /// Branch value whose profile serves as the baseline for sign-change counts.
    #[serde(default)]
    pub compare_at: Option<f64>,
}

fn default_window() -> f64 {
    PLATEAU_WINDOW
}

fn default_rel_tol() -> f64 {
    PLATEAU_REL_TOL
}

fn default_floor() -> f64 {
    1e-6
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            plateau_window: PLATEAU_WINDOW,
            plateau_rel_tol: PLATEAU_REL_TOL,
            leading_structure: false,
            sign_change_floor: default_floor(),
            compare_at: None,
        }
    }
}

/// A pass/fail expectation on a report metric.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub metric: String,
    pub op: Comparator,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    /// Write field snapshots (series, reports and branch tables are always written).
    #[serde(default = "yes")]
    pub snapshots: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: None, snapshots: true }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// A parsed config together with the directory its relative paths refer to.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub base_dir: PathBuf,
}

pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<LoadedConfig, ConfigError> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
    let loaded = LoadedConfig {
        config,
        base_dir: base_dir.into(),
    };
    loaded.validate()?;
    Ok(loaded)
}

pub fn load(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse(&text, base).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

impl LoadedConfig {
    pub fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.config;
        let err = |m: String| Err(ConfigError(m));
        if c.name.trim().is_empty() {
            return err("name must not be empty".into());
        }
        c.model.build().map_err(|e| ConfigError(format!("[model]: {e}")))?;
        c.grid.build().map_err(|e| ConfigError(format!("[grid]: {e}")))?;
        let needs_wave = matches!(c.kind, Kind::SolveWave | Kind::TraceBranch | Kind::StabilityTest)
            || matches!(c.initial, InitialSpec::TracedWave { .. });
        if needs_wave && c.wave.is_none() {
            return err(format!("kind {} needs a [wave] section with the velocity c", c.kind.as_str()));
        }
        match c.kind {
            Kind::TraceBranch => match &c.branch {
                None => return err("trace_branch needs a [branch] section".into()),
                Some(b) => {
                    b.targets().map_err(|e| ConfigError(format!("[branch]: {e}")))?;
                }
            },
            Kind::Evolve | Kind::StabilityTest | Kind::ResolutionTest => {
                let Some(ev) = &c.evolution else {
                    return err(format!("kind {} needs an [evolution] section", c.kind.as_str()));
                };
                if !(ev.t_end > 0.0) || ev.n_steps == 0 {
                    return err("[evolution] needs t_end > 0 and n_steps ≥ 1".into());
                }
            }
            Kind::SolveWave => {}
        }
        if c.kind == Kind::StabilityTest {
            match &c.perturbation {
                Some(p) if !p.amplitudes.is_empty() && p.width > 0.0 => {}
                _ => return err("stability_test needs [perturbation] with amplitudes and a positive width".into()),
            }
            if !matches!(c.initial, InitialSpec::TracedWave { .. } | InitialSpec::WaveFile { .. }) {
                return err("stability_test perturbs a solitary wave: initial must be traced_wave or wave_file".into());
            }
        }
        for spec in std::iter::once(&c.initial).chain(c.reference.iter()) {
            self.validate_initial(spec)?;
        }
        if !(c.analysis.plateau_window > 0.0 && c.analysis.plateau_window <= 1.0) || !(c.analysis.plateau_rel_tol > 0.0) {
            return err("[analysis] plateau_window must lie in (0, 1] and plateau_rel_tol be positive".into());
        }
        Ok(())
    }

    fn validate_initial(&self, spec: &InitialSpec) -> Result<(), ConfigError> {
        match spec {
            InitialSpec::WaveFile { path } => {
                let p = self.resolve_path(path);
                if !p.is_file() {
                    return Err(ConfigError(format!("wave_file {} does not exist", p.display())));
                }
            }
            InitialSpec::TracedWave { stages, .. } => {
                for (i, s) in stages.iter().enumerate() {
                    s.targets().map_err(|e| ConfigError(format!("stage {i}: {e}")))?;
                }
            }
            InitialSpec::Gaussian { width, .. } if !(*width > 0.0) => {
                return Err(ConfigError("gaussian width must be positive".into()));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn solver(&self) -> SolverConfig {
        let mut s = self.config.solver.apply(SolverConfig::default());
        if let Some(e) = self.config.exec {
            s.exec = e;
        }
        s
    }

    pub fn exec(&self) -> ExecPolicy {
        self.config.exec.unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
kind = "solve_wave"
[model]
family = "benjamin"
alpha = 1.0
beta = 1.0
[grid]
n = 64
l = 2.0
[wave]
c = -1.0
[initial]
type = "kdv_soliton"
c = -1.0
beta = 1.0
"#;

    #[test]
    fn minimal_config_parses() {
        let c = parse(MINIMAL, ".").unwrap();
        assert_eq!(c.config.kind, Kind::SolveWave);
        assert_eq!(c.solver().tol, 1e-10);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("n = 64", "n = 64\nnn = 3");
        assert!(parse(&text, ".").is_err());
    }

    #[test]
    fn odd_grid_is_rejected() {
        assert!(parse(&MINIMAL.replace("n = 64", "n = 63"), ".").is_err());
    }

    #[test]
    fn ranges_hit_their_endpoints() {
        let t = Targets {
            values: vec![1.96, 1.97],
            from: Some(0.0),
            to: Some(1.95),
            step: Some(0.05),
        };
        let v = t.resolve().unwrap();
        assert_eq!(v.len(), 41);
        assert_eq!(v[0], 0.05);
        assert_eq!(v[38], 1.95);
        assert_eq!(*v.last().unwrap(), 1.97);
        let down = Targets {
            values: vec![],
            from: Some(1000.0),
            to: Some(0.9),
            step: Some(333.0),
        };
        assert_eq!(down.resolve().unwrap(), vec![667.0, 334.0, 1.0, 0.9]);
    }
}
