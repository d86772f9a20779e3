//! CSV tables and report files.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use benjamin_core::diagnostics::{sign_changes, RunReport};
use benjamin_core::evolution::Trajectory;
use benjamin_core::traveling::{far_field_ratio, Branch};

pub const SERIES_HEADER: &str = "t,Linf,energy_rel_drift,mass_rel_drift,spectral_tail";
pub const BRANCH_HEADER: &str = "index,value,c,alpha,beta,delta,peak,residual,newton_iterations,spectral_tail,boundary_tail,far_field_ratio,energy,pohozaev_rel,sign_changes";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn series_csv(tr: &Trajectory) -> String {
    let s = &tr.series;
    let mut out = String::with_capacity(96 * tr.times.len());
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for i in 0..tr.times.len() {
        let row = [tr.times[i], s.linf[i], s.energy_rel_drift[i], s.mass_rel_drift[i], s.spectral_tail[i]];
        let cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn branch_csv(b: &Branch, sign_floor: f64) -> String {
    let mut out = String::new();
    out.push_str(BRANCH_HEADER);
    out.push('\n');
    for (i, p) in b.points.iter().enumerate() {
        let w = &p.wave;
        let m = &w.model;
        let cells = [
            num(p.value),
            num(w.velocity),
            num(m.alpha()),
            num(m.beta()),
            num(m.delta()),
            num(w.peak()),
            num(w.residual_norm),
            w.newton_iterations.to_string(),
            num(w.spectral_tail),
            num(w.boundary_tail),
            num(far_field_ratio(&w.profile)),
            num(w.energy),
            num(w.pohozaev_relative().unwrap_or(f64::NAN)),
            sign_changes(&w.profile, sign_floor).to_string(),
        ];
        let _ = writeln!(out, "{i},{}", cells.join(","));
    }
    out
}

pub fn write_report(dir: &Path, report: &RunReport) -> io::Result<()> {
    let json = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
    std::fs::write(dir.join("report.json"), json + "\n")?;
    std::fs::write(dir.join("report.txt"), report.to_string())
}

pub fn read_report(path: &Path) -> io::Result<RunReport> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}
