use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use benjamin_cli::output::{read_report, SERIES_HEADER};
use benjamin_cli::registry;
use benjamin_cli::snapshot::Snapshot;

fn benjamin(args: &[&str], out_root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_benjamin"))
        .args(args)
        .env("BENJAMIN_OUT", out_root)
        .output()
        .expect("spawn benjamin")
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(format!("{name}.cfg"));
    fs::write(&p, format!("name = \"{name}\"\n{body}")).unwrap();
    p
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).unwrap_or_else(|| panic!("no JSON on stderr: {text}"));
    serde_json::from_str(line).unwrap()
}

const SMALL_WAVE: &str = r#"
kind = "solve_wave"
[model]
family = "benjamin"
alpha = 1.0
beta = 1.0
[grid]
n = 256
l = 10.0
[wave]
c = -1.0
[initial]
type = "kdv_soliton"
c = -1.0
beta = 1.0
"#;

const SMALL_EVOLVE: &str = r#"
kind = "evolve"
[model]
family = "benjamin"
alpha = 1.0
beta = 1.0
[grid]
n = 128
l = 8.0
[initial]
type = "gaussian"
amplitude = -2.0
[evolution]
t_end = 0.5
n_steps = 200
snapshot_stride = 50
"#;

#[test]
fn malformed_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write_cfg(tmp.path(), "bad", "kind = \"solve_wave\"\n[grid]\nn = 100\nl = 1.0\nbogus = 3\n");
    let o = benjamin(&["run", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["reason"], "config error");
}

#[test]
fn unknown_config_name_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = benjamin(&["run", "no_such_experiment"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn velocity_in_nonexistence_window_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SMALL_WAVE.replace("c = -1.0\n[initial]", "c = 0.3\n[initial]");
    let p = write_cfg(tmp.path(), "c03", &body);
    let o = benjamin(&["run", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    let j = stderr_json(&o);
    assert_eq!(j["reason"], "nonexistence window");
    let stored: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("c03/failure.json")).unwrap()).unwrap();
    assert_eq!(stored, j);
}

#[test]
fn blow_up_exits_4_and_keeps_partial_series() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SMALL_EVOLVE.replace("snapshot_stride = 50", "snapshot_stride = 50\nblowup_bound = 1.5");
    let p = write_cfg(tmp.path(), "boom", &body);
    let o = benjamin(&["run", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr_json(&o)["reason"], "blow-up");
    let series = fs::read_to_string(tmp.path().join("boom/series.csv")).unwrap();
    assert!(series.starts_with(SERIES_HEADER));
}

#[test]
fn solved_wave_snapshot_feeds_an_evolution() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write_cfg(tmp.path(), "wave", SMALL_WAVE);
    let o = benjamin(&["run", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let snap = Snapshot::read(&tmp.path().join("wave/wave.snap")).unwrap();
    assert_eq!(snap.n().unwrap(), 256);
    assert_eq!(snap.get_f64("c").unwrap(), -1.0);

    let body = format!(
        r#"
kind = "evolve"
[model]
family = "benjamin"
alpha = 1.0
beta = 1.0
[grid]
n = 256
l = 10.0
[initial]
type = "wave_file"
path = "{}"
[evolution]
t_end = 1.0
n_steps = 400
"#,
        tmp.path().join("wave/wave.snap").display()
    );
    let p = write_cfg(tmp.path(), "carry", &body);
    let o = benjamin(&["run", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_report(&tmp.path().join("carry/report.json")).unwrap();
    assert!(r.metrics["energy_drift_max"] < 1e-9);
}

#[test]
fn missing_wave_file_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SMALL_EVOLVE.replace("type = \"gaussian\"\namplitude = -2.0", "type = \"wave_file\"\npath = \"absent.snap\"");
    let p = write_cfg(tmp.path(), "nofile", &body);
    let o = benjamin(&["run", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_give_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write_cfg(tmp.path(), "det", SMALL_EVOLVE);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        let o = benjamin(&["run", p.to_str().unwrap(), "--out", d.to_str().unwrap()], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["series.csv", "final.snap", "snap_00002.snap"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let series = fs::read_to_string(a.join("series.csv")).unwrap();
    assert_eq!(series.lines().count(), 1 + 201);
    assert!(series.lines().nth(1).unwrap().starts_with("0.0000000000000000e0,"));
}

#[test]
fn verify_reflects_expectations() {
    let tmp = tempfile::tempdir().unwrap();
    let good = format!("{SMALL_WAVE}\n[[expect]]\nmetric = \"residual\"\nop = \"lt\"\nvalue = 1e-10\n");
    let bad = format!("{SMALL_WAVE}\n[[expect]]\nmetric = \"peak\"\nop = \"gt\"\nvalue = 0.0\n");
    let missing = format!("{SMALL_WAVE}\n[[expect]]\nmetric = \"nonexistent\"\nop = \"gt\"\nvalue = 0.0\n");
    for (name, body, code) in [("good", good, 0), ("bad", bad, 5), ("missing", missing, 5)] {
        let p = write_cfg(tmp.path(), name, &body);
        let o = benjamin(&["run", p.to_str().unwrap()], tmp.path());
        assert_eq!(o.status.code(), Some(code), "{name}");
        let report = tmp.path().join(name).join("report.json");
        let v = benjamin(&["verify", report.to_str().unwrap()], tmp.path());
        assert_eq!(v.status.code(), Some(code), "verify {name}");
    }
}

#[test]
fn list_covers_the_bundled_registry() {
    let tmp = tempfile::tempdir().unwrap();
    let o = benjamin(&["list"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() >= 14);
    assert!(!text.contains("invalid"));
    for name in registry::names() {
        assert!(text.contains(name));
    }
}

#[test]
fn show_prints_bundled_text() {
    let tmp = tempfile::tempdir().unwrap();
    let o = benjamin(&["show", "stability_a195"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), registry::find("stability_a195").unwrap().text);
}
