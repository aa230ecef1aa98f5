use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn conelab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conelab"))
        .args(args)
        .env("CONELAB_OUT", out)
        .output()
        .expect("binary runs")
}

fn run_dir(out: &Path, prefix: &str) -> PathBuf {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with(prefix))
        .collect();
    assert_eq!(dirs.len(), 1, "exactly one {prefix} run in {}", out.display());
    dirs.pop().unwrap()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn indicial_roots_table() {
    let tmp = tempfile::tempdir().unwrap();
    let o = conelab(tmp.path(), &["indicial-roots", "--alpha", "0.75", "--window", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("roots")).unwrap();
    assert_eq!(line, "roots (10): -2 -1.5 -1 -0.5 0 0.5 1 1.5 2 2.5");
    let s = summary(&run_dir(tmp.path(), "indicial-roots-"));
    assert_eq!(s["outcome"]["roots"].as_array().unwrap().len(), 10);
}

#[test]
fn dirichlet_residue() {
    let tmp = tempfile::tempdir().unwrap();
    let o = conelab(tmp.path(), &["cone-dirichlet", "--alpha", "0.3333", "--boundary", "preset:a-1=0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let dir = run_dir(tmp.path(), "cone-dirichlet-");
    let s = summary(&dir);
    let res = s["outcome"]["residue"]["re"].as_f64().unwrap();
    assert!((res - 0.1 * (1.0 / 0.3333 - 1.0)).abs() < 1e-12);
    assert!((res - 0.2).abs() < 1e-3);
    for f in ["config.toml", "map.csv", "hopf.csv", "series.json"] {
        assert!(dir.join(f).exists(), "{f} missing");
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(conelab(tmp.path(), &["solve", "--config", "missing.cfg"]).status.code(), Some(3));
    assert_eq!(conelab(tmp.path(), &["solve", "--no-such-flag"]).status.code(), Some(3));
    assert_eq!(conelab(tmp.path(), &["frobnicate"]).status.code(), Some(3));
    assert_eq!(conelab(tmp.path(), &["cone-dirichlet", "--alpha", "1.5"]).status.code(), Some(3));
    assert_eq!(conelab(tmp.path(), &["cone-dirichlet", "--boundary", "preset:a1=0.9"]).status.code(), Some(3));
    assert_eq!(conelab(tmp.path(), &["cone-augmented", "--alpha", "0.6"]).status.code(), Some(3));
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "alpha = 0.3\nunknown_key = 2\n").unwrap();
    assert_eq!(conelab(tmp.path(), &["solve", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn non_convergence_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("short.cfg");
    std::fs::write(&cfg, "max_newton = 1\nmu_amplitude = 0.05\nboundary = \"preset:a-1=0.03,a2=0.02\"\n").unwrap();
    let o = conelab(tmp.path(), &["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let s = summary(&run_dir(tmp.path(), "solve-"));
    assert_eq!(s["status"], "failed");
    assert!(!s["outcome"]["history"].as_array().unwrap().is_empty());
}

#[test]
fn config_file_solve() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "alpha = 0.3333333333333333\nmu_amplitude = 0.05\nboundary = \"preset:a-1=0.03\"\ngrid_nt = 33\ngrid_ntheta = 16\n",
    )
    .unwrap();
    let o = conelab(tmp.path(), &["solve", "--config", cfg.to_str().unwrap(), "--tol-newton", "1e-10"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = run_dir(tmp.path(), "solve-");
    let snap = conelab::RunConfig::parse(&std::fs::read_to_string(dir.join("config.toml")).unwrap()).unwrap();
    assert_eq!(snap.grid_nt, 33);
    assert_eq!(snap.tol_newton, 1e-10);
    let s = summary(&dir);
    assert!(s["outcome"]["tension_residual"].as_f64().unwrap() < 1e-10);
    assert!(dir.join("history.csv").exists());
}

#[test]
fn summaries_are_bit_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "probe-minimality",
        "--boundary",
        "preset:a-1=0.05",
        "--grid-nt",
        "33",
        "--grid-ntheta",
        "16",
        "--probe-samples",
        "10",
        "--seed",
        "7",
    ];
    assert_eq!(conelab(a.path(), &args).status.code(), Some(0));
    assert_eq!(conelab(b.path(), &args).status.code(), Some(0));
    let da = run_dir(a.path(), "probe-minimality-");
    let db = run_dir(b.path(), "probe-minimality-");
    assert_eq!(da.file_name(), db.file_name());
    let sa = std::fs::read(da.join("summary.json")).unwrap();
    let sb = std::fs::read(db.join("summary.json")).unwrap();
    assert_eq!(sa, sb);
    let other = tempfile::tempdir().unwrap();
    let mut seeded = args.to_vec();
    seeded[10] = "8";
    assert_eq!(conelab(other.path(), &seeded).status.code(), Some(0));
    let sc = std::fs::read(run_dir(other.path(), "probe-minimality-").join("summary.json")).unwrap();
    assert_ne!(sa, sc);
}

#[test]
fn continuation_writes_steps() {
    let tmp = tempfile::tempdir().unwrap();
    let o = conelab(
        tmp.path(),
        &["continue", "--mu-amplitude", "0.05", "--boundary", "preset:a1=0.02", "--steps", "2", "--grid-nt", "33", "--grid-ntheta", "16"],
    );
    assert_eq!(o.status.code(), Some(0));
    let dir = run_dir(tmp.path(), "continue-");
    let steps = std::fs::read_to_string(dir.join("steps.csv")).unwrap();
    assert_eq!(steps.lines().count(), 4);
    assert!(dir.join("map_step_002.csv").exists());
}
