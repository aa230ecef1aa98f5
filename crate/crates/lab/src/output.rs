use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use conelab_core::geometry::{BGrid, Field};
use conelab_core::Complex64 as C64;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// One run owns one directory, named after the subcommand and a hash of its configuration.
#[derive(Clone, Debug)]
pub struct RunDir {
    pub path: PathBuf,
}

impl RunDir {
    pub fn create(root: &Path, subcommand: &str, cfg: &RunConfig) -> anyhow::Result<Self> {
        let snapshot = cfg.to_toml();
        let mut h = Sha256::new();
        h.update(subcommand.as_bytes());
        h.update([0]);
        h.update(snapshot.as_bytes());
        let digest = h.finalize();
        let tag: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
        let path = root.join(format!("{subcommand}-{tag}"));
        fs::create_dir_all(&path).with_context(|| format!("creating {}", path.display()))?;
        fs::write(path.join("config.toml"), snapshot)?;
        Ok(RunDir { path })
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.path.join(name)
    }

    pub fn write_json(&self, name: &str, v: &Value) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(v)?;
        text.push('\n');
        fs::write(self.file(name), text)?;
        Ok(())
    }

    /// Columns `t, theta, re, im`.
    pub fn write_complex_field(&self, name: &str, grid: &BGrid, f: &Field<C64>) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(self.file(name))?;
        w.write_record(["t", "theta", "re", "im"])?;
        for i in 0..grid.n_t() {
            for k in 0..grid.n_theta() {
                let v = f[(i, k)];
                w.serialize((grid.t(i), grid.theta(k), v.re, v.im))?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Columns `t, theta, value`.
    pub fn write_real_field(&self, name: &str, grid: &BGrid, f: &Field<f64>) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(self.file(name))?;
        w.write_record(["t", "theta", "value"])?;
        for i in 0..grid.n_t() {
            for k in 0..grid.n_theta() {
                w.serialize((grid.t(i), grid.theta(k), f[(i, k)]))?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_table<R: serde::Serialize>(&self, name: &str, header: &[&str], rows: &[R]) -> anyhow::Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(self.file(name))?;
        w.write_record(header)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn complex(z: C64) -> Value {
    serde_json::json!({ "re": z.re, "im": z.im, "abs": z.norm() })
}
