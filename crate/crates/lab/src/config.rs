use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, Context};
use clap::Args;
use conelab_core::geometry::{BGrid, ConeAngle, ConicMetric, MuProfile};
use conelab_core::solver::SolverConfig;
use conelab_core::spectral::{analyze_boundary, BoundaryTrace, TwistedSeries};
use conelab_core::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::Invalid;

/// Every tunable of a run. Files use flat `key = value` lines; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    /// Metric normalization `c` in `ρ = c e^{2μ}|u|^{2α−2}`.
    pub c: f64,
    pub mu_amplitude: f64,
    /// Defaults to `2α`.
    pub mu_power: Option<f64>,
    pub mu_frequency: i32,
    pub boundary: String,
    pub grid_nt: usize,
    pub grid_ntheta: usize,
    pub tmin: f64,
    pub order: usize,
    pub trace_samples: usize,
    pub threshold: f64,
    pub tol_newton: f64,
    pub tol_outer: f64,
    pub tol_diagnostic: f64,
    pub max_newton: usize,
    pub max_outer: usize,
    pub damping: usize,
    pub trust_radius: f64,
    pub fd_step: f64,
    pub steps: usize,
    pub residue_free: bool,
    pub window: u32,
    pub seed: u64,
    pub probe_samples: usize,
    pub probe_amplitude: f64,
    pub harnack_samples: usize,
    pub harnack_sigma: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 1.0 / 3.0,
            c: 1.0,
            mu_amplitude: 0.0,
            mu_power: None,
            mu_frequency: 1,
            boundary: "preset:identity".into(),
            grid_nt: 65,
            grid_ntheta: 32,
            tmin: -4.0,
            order: 16,
            trace_samples: 256,
            threshold: 0.25,
            tol_newton: 1e-9,
            tol_outer: 1e-8,
            tol_diagnostic: 1e-6,
            max_newton: 25,
            max_outer: 20,
            damping: 8,
            trust_radius: 0.5,
            fd_step: 1e-4,
            steps: 10,
            residue_free: false,
            window: 2,
            seed: 0,
            probe_samples: 100,
            probe_amplitude: 1e-2,
            harnack_samples: 20,
            harnack_sigma: 0.5,
        }
    }
}

/// Command-line overrides; each one replaces the matching configuration key.
#[derive(Clone, Debug, Default, Args)]
pub struct Overrides {
    /// Flat key = value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output root; defaults to $CONELAB_OUT, then ./runs.
    #[arg(long, env = "CONELAB_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_amplitude: Option<f64>,
    #[arg(long)]
    pub mu_power: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_frequency: Option<i32>,
    /// `preset:identity`, `preset:a-1=0.1,a2=0.02i` or `csv:FILE` with columns theta, re, im.
    #[arg(long)]
    pub boundary: Option<String>,
    #[arg(long)]
    pub grid_nt: Option<usize>,
    #[arg(long)]
    pub grid_ntheta: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub tol_newton: Option<f64>,
    #[arg(long)]
    pub tol_outer: Option<f64>,
    #[arg(long)]
    pub tol_diagnostic: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub residue_free: bool,
    #[arg(long)]
    pub window: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub probe_samples: Option<usize>,
    #[arg(long)]
    pub probe_amplitude: Option<f64>,
    #[arg(long)]
    pub harnack_samples: Option<usize>,
    #[arg(long)]
    pub harnack_sigma: Option<f64>,
}

macro_rules! apply {
    ($cfg:ident, $o:ident, $($field:ident),*) => {
        $(if let Some(v) = $o.$field.clone() { $cfg.$field = v; })*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).map_err(|e| Invalid(format!("bad config: {e}")).into())
    }

    pub fn resolve(o: &Overrides) -> anyhow::Result<Self> {
        let mut cfg = match &o.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        apply!(cfg, o, alpha, c, mu_amplitude, mu_frequency, boundary, grid_nt, grid_ntheta, tmin, order);
        apply!(cfg, o, tol_newton, tol_outer, tol_diagnostic, steps, window, seed, probe_samples);
        apply!(cfg, o, probe_amplitude, harnack_samples, harnack_sigma);
        if o.mu_power.is_some() {
            cfg.mu_power = o.mu_power;
        }
        cfg.residue_free |= o.residue_free;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        let bad = |m: &str| Err(Invalid(m.to_string()).into());
        if !(self.tol_newton > 0.0 && self.tol_outer > 0.0 && self.tol_diagnostic > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.steps == 0 {
            return bad("steps must be at least 1");
        }
        if !(self.probe_amplitude > 0.0) || !(self.harnack_sigma >= 0.0) {
            return bad("probe amplitude must be positive and harnack sigma non-negative");
        }
        BoundarySpec::parse(&self.boundary)?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    pub fn angle(&self) -> anyhow::Result<ConeAngle> {
        Ok(ConeAngle::new(self.alpha).map_err(|e| Invalid(e.to_string()))?)
    }

    pub fn grid(&self) -> anyhow::Result<BGrid> {
        Ok(BGrid::new(self.tmin, self.grid_nt, self.grid_ntheta).map_err(|e| Invalid(e.to_string()))?)
    }

    pub fn mu(&self) -> MuProfile {
        if self.mu_amplitude == 0.0 {
            return MuProfile::zero();
        }
        MuProfile::single(self.mu_amplitude, self.mu_power.unwrap_or(2.0 * self.alpha), self.mu_frequency)
    }

    pub fn target(&self) -> anyhow::Result<ConicMetric> {
        Ok(ConicMetric::new(self.angle()?, self.c, self.mu()).map_err(|e| Invalid(e.to_string()))?)
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            newton_tol: self.tol_newton,
            max_newton: self.max_newton,
            damping: self.damping,
            outer_tol: self.tol_outer,
            max_outer: self.max_outer,
            fd_step: self.fd_step,
            trust_radius: self.trust_radius,
            continuation_steps: self.steps,
            ..SolverConfig::default()
        }
    }

    /// Boundary data as a twisted Fourier series of order `order`.
    pub fn series(&self) -> anyhow::Result<TwistedSeries> {
        let angle = self.angle()?;
        let s = match BoundarySpec::parse(&self.boundary)? {
            BoundarySpec::Preset(pairs) => {
                let mut all = vec![(0, C64::new(1.0, 0.0))];
                all.extend(pairs);
                let order = all.iter().map(|p| p.0.unsigned_abs() as usize).max().unwrap_or(0).max(self.order);
                TwistedSeries::with_coeffs(angle, order, &all)?
            }
            BoundarySpec::Csv(path) => {
                let values = read_boundary_csv(&path)?;
                let trace = BoundaryTrace::from_cone_samples(angle, &values)?;
                analyze_boundary(&trace, self.order, 1e-8)?.series
            }
        };
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BoundarySpec {
    /// Coefficients `a_j` added to the identity data `a_0 = 1` (a given `a0` replaces it).
    Preset(Vec<(i32, C64)>),
    Csv(PathBuf),
}

impl BoundarySpec {
    pub fn parse(s: &str) -> anyhow::Result<Self> {
        if let Some(p) = s.strip_prefix("csv:") {
            return Ok(BoundarySpec::Csv(PathBuf::from(p)));
        }
        let body = s.strip_prefix("preset:").ok_or_else(|| Invalid(format!("unknown boundary spec '{s}'")))?;
        if body == "identity" {
            return Ok(BoundarySpec::Preset(Vec::new()));
        }
        let mut pairs: Vec<(i32, C64)> = Vec::new();
        for item in body.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Invalid(format!("boundary term '{item}' is not key=value")))?;
            let j: i32 = k
                .trim()
                .strip_prefix('a')
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| Invalid(format!("boundary key '{k}' is not a<j>")))?;
            let a = C64::from_str(v.trim()).map_err(|_| Invalid(format!("bad coefficient '{v}'")))?;
            match pairs.iter_mut().find(|p| p.0 == j) {
                Some(p) => p.1 = a,
                None => pairs.push((j, a)),
            }
        }
        pairs.sort_by_key(|p| p.0);
        Ok(BoundarySpec::Preset(pairs))
    }
}

#[derive(Deserialize)]
struct BoundaryRow {
    theta: f64,
    re: f64,
    im: f64,
}

/// Uniform samples `θ_k = 2πk/n` of the boundary map in cone coordinates.
pub fn read_boundary_csv(path: &Path) -> anyhow::Result<Vec<C64>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Invalid(format!("{}: {e}", path.display())))?;
    let rows: Vec<BoundaryRow> = rdr
        .deserialize()
        .collect::<Result<_, _>>()
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| Invalid(format!("{e:#}")))?;
    let n = rows.len();
    for (k, r) in rows.iter().enumerate() {
        let want = std::f64::consts::TAU * k as f64 / n as f64;
        if (r.theta - want).abs() > 1e-9 {
            return Err(anyhow!(Invalid(format!("row {k}: theta {} is not 2 pi k / n", r.theta))));
        }
    }
    Ok(rows.iter().map(|r| C64::new(r.re, r.im)).collect())
}
