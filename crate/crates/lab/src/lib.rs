//! Batch front end for `conelab-core`: configuration files, run directories and the
//! subcommand pipelines behind the `conelab` binary.

pub mod config;
pub mod output;
pub mod pipelines;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use conelab_core::Error as CoreError;
use serde_json::json;

pub use config::{BoundarySpec, Overrides, RunConfig};
pub use output::RunDir;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Bad flags, configuration or data supplied by the user.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

/// A verification ran to completion and reported a failure.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

#[derive(Debug, Parser)]
#[command(name = "conelab", version, about = "Harmonic maps into cones: solvers and diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral Dirichlet solve from boundary data; reports admissibility and the Hopf residue.
    ConeDirichlet(Overrides),
    /// Moves the cone-point preimage until the residue vanishes (cone angle below pi).
    ConeAugmented(Overrides),
    /// Damped Newton solve into a perturbed conic target.
    Solve(Overrides),
    /// Continuation from the identity into the configured problem.
    Continue(Overrides),
    /// Indicial roots of the linearization at the identity of the round cone.
    IndicialRoots(Overrides),
    /// Hopf differential, residues and holomorphy defect of a solution.
    HopfAnalyze(Overrides),
    /// Subsolution, Bochner, form, classification and Harnack checks on a solution.
    Diagnostics(Overrides),
    /// Random perturbations that must not lower the energy of a solution.
    ProbeMinimality(Overrides),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ConeDirichlet(_) => "cone-dirichlet",
            Command::ConeAugmented(_) => "cone-augmented",
            Command::Solve(_) => "solve",
            Command::Continue(_) => "continue",
            Command::IndicialRoots(_) => "indicial-roots",
            Command::HopfAnalyze(_) => "hopf-analyze",
            Command::Diagnostics(_) => "diagnostics",
            Command::ProbeMinimality(_) => "probe-minimality",
        }
    }

    fn overrides(&self) -> &Overrides {
        match self {
            Command::ConeDirichlet(o)
            | Command::ConeAugmented(o)
            | Command::Solve(o)
            | Command::Continue(o)
            | Command::IndicialRoots(o)
            | Command::HopfAnalyze(o)
            | Command::Diagnostics(o)
            | Command::ProbeMinimality(o) => o,
        }
    }
}

/// 0 success, 1 failed verification, 2 solver failure, 3 invalid input.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    if e.downcast_ref::<Invalid>().is_some() {
        return 3;
    }
    if e.downcast_ref::<CheckFailed>().is_some() {
        return 1;
    }
    match e.downcast_ref::<CoreError>() {
        Some(
            CoreError::NoConvergence { .. }
            | CoreError::PathStuck { .. }
            | CoreError::OutOfDisc { .. }
            | CoreError::DegenerateJacobian { .. }
            | CoreError::SingularSystem { .. }
            | CoreError::TargetPunctureHit { .. },
        ) => 2,
        Some(
            CoreError::InvalidConeAngle(_)
            | CoreError::InvalidGrid(_)
            | CoreError::InvalidInput(_)
            | CoreError::ZeroInput
            | CoreError::InsufficientRegularity { .. }
            | CoreError::TwistViolation { .. }
            | CoreError::Aliasing { .. }
            | CoreError::NonConeMapping { .. }
            | CoreError::BoundaryNotNearIdentity { .. },
        ) => 3,
        _ => 1,
    }
}

/// Outcome of one invocation.
#[derive(Debug)]
pub struct RunOutcome {
    pub code: i32,
    pub dir: Option<PathBuf>,
}

/// Parses `args` (program name first) and executes the subcommand.
pub fn run<I, T>(args: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return RunOutcome { code, dir: None };
        }
    };
    execute(&cli.command)
}

pub fn execute(cmd: &Command) -> RunOutcome {
    let name = cmd.name();
    let o = cmd.overrides();
    let cfg = match RunConfig::resolve(o) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return RunOutcome { code: exit_code(&e), dir: None };
        }
    };
    let root = o.out.clone().unwrap_or_else(|| PathBuf::from("runs"));
    let dir = match RunDir::create(&root, name, &cfg) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e:#}");
            return RunOutcome { code: 1, dir: None };
        }
    };
    let result = match cmd {
        Command::ConeDirichlet(_) => pipelines::cone_dirichlet(&cfg, &dir),
        Command::ConeAugmented(_) => pipelines::cone_augmented(&cfg, &dir),
        Command::Solve(_) => pipelines::solve(&cfg, &dir),
        Command::Continue(_) => pipelines::continuation(&cfg, &dir),
        Command::IndicialRoots(_) => pipelines::indicial(&cfg, &dir),
        Command::HopfAnalyze(_) => pipelines::hopf_analyze(&cfg, &dir),
        Command::Diagnostics(_) => pipelines::diagnostics(&cfg, &dir),
        Command::ProbeMinimality(_) => pipelines::probe_minimality(&cfg, &dir),
    };
    let (code, status, outcome) = match result {
        Ok(v) => (0, "ok", v),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = exit_code(&e);
            let mut v = json!({ "error": format!("{e:#}") });
            if let Some(CoreError::NoConvergence { iterations, history, .. }) = e.downcast_ref::<CoreError>() {
                v["iterations"] = json!(iterations);
                v["history"] = json!(history);
            }
            if let Some(CheckFailed(_)) = e.downcast_ref::<CheckFailed>() {
                if let Ok(prev) = std::fs::read_to_string(dir.file("report.json")) {
                    v["report"] = serde_json::from_str(&prev).unwrap_or_default();
                }
            }
            (code, "failed", v)
        }
    };
    let summary = json!({
        "subcommand": name,
        "version": VERSION,
        "status": status,
        "exit_code": code,
        "config": serde_json::to_value(&cfg).expect("config serializes"),
        "tolerances": {
            "newton": cfg.tol_newton,
            "outer": cfg.tol_outer,
            "diagnostic": cfg.tol_diagnostic,
        },
        "outcome": outcome,
    });
    if let Err(e) = dir.write_json("summary.json", &summary) {
        eprintln!("error: writing summary: {e:#}");
        return RunOutcome { code: 1, dir: Some(dir.path) };
    }
    RunOutcome { code, dir: Some(dir.path) }
}
