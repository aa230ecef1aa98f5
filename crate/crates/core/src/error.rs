use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    InvalidConeAngle(f64),
    InvalidGrid(&'static str),
    InvalidInput(String),
    ZeroInput,
    InsufficientRegularity { tail: f64 },
    TwistViolation { mismatch: f64, tolerance: f64 },
    Aliasing { order: usize, samples: usize },
    NonConeMapping { mode: i32 },
    BoundaryNotNearIdentity { norm: f64, threshold: f64 },
    NoConvergence { iterations: usize, history: Vec<f64>, best_w: Option<Complex64> },
    OutOfDisc { w: Complex64, radius: f64 },
    TargetPunctureHit { row: usize, col: usize },
    InconsistentResidue { deviation: f64, tolerance: f64 },
    NotHarmonic { residual: f64, tolerance: f64 },
    SplitFails { row: usize, col: usize, margin: f64 },
    SingularSystem { column: usize },
    PoorFit { goodness: f64 },
    DegenerateJacobian { fraction: f64 },
    PathStuck { t: f64, step: f64 },
    MinimalityViolated { margin: f64, sample: usize, witness: Vec<Complex64> },
    HypothesisFail(String),
    FormViolation { exponent: f64, floor: f64 },
    WindowExceeded { r_min: f64, r_max: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Error::*;
        match self {
            InvalidConeAngle(a) => write!(f, "cone parameter alpha = {a} outside (0, 1)"),
            InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            InvalidInput(why) => write!(f, "invalid input: {why}"),
            ZeroInput => write!(f, "coordinate map evaluated at the cone point"),
            InsufficientRegularity { tail } => {
                write!(f, "samples under-resolved for second differences (spectral tail {tail:.3e})")
            }
            TwistViolation { mismatch, tolerance } => {
                write!(f, "twist condition violated: mismatch {mismatch:.3e} > {tolerance:.3e}")
            }
            Aliasing { order, samples } => write!(f, "order J = {order} aliases with {samples} samples"),
            NonConeMapping { mode } => write!(f, "mode {mode} does not extend continuously to the cone point"),
            BoundaryNotNearIdentity { norm, threshold } => {
                write!(f, "boundary distance to identity {norm:.4} exceeds threshold {threshold:.4}")
            }
            NoConvergence { iterations, history, .. } => write!(
                f,
                "no convergence after {iterations} iterations (last residual {:.3e})",
                history.last().copied().unwrap_or(f64::NAN)
            ),
            OutOfDisc { w, radius } => write!(f, "iterate w = {w} left the trust disc |w| <= {radius}"),
            TargetPunctureHit { row, col } => write!(f, "map hits the target cone point at node ({row}, {col})"),
            InconsistentResidue { deviation, tolerance } => {
                write!(f, "residue varies across radii by {deviation:.3e} (tolerance {tolerance:.3e})")
            }
            NotHarmonic { residual, tolerance } => {
                write!(f, "tension residual {residual:.3e} above {tolerance:.3e}")
            }
            SplitFails { row, col, margin } => write!(f, "metric split fails at ({row}, {col}), margin {margin:.3e}"),
            SingularSystem { column } => write!(f, "singular linear system at column {column}"),
            PoorFit { goodness } => write!(f, "asymptotic fit goodness {goodness:.4} below threshold"),
            DegenerateJacobian { fraction } => {
                write!(f, "Jacobian h - l <= 0 on {:.2}% of nodes", 100.0 * fraction)
            }
            PathStuck { t, step } => write!(f, "continuation stuck at t = {t} with step {step:.3e}"),
            MinimalityViolated { margin, sample, .. } => {
                write!(f, "energy decreased by {:.3e} for probe sample {sample}", -margin)
            }
            HypothesisFail(why) => write!(f, "hypothesis check failed: {why}"),
            FormViolation { exponent, floor } => {
                write!(f, "remainder exponent {exponent:.4} not above 1 + {floor}")
            }
            WindowExceeded { r_min, r_max } => {
                write!(f, "rescaled window [{r_min:.3e}, {r_max:.3e}] leaves the grid")
            }
        }
    }
}

impl core::error::Error for Error {}
