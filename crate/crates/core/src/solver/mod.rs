//! Nonlinear solves: damped Newton on the tension field, cone-point translation,
//! continuation in the data, and sampled energy-minimality probes.

mod cone_point;
mod continuation;
mod newton;
mod probe;

pub use cone_point::{move_cone_point, recentred_boundary, residue_at_origin, ConePointSolution};
pub use continuation::{continue_path, ContinuationPath, ContinuationStep};
pub use newton::{newton_relax, newton_residual, NewtonResult};
pub use probe::{band_limited_perturbation, energy_minimality_probe, full_energy, MinimalityReport};

use crate::linearization::InnerCondition;
use crate::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Target for the sup of the normalized tension (and the inner-condition residual).
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Step-halving depth of the line search.
    pub damping: usize,
    /// Target for the cone-point residue in the outer loop.
    pub outer_tol: f64,
    pub max_outer: usize,
    /// Finite-difference step of the residue Jacobian.
    pub fd_step: f64,
    pub trust_radius: f64,
    pub continuation_steps: usize,
    pub min_step: f64,
    pub inner: InnerCondition,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tol: 1e-9,
            max_newton: 25,
            damping: 8,
            outer_tol: 1e-8,
            max_outer: 20,
            fd_step: 1e-4,
            trust_radius: 0.5,
            continuation_steps: 10,
            min_step: 1.0 / 1024.0,
            inner: InnerCondition::RegularModes,
        }
    }
}

/// Observed orders `log(r_{k+1}/r_k) / log(r_k/r_{k−1})` along a residual history, skipping
/// triples that end below `floor` (roundoff).
pub fn convergence_orders(history: &[f64], floor: f64) -> Vec<f64> {
    history
        .windows(3)
        .filter(|w| w[2] >= floor)
        .map(|w| (w[2] / w[1]).ln() / (w[1] / w[0]).ln())
        .collect()
}
