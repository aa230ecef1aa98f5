use crate::field::{h_l_jacobian, tension, MapField};
use crate::prelude::*;
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    pub lambda: C64,
    /// `sup|u − λz| / sup|u|`.
    pub verdict: f64,
    pub sup_l: f64,
    pub sup_e: f64,
    /// Innermost-row over outermost-row maximum of the energy density.
    pub density_ratio: f64,
    pub tension_residual: f64,
    pub harmonic: bool,
    pub bounded_density: bool,
    pub passed: bool,
}

/// Compares a map of the cone to its best dilation-rotation and evaluates the preconditions
/// (harmonicity and bounded energy density) under which it must be one.
pub fn cone_classification_check(u: &MapField, tolerance: f64, harmonic_tol: f64) -> Result<ClassificationReport> {
    let g = &u.grid;
    let (mut num, mut den) = (ZERO, 0.0);
    for i in 0..g.n_t() {
        for k in 0..g.n_theta() {
            let z = g.z(i, k);
            num += u.samples[(i, k)] * z.conj();
            den += z.norm_sqr();
        }
    }
    let lambda = num / den;
    let mut diff: f64 = 0.0;
    for i in 0..g.n_t() {
        for k in 0..g.n_theta() {
            diff = diff.max((u.samples[(i, k)] - lambda * g.z(i, k)).norm());
        }
    }
    let verdict = diff / u.samples.sup_norm();
    let hlj = h_l_jacobian(u)?;
    let sup_l = hlj.l.sup_abs();
    let sup_e = hlj.e.sup_abs();
    let row_max = |i: usize| hlj.e.row(i).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let density_ratio = row_max(0) / row_max(g.n_t() - 1);
    let tension_residual = tension(u)?.sup_normalized;
    let harmonic = tension_residual <= harmonic_tol;
    let bounded_density = density_ratio <= 10.0;
    Ok(ClassificationReport {
        lambda,
        verdict,
        sup_l,
        sup_e,
        density_ratio,
        tension_residual,
        harmonic,
        bounded_density,
        passed: harmonic && bounded_density && verdict < tolerance,
    })
}
