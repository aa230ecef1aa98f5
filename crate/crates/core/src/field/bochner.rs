use super::{h_l_jacobian, tension, MapField};
use crate::geometry::{Field, Stencils};
use crate::{Error, Result};

/// Worst discrete violations of the Bochner inequality and the `log h` identity, both
/// multiplied by `σ|z|²` so that they stay bounded at the puncture.
#[derive(Clone, Debug, PartialEq)]
pub struct BochnerReport {
    /// `max(rhs − lhs)` for `Δe ≥ 2κ_σ e − 2κ_ρ J²`; non-positive up to discretization error.
    pub energy_violation: f64,
    /// Same quantity for the weaker-looking form `Δe ≥ 2κ_σ e − 2κ_ρ J`.
    pub energy_violation_linear_j: f64,
    /// `max |Δ log h + 2κ_ρ J − 2κ_σ|` where `h` exceeds the threshold.
    pub identity_residual: f64,
    pub nodes_checked: usize,
    pub tension_residual: f64,
}

pub fn bochner_check(u: &MapField, tension_tol: f64, h_threshold: f64) -> Result<BochnerReport> {
    let tf = tension(u)?;
    if tf.sup_normalized > tension_tol {
        return Err(Error::NotHarmonic { residual: tf.sup_normalized, tolerance: tension_tol });
    }
    let g = &u.grid;
    let st = Stencils::new(g);
    let d = h_l_jacobian(u)?;
    let lap_e = st.b_laplacian(&d.e);
    let logh: Field<f64> = d.h.map(|x| if x > 0.0 { x.ln() } else { 0.0 });
    let lap_logh = st.b_laplacian(&logh);
    let mut viol = f64::NEG_INFINITY;
    let mut viol_lin = f64::NEG_INFINITY;
    let mut ident: f64 = 0.0;
    let mut count = 0;
    for i in 2..g.n_t() - 2 {
        let r2 = g.r(i).powi(2);
        for k in 0..g.n_theta() {
            let z = g.z(i, k);
            let w = u.domain.sigma(z) * r2;
            let ks = u.domain.curvature(z);
            let kr = u.target.curvature(u.samples[(i, k)]);
            let (e, j) = (d.e[(i, k)], d.jac[(i, k)]);
            viol = viol.max(w * (2.0 * ks * e - 2.0 * kr * j * j) - lap_e[(i, k)]);
            viol_lin = viol_lin.max(w * (2.0 * ks * e - 2.0 * kr * j) - lap_e[(i, k)]);
            if d.h[(i, k)] > h_threshold {
                ident = ident.max((lap_logh[(i, k)] - w * (-2.0 * kr * j + 2.0 * ks)).abs());
            }
            count += 1;
        }
    }
    Ok(BochnerReport {
        energy_violation: viol,
        energy_violation_linear_j: viol_lin,
        identity_residual: ident,
        nodes_checked: count,
        tension_residual: tf.sup_normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{round_cone_metric, BGrid, ConeAngle, ConicMetric, DomainMetric, MuProfile};

    #[test]
    fn identity_into_itself() {
        let t = round_cone_metric(ConeAngle::new(1.0 / 3.0).unwrap());
        let g = BGrid::new(-2.0, 129, 16).unwrap();
        let u = MapField::from_fn(g, t.clone(), DomainMetric::Conic(t), |z| z);
        let r = bochner_check(&u, 1e-7, 1e-6).unwrap();
        assert!(r.energy_violation < 1e-5 && r.identity_residual < 1e-4, "{r:?}");
    }

    #[test]
    fn identity_into_curved_target() {
        // the identity is harmonic into any conformal target; the log h identity is sharp there
        let angle = ConeAngle::new(0.5).unwrap();
        let t = ConicMetric::new(angle, 1.0, MuProfile::single(1.0, 2.0, 0)).unwrap();
        let err = |n: usize| {
            let g = BGrid::new(-2.0, n, 16).unwrap();
            let u = MapField::from_fn(g, t.clone(), DomainMetric::Flat, |z| z);
            let r = bochner_check(&u, 1e-5, 1e-8).unwrap();
            assert!(r.energy_violation < 1e-6);
            r.identity_residual
        };
        let (a, b) = (err(33), err(65));
        assert!(b < 2e-4 && a / b > 3.5, "{a} {b}");
    }

    #[test]
    fn non_harmonic_input_is_rejected() {
        let t = round_cone_metric(ConeAngle::new(1.0 / 3.0).unwrap());
        let g = BGrid::new(-2.0, 33, 16).unwrap();
        let u = MapField::from_fn(g, t, DomainMetric::Flat, |z| z + 0.1 * z.conj());
        assert!(matches!(bochner_check(&u, 1e-9, 1e-6), Err(Error::NotHarmonic { .. })));
    }
}
