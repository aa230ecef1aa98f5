use super::MapField;
use crate::geometry::{Field, Stencils};
use crate::prelude::*;
use crate::Result;

#[derive(Clone, Debug)]
pub struct TensionField {
    /// `τ = (4/σ)(u_zz̄ + Γ(u) u_z u_z̄)`
    pub tau: Field<C64>,
    /// `|z|²(σ/4)τ = ¼[(∂_t² + ∂_θ²)u + Γ(u)·D⁻u·D⁺u]`
    pub normalized: Field<C64>,
    /// Sup of the normalized field over rows strictly inside the annulus.
    pub sup_normalized: f64,
}

pub fn tension(u: &MapField) -> Result<TensionField> {
    u.check_puncture()?;
    let g = &u.grid;
    let st = Stencils::new(g);
    let jet = u.jet(&st);
    let mut tau = Field::filled(g, ZERO);
    let mut norm = Field::filled(g, ZERO);
    let mut sup: f64 = 0.0;
    for i in 0..g.n_t() {
        let r2 = g.r(i).powi(2);
        for k in 0..g.n_theta() {
            let v = u.samples[(i, k)];
            let n = 0.25 * (jet.lap[(i, k)] + u.target.gamma(v) * jet.dminus(i, k) * jet.dplus(i, k));
            norm[(i, k)] = n;
            tau[(i, k)] = n * 4.0 / (u.domain.sigma(g.z(i, k)) * r2);
            if i > 0 && i + 1 < g.n_t() {
                sup = sup.max(n.norm());
            }
        }
    }
    Ok(TensionField { tau, normalized: norm, sup_normalized: sup })
}
