use super::{energy_density, hopf, MapField};
use crate::geometry::{Field, Stencils};
use crate::prelude::*;
use crate::{Error, Result};

/// Eigenvalue scan of `H1 = (eσ − s)|dz|²` and `H2 = s|dz|² + 2Re φ dz²`, `s = √(ε²ω² + |φ|²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitReport {
    pub min_h1: f64,
    pub min_h2: f64,
    /// Largest Gauss curvature of `H2` at interior nodes.
    pub max_curvature_h2: f64,
    pub fraction_negative_curvature_h2: f64,
}

/// Eigenvalues are those of the tensors in Cartesian components, `H1 ↦ eσ − s` and
/// `H2 ↦ s ± 2|φ|`. Fails as soon as `H1` is not positive somewhere.
pub fn pullback_split(u: &MapField, eps: f64, omega: &dyn Fn(C64) -> f64) -> Result<SplitReport> {
    let g = &u.grid;
    let e = energy_density(u)?;
    let hf = hopf(u)?;
    let mut min_h1 = f64::INFINITY;
    let mut min_h2 = f64::INFINITY;
    let mut s_field = Field::filled(g, 0.0);
    for i in 0..g.n_t() {
        for k in 0..g.n_theta() {
            let z = g.z(i, k);
            let phi = hf.phi[(i, k)].norm();
            let s = ((eps * omega(z)).powi(2) + phi * phi).sqrt();
            s_field[(i, k)] = s;
            let h1 = e[(i, k)] * u.domain.sigma(z) - s;
            if h1 <= 0.0 {
                return Err(Error::SplitFails { row: i, col: k, margin: h1 });
            }
            min_h1 = min_h1.min(h1);
            min_h2 = min_h2.min(s - 2.0 * phi);
        }
    }
    // H2 = r²·Ĥ with Ĥ in (t, θ): Ê = s + 2Re ψ, F̂ = −2Im ψ, Ĝ = s − 2Re ψ, ψ = φz²/r².
    // K(H2) = r^{−2}(K(Ĥ) − Δ_Ĥ t), with K(Ĥ) from the Brioschi formula.
    let psi = Field::from_fn(g, |i, k| hf.phi[(i, k)] * g.z(i, k).powi(2) / g.r(i).powi(2));
    let ee = Field::from_fn(g, |i, k| s_field[(i, k)] + 2.0 * psi[(i, k)].re);
    let ff = Field::from_fn(g, |i, k| -2.0 * psi[(i, k)].im);
    let gg = Field::from_fn(g, |i, k| s_field[(i, k)] - 2.0 * psi[(i, k)].re);
    let st = Stencils::new(g);
    let (eu, ev, evv) = (st.dt(&ee), st.dth(&ee), st.dthth(&ee));
    let (gu, gv, guu) = (st.dt(&gg), st.dth(&gg), st.dtt(&gg));
    let (fu, fv, fuv) = (st.dt(&ff), st.dth(&ff), st.dth(&st.dt(&ff)));
    let det = Field::from_fn(g, |i, k| (ee[(i, k)] * gg[(i, k)] - ff[(i, k)].powi(2)).sqrt());
    let flux_t = st.dt(&Field::from_fn(g, |i, k| gg[(i, k)] / det[(i, k)]));
    let flux_th = st.dth(&Field::from_fn(g, |i, k| -ff[(i, k)] / det[(i, k)]));
    let mut kmax = f64::NEG_INFINITY;
    let mut neg = 0usize;
    let mut count = 0usize;
    // second differences of first differences: stay clear of the one-sided rows
    for i in 4..g.n_t() - 4 {
        for k in 0..g.n_theta() {
            let p = (i, k);
            let (e_, f_, g_) = (ee[p], ff[p], gg[p]);
            let m1 = det3([
                [-0.5 * evv[p] + fuv[p] - 0.5 * guu[p], 0.5 * eu[p], fu[p] - 0.5 * ev[p]],
                [fv[p] - 0.5 * gu[p], e_, f_],
                [0.5 * gv[p], f_, g_],
            ]);
            let m2 = det3([[0.0, 0.5 * ev[p], 0.5 * gu[p]], [0.5 * ev[p], e_, f_], [0.5 * gu[p], f_, g_]]);
            let k_hat = (m1 - m2) / (e_ * g_ - f_ * f_).powi(2);
            let lap_t = (flux_t[p] + flux_th[p]) / det[p];
            let kk = (k_hat - lap_t) / g.r(i).powi(2);
            kmax = kmax.max(kk);
            if kk < 0.0 {
                neg += 1;
            }
            count += 1;
        }
    }
    Ok(SplitReport {
        min_h1,
        min_h2,
        max_curvature_h2: kmax,
        fraction_negative_curvature_h2: neg as f64 / count.max(1) as f64,
    })
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{round_cone_metric, BGrid, ConeAngle, DomainMetric};

    #[test]
    fn conformal_split_and_forced_failure() {
        let t = round_cone_metric(ConeAngle::new(1.0 / 3.0).unwrap());
        let g = BGrid::new(-2.0, 129, 16).unwrap();
        let u = MapField::from_fn(g, t.clone(), DomainMetric::Conic(t), |z| z);
        let r = pullback_split(&u, 0.5, &|_| 1.0).unwrap();
        assert!((r.min_h1 - 0.5).abs() < 1e-6 && (r.min_h2 - 0.5).abs() < 1e-6, "{r:?}");
        // flat H2 = ε|dz|² has zero curvature
        assert!(r.max_curvature_h2.abs() < 1e-3, "{}", r.max_curvature_h2);
        assert!(matches!(pullback_split(&u, 2.0, &|_| 1.0), Err(Error::SplitFails { .. })));
    }
}
