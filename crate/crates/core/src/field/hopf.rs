use super::MapField;
use crate::geometry::{BGrid, Field, Stencils};
use crate::prelude::*;
use crate::{Error, Result};

/// Hopf coefficient `φ` of `Φ = φ dz²` with residue data at the cone point.
#[derive(Clone, Debug)]
pub struct HopfField {
    pub grid: BGrid,
    pub phi: Field<C64>,
    pub residue_at_origin: C64,
    /// Largest deviation of the contour residue over the default radii.
    pub residue_deviation: f64,
    /// `sup |∂_z̄ φ| r^{2−2α−ε}` over interior rows.
    pub dbar_residual: f64,
}

/// `φ = ρ(u) u_z (ū)_z = ρ(u)·D⁻u·conj(D⁺u)/(4z²)`; the `∂̄`-residual is weighted with the
/// Form-1 exponent when one was fitted.
pub fn hopf(u: &MapField) -> Result<HopfField> {
    hopf_with(u, u.form_fit.map_or(0.0, |f| f.epsilon))
}

pub fn hopf_with(u: &MapField, eps_report: f64) -> Result<HopfField> {
    u.check_puncture()?;
    let g = u.grid;
    let st = Stencils::new(&g);
    let jet = u.jet(&st);
    let phi = Field::from_fn(&g, |i, k| {
        let z = g.z(i, k);
        u.target.density(u.samples[(i, k)]) * jet.dminus(i, k) * jet.dplus(i, k).conj() / (4.0 * z * z)
    });
    let a = u.target.alpha();
    let dt = st.dt(&phi);
    let dth = st.dth(&phi);
    let mut dbar: f64 = 0.0;
    for i in 2..g.n_t() - 2 {
        let r = g.r(i);
        let w = r.powf(2.0 - 2.0 * a - eps_report) / (2.0 * r);
        for k in 0..g.n_theta() {
            dbar = dbar.max((dt[(i, k)] + I * dth[(i, k)]).norm() * w);
        }
    }
    let n = g.n_t();
    let rows = [n / 4, n / 2, (3 * n) / 4];
    let per = row_residues(&g, &phi);
    let vals: Vec<C64> = rows.iter().map(|&i| per[i]).collect();
    let (mean, dev) = mean_and_spread(&vals);
    Ok(HopfField { grid: g, phi, residue_at_origin: mean, residue_deviation: dev, dbar_residual: dbar })
}

/// `(1/2πi)∮_{|z|=r_i} φ dz` on every row, by the trapezoid rule.
pub fn row_residues(grid: &BGrid, phi: &Field<C64>) -> Vec<C64> {
    let n = grid.n_theta();
    (0..grid.n_t())
        .map(|i| (0..n).map(|k| phi[(i, k)] * grid.z(i, k)).sum::<C64>() / n as f64)
        .collect()
}

fn mean_and_spread(v: &[C64]) -> (C64, f64) {
    let mean = v.iter().sum::<C64>() / v.len() as f64;
    let mut dev: f64 = 0.0;
    for a in v {
        for b in v {
            dev = dev.max((a - b).norm());
        }
    }
    (mean, dev)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourResidue {
    pub mean: C64,
    pub max_deviation: f64,
    pub per_radius: Vec<C64>,
}

/// Contour residues at the requested radii (interpolated in `t` between rows) and their spread.
pub fn contour_residue(grid: &BGrid, phi: &Field<C64>, radii: &[f64], tolerance: f64) -> Result<ContourResidue> {
    if radii.len() < 3 {
        return Err(Error::InvalidInput("need at least three contour radii".into()));
    }
    let per_row = row_residues(grid, phi);
    let n = grid.n_t();
    let mut per = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r >= grid.r_min() && r <= 1.0) {
            return Err(Error::InvalidInput(alloc::format!("radius {r} outside the grid")));
        }
        let x = (r.ln() - grid.t_min()) / grid.h_t();
        let nearest = x.round();
        if (x - nearest).abs() < 1e-9 {
            per.push(per_row[nearest as usize]);
            continue;
        }
        let start = (x.floor() as isize - 2).clamp(0, n as isize - 6) as usize;
        let mut acc = ZERO;
        for j in start..start + 6 {
            let mut l = 1.0;
            for m in start..start + 6 {
                if m != j {
                    l *= (x - m as f64) / (j as f64 - m as f64);
                }
            }
            acc += per_row[j] * l;
        }
        per.push(acc);
    }
    let (mean, dev) = mean_and_spread(&per);
    if dev > 10.0 * tolerance {
        return Err(Error::InconsistentResidue { deviation: dev, tolerance });
    }
    Ok(ContourResidue { mean, max_deviation: dev, per_radius: per })
}

/// Derivative of `φ(u)` at `u0` in the direction `ψ`.
pub fn linearized_hopf(u0: &MapField, psi: &Field<C64>) -> Result<Field<C64>> {
    u0.check_puncture()?;
    let g = u0.grid;
    let st = Stencils::new(&g);
    let j0 = u0.jet(&st);
    let pt = st.dt(psi);
    let pth = st.dth(psi);
    Ok(Field::from_fn(&g, |i, k| {
        let z = g.z(i, k);
        let v = u0.samples[(i, k)];
        let rho = u0.target.density(v);
        let drho = 2.0 * rho * (u0.target.gamma(v) * psi[(i, k)]).re;
        let (dm, dp) = (j0.dminus(i, k), j0.dplus(i, k));
        let (pm, pp) = (pt[(i, k)] - I * pth[(i, k)], pt[(i, k)] + I * pth[(i, k)]);
        (drho * dm * dp.conj() + rho * (pm * dp.conj() + dm * pp.conj())) / (4.0 * z * z)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{round_cone_metric, ConeAngle, DomainMetric};
    use crate::spectral::{residue_from_series, TwistedSeries};

    #[test]
    fn simple_poles() {
        let g = BGrid::new(-3.0, 33, 16).unwrap();
        let pole = Field::from_fn(&g, |i, k| 1.0 / g.z(i, k));
        let radii = [0.1, 0.3, 0.7];
        let r = contour_residue(&g, &pole, &radii, 1e-12).unwrap();
        assert!((r.mean - 1.0).norm() < 1e-14);
        let double = Field::from_fn(&g, |i, k| 1.0 / (g.z(i, k) * g.z(i, k)));
        assert!(contour_residue(&g, &double, &radii, 1e-12).unwrap().mean.norm() < 1e-14);
        let bad = Field::from_fn(&g, |i, k| g.r(i) / g.z(i, k));
        assert!(matches!(contour_residue(&g, &bad, &radii, 1e-8), Err(Error::InconsistentResidue { .. })));
    }

    #[test]
    fn conformal_maps_have_vanishing_hopf() {
        let t = round_cone_metric(ConeAngle::new(0.4).unwrap());
        let g = BGrid::new(-2.0, 129, 16).unwrap();
        let u = MapField::from_fn(g, t, DomainMetric::Flat, |z| C64::new(0.5, 1.0) * z);
        let h = hopf(&u).unwrap();
        let scaled = Field::from_fn(&g, |i, k| h.phi[(i, k)] * g.z(i, k) * g.z(i, k));
        assert!(scaled.sup_norm() < 1e-6, "{}", scaled.sup_norm());
    }

    #[test]
    fn spectral_residue_matches_contour() {
        let angle = ConeAngle::new(1.0 / 3.0).unwrap();
        let s = TwistedSeries::with_coeffs(angle, 8, &[(0, ONE), (-1, C64::new(0.1, 0.0))]).unwrap();
        let g = BGrid::new(-2.0, 257, 32).unwrap();
        let u = MapField::new(g, s.map_on_grid(&g).unwrap(), round_cone_metric(angle), DomainMetric::Flat).unwrap();
        let h = hopf(&u).unwrap();
        let c = contour_residue(&g, &h.phi, &[0.3, 0.5, 0.8], 1e-9).unwrap();
        let expect = residue_from_series(&s);
        assert!((c.mean - expect).norm() < 1e-8 * expect.norm(), "{} vs {}", c.mean, expect);
    }
}
