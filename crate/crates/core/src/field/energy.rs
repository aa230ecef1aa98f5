use super::MapField;
use crate::geometry::{BGrid, ConicMetric, Field, Stencils};
use crate::prelude::*;
use crate::Result;

/// `e = (ρ(u)/σ)(|u_z|² + |u_z̄|²)`.
pub fn energy_density(u: &MapField) -> Result<Field<f64>> {
    Ok(h_l_jacobian(u)?.e)
}

#[derive(Clone, Debug)]
pub struct HLJ {
    pub h: Field<f64>,
    pub l: Field<f64>,
    pub jac: Field<f64>,
    pub e: Field<f64>,
}

/// `h = (ρ/σ)|u_z|²`, `ℓ = (ρ/σ)|u_z̄|²`, `J = h − ℓ`, `e = h + ℓ`.
pub fn h_l_jacobian(u: &MapField) -> Result<HLJ> {
    u.check_puncture()?;
    let g = &u.grid;
    let st = Stencils::new(g);
    let jet = u.jet(&st);
    let mut h = Field::filled(g, 0.0);
    let mut l = Field::filled(g, 0.0);
    for i in 0..g.n_t() {
        let r2 = g.r(i).powi(2);
        for k in 0..g.n_theta() {
            let z = g.z(i, k);
            let w = u.target.density(u.samples[(i, k)]) / (u.domain.sigma(z) * 4.0 * r2);
            h[(i, k)] = w * jet.dminus(i, k).norm_sqr();
            l[(i, k)] = w * jet.dplus(i, k).norm_sqr();
        }
    }
    let jac = h.zip_map(&l, |a, b| a - b);
    let e = h.zip_map(&l, |a, b| a + b);
    Ok(HLJ { h, l, jac, e })
}

fn simpson_weights(m: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; m + 1];
    match m {
        0 => {}
        1 => {
            w[0] = h / 2.0;
            w[1] = h / 2.0;
        }
        _ => {
            let (simp, tail) = if m % 2 == 0 { (m, 0) } else { (m - 3, 3) };
            for j in (0..simp).step_by(2) {
                w[j] += h / 3.0;
                w[j + 1] += 4.0 * h / 3.0;
                w[j + 2] += h / 3.0;
            }
            if tail == 3 {
                let s = simp;
                for (d, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
                    w[s + d] += 3.0 * h / 8.0 * c;
                }
            }
        }
    }
    w
}

/// `½∫ρ(u)(|u_z|²+|u_z̄|²) r dr dθ` over `r_in ≤ r ≤ 1`, with `r_in` snapped to the nearest row.
/// Trapezoid in `θ`, composite Simpson in `t`.
pub fn total_energy(u: &MapField, r_in: f64) -> Result<f64> {
    u.check_puncture()?;
    let g = &u.grid;
    let st = Stencils::new(g);
    let jet = u.jet(&st);
    let i0 = g.row_near(r_in);
    let w = simpson_weights(g.n_t() - 1 - i0, g.h_t());
    let ht = g.h_theta();
    let mut total = 0.0;
    for i in i0..g.n_t() {
        let mut row = 0.0;
        for k in 0..g.n_theta() {
            let d = jet.ut[(i, k)].norm_sqr() + jet.uth[(i, k)].norm_sqr();
            row += u.target.density(u.samples[(i, k)]) * d;
        }
        total += w[i - i0] * row * ht;
    }
    Ok(0.25 * total)
}

/// Energy of `λz` on the collar `|z| < r_in`: `c π |λ|^{2α} r_in^{2α} / (2α)`.
pub fn collar_energy(target: &ConicMetric, lambda: C64, r_in: f64) -> f64 {
    let a = target.alpha();
    target.c * PI * lambda.norm().powf(2.0 * a) * r_in.powf(2.0 * a) / (2.0 * a)
}

/// `λ ≈ mean_θ u/z` on the innermost row.
pub fn leading_coefficient(grid: &BGrid, samples: &Field<C64>) -> C64 {
    let n = grid.n_theta();
    (0..n).map(|k| samples[(0, k)] / grid.z(0, k)).sum::<C64>() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{round_cone_metric, ConeAngle, DomainMetric};

    #[test]
    fn densities_of_simple_maps() {
        let angle = ConeAngle::new(1.0 / 3.0).unwrap();
        let t = round_cone_metric(angle);
        let g = BGrid::new(-2.0, 129, 16).unwrap();
        let id = MapField::from_fn(g, t.clone(), DomainMetric::Flat, |z| z);
        let e = energy_density(&id).unwrap();
        for i in 0..g.n_t() {
            assert!((e[(i, 3)] / g.r(i).powf(2.0 * angle.alpha() - 2.0) - 1.0).abs() < 1e-7);
        }
        let lam = C64::new(1.5, -0.4);
        let conic = MapField::from_fn(g, t.clone(), DomainMetric::Conic(t.clone()), |z| lam * z);
        let e = energy_density(&conic).unwrap();
        let expect = lam.norm().powf(2.0 * angle.alpha());
        assert!(e.as_slice().iter().all(|x| (x - expect).abs() < 1e-7));
    }

    #[test]
    fn shear_splits_into_h_and_l() {
        let flat = round_cone_metric(ConeAngle::new(0.5).unwrap());
        let g = BGrid::new(-1.0, 65, 16).unwrap();
        let u = MapField::from_fn(g, flat.clone(), DomainMetric::Flat, |z| z + 0.1 * z.conj());
        let d = h_l_jacobian(&u).unwrap();
        for i in 0..g.n_t() {
            for k in 0..g.n_theta() {
                let rho = flat.density(u.samples[(i, k)]);
                assert!((d.h[(i, k)] / rho - 1.0).abs() < 1e-7);
                assert!((d.l[(i, k)] / rho - 0.01).abs() < 1e-7);
                assert_eq!(d.e[(i, k)], d.h[(i, k)] + d.l[(i, k)]);
                assert_eq!(d.jac[(i, k)], d.h[(i, k)] - d.l[(i, k)]);
            }
        }
    }

    #[test]
    fn identity_energy_with_collar() {
        let angle = ConeAngle::new(0.5).unwrap();
        let t = round_cone_metric(angle);
        let g = BGrid::new(-6.0, 129, 16).unwrap();
        let id = MapField::from_fn(g, t.clone(), DomainMetric::Flat, |z| z);
        let e = total_energy(&id, g.r_min()).unwrap() + collar_energy(&t, ONE, g.r_min());
        assert!((e - PI).abs() < 1e-6, "{e}");
    }

    #[test]
    fn simpson_handles_odd_interval_counts() {
        for m in 2..9 {
            let w = simpson_weights(m, 0.5);
            let s: f64 = w.iter().sum();
            assert!((s - 0.5 * m as f64).abs() < 1e-14);
            let cubic: f64 = w.iter().enumerate().map(|(j, c)| c * (0.5 * j as f64).powi(3)).sum();
            assert!((cubic - (0.5 * m as f64).powi(4) / 4.0).abs() < 1e-12, "{m}");
        }
    }
}
