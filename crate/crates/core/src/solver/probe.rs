use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{collar_energy, leading_coefficient, total_energy, MapField};
use crate::geometry::{weighted_b_norm, BGrid, Field, WeightedNormSpec};
use crate::prelude::*;
use crate::{Error, Result};

/// Annulus energy plus the closed-form energy of the leading term on the inner collar.
pub fn full_energy(u: &MapField) -> Result<f64> {
    let g = &u.grid;
    let lambda = leading_coefficient(g, &u.samples);
    Ok(total_energy(u, g.r_min())? + collar_energy(&u.target, lambda, g.r_min()))
}

/// Random field with Fourier modes `|j| ≤ n_θ/4`, radial profile `Σ_m c sin(mπ(t−t_min)/|t_min|)`
/// (zero on both circles), scaled to sup-norm `amplitude`.
pub fn band_limited_perturbation(grid: &BGrid, rng: &mut impl Rng, amplitude: f64) -> Field<C64> {
    let jmax = (grid.n_theta() / 4) as i32;
    let len = -grid.t_min();
    let mut terms = Vec::new();
    for j in -jmax..=jmax {
        for m in 1..=4 {
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (m * (1 + j.abs())) as f64;
            terms.push((j, m, c));
        }
    }
    let f = Field::from_fn(grid, |i, k| {
        let s = (grid.t(i) - grid.t_min()) / len;
        terms
            .iter()
            .map(|&(j, m, c)| c * (m as f64 * PI * s).sin() * C64::from_polar(1.0, j as f64 * grid.theta(k)))
            .sum::<C64>()
    });
    let norm = weighted_b_norm(grid, &f, &WeightedNormSpec::new(0.0, 0, None));
    if amplitude == 0.0 || norm == 0.0 {
        return Field::filled(grid, ZERO);
    }
    f.map(|v| v * (amplitude / norm))
}

#[derive(Clone, Debug)]
pub struct MinimalityReport {
    pub base_energy: f64,
    /// `E(u* + δ) − E(u*)` per sample.
    pub margins: Vec<f64>,
    pub min_margin: f64,
}

/// Samples perturbations vanishing on `r = 1` and at `r_min` and checks that none lowers the energy.
pub fn energy_minimality_probe(u_star: &MapField, n_samples: usize, amplitude: f64, seed: u64) -> Result<MinimalityReport> {
    let g = u_star.grid;
    let base = full_energy(u_star)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut margins = Vec::with_capacity(n_samples);
    for sample in 0..n_samples {
        let delta = band_limited_perturbation(&g, &mut rng, amplitude);
        let e = full_energy(&u_star.with_samples(u_star.samples.zip_map(&delta, |a, b| a + b)))?;
        let margin = e - base;
        // roundoff allowance only
        if margin < -1e-13 * base.abs().max(1.0) {
            return Err(Error::MinimalityViolated { margin, sample, witness: delta.into_vec() });
        }
        margins.push(margin);
    }
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MinimalityReport { base_energy: base, margins, min_margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{round_cone_metric, ConeAngle, DomainMetric};

    #[test]
    fn conformal_identity_is_a_minimizer() {
        let g = BGrid::new(-3.0, 65, 16).unwrap();
        let u = MapField::from_fn(g, round_cone_metric(ConeAngle::new(0.4).unwrap()), DomainMetric::Flat, |z| z);
        let rep = energy_minimality_probe(&u, 100, 0.01, 1).unwrap();
        assert!(rep.min_margin > 0.0);
        let zero = energy_minimality_probe(&u, 5, 0.0, 1).unwrap();
        assert!(zero.margins.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn perturbations_vanish_on_both_circles() {
        let g = BGrid::new(-3.0, 33, 16).unwrap();
        let d = band_limited_perturbation(&g, &mut ChaCha8Rng::seed_from_u64(3), 0.5);
        assert!(d.row(0).iter().chain(d.row(32)).all(|v| v.norm() < 1e-15));
        assert!((d.sup_norm() - 0.5).abs() < 1e-12);
    }
}
