use super::newton::newton_relax;
use super::SolverConfig;
use crate::field::{hopf_with, MapField};
use crate::geometry::stencil::{dft, frequency};
use crate::geometry::Field;
use crate::prelude::*;
use crate::spectral::solve2;
use crate::{Error, Result};

/// Trigonometric interpolant of boundary samples, evaluated at angle `theta`.
fn interpolate(hat: &[C64], theta: f64) -> C64 {
    let n = hat.len();
    hat.iter()
        .enumerate()
        .map(|(m, &c)| {
            let j = frequency(m, n);
            if n % 2 == 0 && 2 * m == n {
                c * (j as f64 * theta).cos()
            } else {
                c * C64::from_polar(1.0, j as f64 * theta)
            }
        })
        .sum()
}

/// Boundary data precomposed with the disc automorphism taking `w` to the origin:
/// samples of `φ(e^{iθ'})` with `e^{iθ'} = (e^{iθ} + w)/(1 + w̄ e^{iθ})`.
pub fn recentred_boundary(boundary: &[C64], w: C64) -> Vec<C64> {
    let n = boundary.len();
    let hat = dft(boundary);
    (0..n)
        .map(|k| {
            let e = C64::from_polar(1.0, TAU * k as f64 / n as f64);
            let m = (e + w) / (ONE + w.conj() * e);
            interpolate(&hat, m.im.atan2(m.re))
        })
        .collect()
}

/// Residue of the Hopf differential at the origin (mean over three contour rows).
pub fn residue_at_origin(u: &MapField) -> Result<C64> {
    Ok(hopf_with(u, 0.0)?.residue_at_origin)
}

#[derive(Clone, Debug)]
pub struct ConePointSolution {
    /// Preimage of the cone point in the original disc.
    pub w: C64,
    pub map: MapField,
    pub residue: C64,
    pub iterations: usize,
    /// `|residue|` after each accepted outer step.
    pub history: Vec<f64>,
}

/// Relaxes with boundary data recentred at `w`, warm-started from `prev`.
pub(crate) fn relax_recentred(prev: &MapField, base: &[C64], w: C64, cfg: &SolverConfig) -> Result<MapField> {
    let g = prev.grid;
    let target = recentred_boundary(base, w);
    let old = prev.boundary().to_vec();
    let init = Field::from_fn(&g, |i, k| prev.samples[(i, k)] + (target[k] - old[k]) * g.r(i).powi(2));
    Ok(newton_relax(&prev.with_samples(init), &target, cfg)?.map)
}

/// Outer Newton on the cone-point preimage `w` driving the Hopf residue at the origin to zero.
pub fn move_cone_point(u: &MapField, cfg: &SolverConfig) -> Result<ConePointSolution> {
    if u.target.alpha() >= 0.5 {
        return Err(Error::InvalidInput("cone-point translation needs cone angle below pi".into()));
    }
    let base = u.boundary().to_vec();
    let eval = |prev: &MapField, w: C64| -> Result<(MapField, C64)> {
        let m = relax_recentred(prev, &base, w, cfg)?;
        let r = residue_at_origin(&m)?;
        Ok((m, r))
    };
    let mut w = ZERO;
    let (mut cur, mut f) = eval(u, w)?;
    let mut history = vec![f.norm()];
    let mut best = (w, f.norm());
    for it in 0..cfg.max_outer {
        if f.norm() < cfg.outer_tol {
            return Ok(ConePointSolution { w, map: cur, residue: f, iterations: it, history });
        }
        let h = cfg.fd_step;
        let (_, fx) = eval(&cur, w + h)?;
        let (_, fy) = eval(&cur, w + I * h)?;
        let dx = (fx - f) / h;
        let dy = (fy - f) / h;
        let step = solve2([[dx.re, dy.re], [dx.im, dy.im]], [-f.re, -f.im])
            .ok_or(Error::NoConvergence { iterations: it, history: history.clone(), best_w: Some(best.0) })?;
        let mut delta = C64::new(step[0], step[1]);
        let mut accepted = None;
        for _ in 0..=cfg.damping {
            let trial = w + delta;
            if trial.norm() > cfg.trust_radius {
                delta *= 0.5;
                continue;
            }
            if let Ok((m, ft)) = eval(&cur, trial) {
                if ft.norm() < f.norm() {
                    accepted = Some((trial, m, ft));
                    break;
                }
            }
            delta *= 0.5;
        }
        match accepted {
            Some((nw, m, nf)) => {
                w = nw;
                cur = m;
                f = nf;
                history.push(f.norm());
                if f.norm() < best.1 {
                    best = (w, f.norm());
                }
            }
            None => {
                let full = w + delta * (1u64 << (cfg.damping + 1)) as f64;
                if full.norm() > cfg.trust_radius {
                    return Err(Error::OutOfDisc { w: full, radius: cfg.trust_radius });
                }
                return Err(Error::NoConvergence { iterations: it + 1, history, best_w: Some(best.0) });
            }
        }
    }
    if f.norm() < cfg.outer_tol {
        return Ok(ConePointSolution { w, map: cur, residue: f, iterations: cfg.max_outer, history });
    }
    Err(Error::NoConvergence { iterations: cfg.max_outer, history, best_w: Some(best.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{round_cone_metric, BGrid, ConeAngle, DomainMetric};
    use crate::spectral::{solve_augmented_dirichlet, AugmentedConfig, TwistedSeries};

    #[test]
    fn recentring_at_zero_is_the_identity() {
        let b: Vec<C64> = (0..16).map(|k| C64::from_polar(1.0, TAU * k as f64 / 16.0) * 1.1 + 0.05).collect();
        let r = recentred_boundary(&b, ZERO);
        for (x, y) in b.iter().zip(&r) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn agrees_with_the_spectral_augmented_solve() {
        let angle = ConeAngle::new(0.3).unwrap();
        let series = TwistedSeries::with_coeffs(angle, 16, &[(0, ONE), (-1, C64::new(0.04, 0.02))]).unwrap();
        let exact = solve_augmented_dirichlet(&series, &AugmentedConfig::default()).unwrap();
        let g = BGrid::new(-4.0, 97, 24).unwrap();
        let samples = series.map_on_grid(&g).unwrap();
        let u = MapField::new(g, samples, round_cone_metric(angle), DomainMetric::Flat).unwrap();
        let sol = move_cone_point(&u, &SolverConfig { outer_tol: 1e-9, ..SolverConfig::default() }).unwrap();
        std::println!("w = {} vs {} after {} ({:?})", sol.w, exact.w, sol.iterations, sol.history);
        assert!((sol.w - exact.w).norm() < 1e-6);
    }
}
