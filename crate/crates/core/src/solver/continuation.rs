use super::cone_point::move_cone_point;
use super::newton::{newton_relax, newton_residual};
use super::probe::full_energy;
use super::SolverConfig;
use crate::diagnostics::form_fit;
use crate::field::{hopf_with, FormFit, MapField};
use crate::geometry::{ConicMetric, Stencils};
use crate::prelude::*;
use crate::{Error, Result};

/// One-parameter family of problems on `t ∈ [0, 1]` and a solution at `t = 0`.
pub struct ContinuationPath<'a> {
    /// Boundary samples on `r = 1` at parameter `t`.
    pub boundary: Box<dyn Fn(f64) -> Vec<C64> + 'a>,
    pub target: Box<dyn Fn(f64) -> ConicMetric + 'a>,
    pub initial: MapField,
    /// Also translate the cone-point preimage so that the residue vanishes.
    pub residue_free: bool,
}

#[derive(Clone, Debug)]
pub struct ContinuationStep {
    pub t: f64,
    pub map: MapField,
    pub energy: f64,
    pub residue: C64,
    pub form_fit: Option<FormFit>,
    pub tension_residual: f64,
    /// Cone-point preimage when residue-free solutions are requested.
    pub w: Option<C64>,
}

fn record(t: f64, map: MapField, w: Option<C64>, cfg: &SolverConfig) -> Result<ContinuationStep> {
    let st = Stencils::new(&map.grid);
    let (_, tension_residual) = newton_residual(&map, &st, cfg)?;
    let fit = form_fit(&map).ok().map(|r| r.fit);
    Ok(ContinuationStep {
        t,
        energy: full_energy(&map)?,
        residue: hopf_with(&map, 0.0)?.residue_at_origin,
        form_fit: fit,
        tension_residual,
        w,
        map,
    })
}

/// Returns the relaxed solution for the data at `t` and, when requested, its translated version.
fn corrector(
    path: &ContinuationPath,
    prev: &MapField,
    t: f64,
    cfg: &SolverConfig,
) -> Result<(MapField, Option<(MapField, C64)>)> {
    let mut guess = prev.clone();
    guess.target = (path.target)(t);
    let boundary = (path.boundary)(t);
    let relaxed = newton_relax(&guess, &boundary, cfg)?.map;
    if path.residue_free {
        let moved = move_cone_point(&relaxed, cfg)?;
        Ok((relaxed, Some((moved.map, moved.w))))
    } else {
        Ok((relaxed, None))
    }
}

/// Method of continuity with the previous solution as predictor; halves the step on failure.
pub fn continue_path(path: &ContinuationPath, cfg: &SolverConfig) -> Result<Vec<ContinuationStep>> {
    let st = Stencils::new(&path.initial.grid);
    let mut start = path.initial.clone();
    start.target = (path.target)(0.0);
    let (_, r0) = newton_residual(&start, &st, cfg)?;
    if r0 >= cfg.newton_tol {
        // sampled exact solutions carry stencil error; polish onto the discrete solution
        let boundary = (path.boundary)(0.0);
        start = newton_relax(&start, &boundary, cfg)
            .map_err(|e| Error::InvalidInput(format!("initial map is not a solution at t = 0 ({r0:e}): {e}")))?
            .map;
    }
    let w0 = if path.residue_free { Some(ZERO) } else { None };
    let mut steps = vec![record(0.0, start.clone(), w0, cfg)?];
    // unrecentred solution carried between steps
    let mut base = start;
    let mut t = 0.0;
    let mut h = 1.0 / cfg.continuation_steps.max(1) as f64;
    while t < 1.0 - 1e-14 {
        let next = (t + h).min(1.0);
        match corrector(path, &base, next, cfg) {
            Ok((relaxed, moved)) => {
                let step = match moved {
                    Some((map, w)) => record(next, map, Some(w), cfg)?,
                    None => record(next, relaxed.clone(), None, cfg)?,
                };
                base = relaxed;
                steps.push(step);
                t = next;
            }
            Err(_) => {
                h *= 0.5;
                if h < cfg.min_step {
                    return Err(Error::PathStuck { t, step: h });
                }
            }
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{round_cone_metric, BGrid, ConeAngle, DomainMetric, MuProfile};

    fn setup(alpha: f64) -> (BGrid, ConeAngle, MapField) {
        let g = BGrid::new(-4.0, 65, 16).unwrap();
        let a = ConeAngle::new(alpha).unwrap();
        let u = MapField::from_fn(g, round_cone_metric(a), DomainMetric::Flat, |z| z);
        (g, a, u)
    }

    #[test]
    fn constant_path_stays_put() {
        let (g, a, u) = setup(1.0 / 3.0);
        let b = u.boundary().to_vec();
        let path = ContinuationPath {
            boundary: Box::new(move |_| b.clone()),
            target: Box::new(move |_| round_cone_metric(a)),
            initial: u.clone(),
            residue_free: false,
        };
        let cfg = SolverConfig { continuation_steps: 4, newton_tol: 1e-7, ..SolverConfig::default() };
        let steps = continue_path(&path, &cfg).unwrap();
        assert_eq!(steps.len(), 5);
        for s in &steps {
            assert!(s.map.samples.zip_map(&steps[0].map.samples, |p, q| p - q).sup_norm() < 1e-12);
            assert!(s.map.samples.zip_map(&u.samples, |p, q| p - q).sup_norm() < 1e-5);
        }
        let _ = g;
    }

    #[test]
    fn metric_path_is_continuous() {
        let (_, a, u) = setup(1.0 / 3.0);
        let b: Vec<C64> = u.boundary().iter().map(|z| z + 0.03 + 0.02 * z * z).collect();
        let cfg = SolverConfig::default();
        let start = newton_relax(&u, &b, &cfg).unwrap().map;
        let path = ContinuationPath {
            boundary: Box::new(move |_| b.clone()),
            target: Box::new(move |t| ConicMetric::new(a, 1.0, MuProfile::single(0.05 * t, 2.0 / 3.0, 1)).unwrap()),
            initial: start,
            residue_free: false,
        };
        let steps = continue_path(&path, &cfg).unwrap();
        assert_eq!(steps.len(), 11);
        let jump = steps.windows(2).map(|w| (w[1].energy - w[0].energy).abs()).fold(0.0, f64::max);
        let curv = steps
            .windows(3)
            .map(|w| (w[2].energy - 2.0 * w[1].energy + w[0].energy).abs())
            .fold(0.0, f64::max);
        assert!(jump < 2e-3 && curv < 1e-4, "{jump} {curv}");
        assert!(steps.iter().all(|s| s.tension_residual < 1e-9));
    }

    #[test]
    fn residue_free_boundary_path() {
        let (g, a, u) = setup(1.0 / 3.0);
        let n = g.n_theta();
        let bnd = move |t: f64| -> Vec<C64> {
            (0..n)
                .map(|k| {
                    let th = g.theta(k);
                    C64::from_polar(1.0, th) + t * 0.05 * C64::from_polar(1.0, (1.0 - 3.0) * th)
                })
                .collect()
        };
        let path = ContinuationPath {
            boundary: Box::new(bnd),
            target: Box::new(move |_| round_cone_metric(a)),
            initial: u,
            residue_free: true,
        };
        let cfg = SolverConfig { continuation_steps: 4, newton_tol: 1e-8, outer_tol: 1e-8, ..SolverConfig::default() };
        let steps = continue_path(&path, &cfg).unwrap();
        let w: Vec<f64> = steps.iter().map(|s| s.w.unwrap().norm()).collect();
        assert!(w.windows(2).all(|p| p[1] >= p[0]), "{w:?}");
        assert!(steps.iter().all(|s| s.residue.norm() < 1e-8));
    }
}
