use super::series::{analyze_boundary, recentre, residue_from_series, BoundaryTrace, TwistedSeries};
use crate::geometry::{AngleClass, BGrid, Field};
use crate::prelude::*;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirichletConfig {
    pub order: usize,
    /// Largest accepted distance to the identity data.
    pub threshold: f64,
    pub twist_tolerance: f64,
}

impl Default for DirichletConfig {
    fn default() -> Self {
        DirichletConfig { order: 16, threshold: 0.25, twist_tolerance: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    pub class: AngleClass,
    pub distance_to_identity: f64,
    pub threshold: f64,
    /// `α > 1/2` and `a_{−1} ≠ 0`: the anti-holomorphic term dominates `a_0 z` and the
    /// series is not a cone map of Form 1.
    pub requires_translation: bool,
    pub residue: C64,
    pub truncation_tail: f64,
    pub reconstruction_error: f64,
}

#[derive(Clone, Debug)]
pub struct DirichletSolution {
    pub series: TwistedSeries,
    /// Cone-coordinate samples; absent when the report asks for a translation.
    pub map: Option<Field<C64>>,
    pub report: AdmissibilityReport,
}

const A_MINUS_ONE_ZERO: f64 = 1e-12;

pub fn solve_dirichlet(trace: &BoundaryTrace, grid: &BGrid, cfg: &DirichletConfig) -> Result<DirichletSolution> {
    let an = analyze_boundary(trace, cfg.order, cfg.twist_tolerance)?;
    let series = an.series;
    let dist = series.distance_to_identity();
    if dist > cfg.threshold {
        return Err(Error::BoundaryNotNearIdentity { norm: dist, threshold: cfg.threshold });
    }
    let class = series.angle().class();
    let requires_translation = class == AngleClass::GreaterThanPi && series.coeff(-1).norm() > A_MINUS_ONE_ZERO;
    let map = if requires_translation { None } else { Some(series.map_on_grid(grid)?) };
    let report = AdmissibilityReport {
        class,
        distance_to_identity: dist,
        threshold: cfg.threshold,
        requires_translation,
        residue: residue_from_series(&series),
        truncation_tail: series.tail(),
        reconstruction_error: an.reconstruction_error,
    };
    Ok(DirichletSolution { series, map, report })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AugmentedConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub trust_radius: f64,
    pub fd_step: f64,
    pub halvings: usize,
    pub order: usize,
    pub samples: usize,
}

impl Default for AugmentedConfig {
    fn default() -> Self {
        AugmentedConfig { max_iter: 30, tol: 1e-8, trust_radius: 0.5, fd_step: 1e-6, halvings: 8, order: 24, samples: 256 }
    }
}

#[derive(Clone, Debug)]
pub struct AugmentedSolution {
    /// Cone-point preimage in the original disc.
    pub w: C64,
    /// Boundary series recentred at `w`; its `a_{−1}` vanishes.
    pub series: TwistedSeries,
    pub iterations: usize,
    pub history: Vec<f64>,
}

impl AugmentedSolution {
    pub fn map_on_grid(&self, grid: &BGrid) -> Result<Field<C64>> {
        self.series.map_on_grid(grid)
    }
}

/// Solve a real 2×2 system `[[a, b], [c, d]] x = r`.
pub(crate) fn solve2(m: [[f64; 2]; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    if det.abs() <= 1e-14 * scale * scale || !det.is_finite() {
        return None;
    }
    Some([(r[0] * m[1][1] - m[0][1] * r[1]) / det, (m[0][0] * r[1] - m[1][0] * r[0]) / det])
}

/// Finds `w` with `a_{−1}` of the recentred data equal to zero (cone angle below `π`).
pub fn solve_augmented_dirichlet(series: &TwistedSeries, cfg: &AugmentedConfig) -> Result<AugmentedSolution> {
    if series.alpha() >= 0.5 {
        return Err(Error::InvalidInput("augmented problem needs cone angle below pi".into()));
    }
    let dist = series.distance_to_identity();
    if dist > DirichletConfig::default().threshold {
        return Err(Error::BoundaryNotNearIdentity { norm: dist, threshold: DirichletConfig::default().threshold });
    }
    let eval = |w: C64| -> Result<(TwistedSeries, C64)> {
        let s = recentre(series, w, cfg.order, cfg.samples)?;
        let a = s.coeff(-1);
        Ok((s, a))
    };
    let mut w = ZERO;
    let (mut cur, mut f) = eval(w)?;
    let mut history = vec![f.norm()];
    let mut best = (w, f.norm());
    for it in 0..cfg.max_iter {
        if f.norm() < cfg.tol {
            return Ok(AugmentedSolution { w, series: cur, iterations: it, history });
        }
        let h = cfg.fd_step;
        let (_, fx) = eval(w + h)?;
        let (_, fy) = eval(w + I * h)?;
        let dx = (fx - f) / h;
        let dy = (fy - f) / h;
        let step = solve2([[dx.re, dy.re], [dx.im, dy.im]], [-f.re, -f.im])
            .ok_or(Error::NoConvergence { iterations: it, history: history.clone(), best_w: Some(best.0) })?;
        let mut delta = C64::new(step[0], step[1]);
        let mut accepted = None;
        for _ in 0..=cfg.halvings {
            let trial = w + delta;
            if trial.norm() > cfg.trust_radius {
                delta *= 0.5;
                continue;
            }
            let (s, ft) = eval(trial)?;
            if ft.norm() < f.norm() {
                accepted = Some((trial, s, ft));
                break;
            }
            delta *= 0.5;
        }
        match accepted {
            Some((nw, s, nf)) => {
                w = nw;
                cur = s;
                f = nf;
                history.push(f.norm());
                if f.norm() < best.1 {
                    best = (w, f.norm());
                }
            }
            None => {
                if (w + delta * 512.0).norm() > cfg.trust_radius {
                    return Err(Error::OutOfDisc { w: w + delta * 512.0, radius: cfg.trust_radius });
                }
                return Err(Error::NoConvergence { iterations: it + 1, history, best_w: Some(best.0) });
            }
        }
    }
    if f.norm() < cfg.tol {
        return Ok(AugmentedSolution { w, series: cur, iterations: cfg.max_iter, history });
    }
    Err(Error::NoConvergence { iterations: cfg.max_iter, history, best_w: Some(best.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConeAngle;

    fn series(alpha: f64, am1: f64) -> TwistedSeries {
        TwistedSeries::with_coeffs(ConeAngle::new(alpha).unwrap(), 8, &[(0, ONE), (-1, C64::new(am1, 0.0))]).unwrap()
    }

    #[test]
    fn identity_data_is_clean() {
        let s = series(1.0 / 3.0, 0.0);
        let g = BGrid::new(-3.0, 17, 16).unwrap();
        let sol = solve_dirichlet(&BoundaryTrace::from_series(&s, 64), &g, &DirichletConfig::default()).unwrap();
        assert!(!sol.report.requires_translation);
        assert!(sol.report.residue.norm() < 1e-14);
        let map = sol.map.unwrap();
        for i in 0..g.n_t() {
            for k in 0..g.n_theta() {
                assert!((map[(i, k)] - g.z(i, k)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn dichotomy() {
        let g = BGrid::new(-3.0, 17, 16).unwrap();
        let cfg = DirichletConfig::default();
        let big = solve_dirichlet(&BoundaryTrace::from_series(&series(0.75, 0.05), 64), &g, &cfg).unwrap();
        assert!(big.report.requires_translation);
        assert!(big.map.is_none());
        let small = solve_dirichlet(&BoundaryTrace::from_series(&series(0.3, 0.05), 64), &g, &cfg).unwrap();
        assert!(!small.report.requires_translation);
        assert!((small.report.residue.re - 0.05 * (1.0 / 0.3 - 1.0)).abs() < 1e-12);
        let far = series(0.3, 0.5);
        assert!(matches!(
            solve_dirichlet(&BoundaryTrace::from_series(&far, 64), &g, &cfg),
            Err(Error::BoundaryNotNearIdentity { .. })
        ));
    }

    #[test]
    fn augmented_converges() {
        let cfg = AugmentedConfig::default();
        let id = solve_augmented_dirichlet(&series(1.0 / 3.0, 0.0), &cfg).unwrap();
        assert_eq!(id.iterations, 0);
        assert_eq!(id.w, ZERO);
        let sol = solve_augmented_dirichlet(&series(1.0 / 3.0, 0.05), &cfg).unwrap();
        assert!(sol.series.coeff(-1).norm() < 1e-8);
        assert!(sol.w.norm() < 0.2 && sol.w.norm() > 0.0);
        assert!(sol.iterations <= 10);
        assert!(matches!(solve_augmented_dirichlet(&series(0.6, 0.05), &cfg), Err(Error::InvalidInput(_))));
    }
}
