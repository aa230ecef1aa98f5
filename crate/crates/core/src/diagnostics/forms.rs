use crate::field::{FormFit, MapField};
use crate::geometry::{weighted_b_norm, AngleClass, BGrid, Field, WeightedNormSpec};
use crate::linearization::{asymptotic_fit, FitOptions};
use crate::prelude::*;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FormFitReport {
    pub fit: FormFit,
    /// Remainder exponent `1 + ε`.
    pub exponent: f64,
    pub goodness: f64,
    /// `(a, b)` of `ũ = a z̃ + b z̄̃ + ṽ` on the double cover, cone angle `π` only.
    pub double_cover: Option<(C64, C64)>,
}

/// Rows with `r ≤ 10 r_min`.
fn innermost_decade(grid: &BGrid) -> usize {
    let lim = 10.0 * grid.r_min();
    (0..grid.n_t()).take_while(|&i| grid.r(i) <= lim).count().max(3)
}

/// Least squares `u ≈ λz` on the innermost decade.
fn fit_lambda(grid: &BGrid, u: &Field<C64>) -> C64 {
    let (mut num, mut den) = (ZERO, 0.0);
    for i in 0..innermost_decade(grid) {
        for k in 0..grid.n_theta() {
            let z = grid.z(i, k);
            num += u[(i, k)] * z.conj();
            den += z.norm_sqr();
        }
    }
    num / den
}

/// Branch of `√u(z̃²)` on the double-cover grid (`t̃ = t/2`), odd under `z̃ ↦ −z̃`.
fn lift(grid: &BGrid, u: &Field<C64>) -> Result<(BGrid, Field<C64>)> {
    let n = grid.n_theta();
    if n % 2 != 0 {
        return Err(Error::InvalidGrid("the double cover needs an even number of angles"));
    }
    let lg = BGrid::new(grid.t_min() / 2.0, grid.n_t(), n)?;
    let mut out = Field::filled(&lg, ZERO);
    let mut anchor: Option<C64> = None;
    for i in 0..grid.n_t() {
        let mut prev = anchor;
        for kt in 0..n / 2 {
            let s = u[(i, (2 * kt) % n)].sqrt();
            let v = match prev {
                Some(p) if (s + p).norm() < (s - p).norm() => -s,
                _ => s,
            };
            if kt == 0 {
                anchor = Some(v);
            }
            out[(i, kt)] = v;
            out[(i, kt + n / 2)] = -v;
            prev = Some(v);
        }
    }
    Ok((lg, out))
}

fn fit_ab(grid: &BGrid, u: &Field<C64>) -> (C64, C64) {
    let (mut pp, mut pq, mut qq, mut up, mut uq) = (0.0, ZERO, 0.0, ZERO, ZERO);
    for i in 0..innermost_decade(grid) {
        for k in 0..grid.n_theta() {
            let p = grid.z(i, k);
            let q = p.conj();
            pp += p.norm_sqr();
            qq += q.norm_sqr();
            pq += q * p.conj();
            up += u[(i, k)] * p.conj();
            uq += u[(i, k)] * q.conj();
        }
    }
    // [pp  pq; conj(pq) qq] [a; b] = [up; uq]
    let det = pp * qq - pq.norm_sqr();
    let a = (up * qq - pq * uq) / det;
    let b = (uq * pp - pq.conj() * up) / det;
    (a, b)
}

fn remainder_fit(grid: &BGrid, v: &Field<C64>, scale: f64, floor: f64) -> Result<(f64, f64, f64)> {
    if v.sup_norm() <= 1e-12 * scale {
        return Ok((f64::INFINITY, 1.0, 0.0));
    }
    let r_b = (grid.r_min() * (-grid.t_min() / 2.0).exp()).min(1.0);
    let fit = asymptotic_fit(grid, v, &FitOptions::window(grid.r_min(), r_b))?;
    if fit.exponent <= 1.0 + floor {
        return Err(Error::FormViolation { exponent: fit.exponent, floor });
    }
    let eps = fit.exponent - 1.0;
    let norm = weighted_b_norm(grid, v, &WeightedNormSpec::new(1.0 + eps, 2, None));
    Ok((eps, fit.goodness, norm))
}

pub fn form_fit(u: &MapField) -> Result<FormFitReport> {
    form_fit_with(u, 0.1)
}

/// Near-cone normal form: `u = λz + v` (Form 1), or on the double cover for cone angle `π`
/// `ũ = a z̃ + b z̄̃ + ṽ` (Form 2); `floor` bounds the remainder exponent `1 + ε` from below.
pub fn form_fit_with(u: &MapField, floor: f64) -> Result<FormFitReport> {
    let g = &u.grid;
    let scale = u.samples.sup_norm();
    if u.target.angle.class() == AngleClass::EqualPi {
        let (lg, lifted) = lift(g, &u.samples)?;
        let (mut a, mut b) = fit_ab(&lg, &lifted);
        if a.re < 0.0 {
            a = -a;
            b = -b;
        }
        let sign = if (lifted[(0, 0)] - a * lg.z(0, 0)).norm() < (lifted[(0, 0)] + a * lg.z(0, 0)).norm() { 1.0 } else { -1.0 };
        let v = Field::from_fn(&lg, |i, k| lifted[(i, k)] * sign - a * lg.z(i, k) - b * lg.z(i, k).conj());
        let (epsilon, goodness, v_norm) = remainder_fit(&lg, &v, scale.sqrt(), floor)?;
        return Ok(FormFitReport {
            fit: FormFit { lambda: a, epsilon, v_norm },
            exponent: 1.0 + epsilon,
            goodness,
            double_cover: Some((a, b)),
        });
    }
    let lambda = fit_lambda(g, &u.samples);
    let v = Field::from_fn(g, |i, k| u.samples[(i, k)] - lambda * g.z(i, k));
    let (epsilon, goodness, v_norm) = remainder_fit(g, &v, scale, floor)?;
    Ok(FormFitReport { fit: FormFit { lambda, epsilon, v_norm }, exponent: 1.0 + epsilon, goodness, double_cover: None })
}

#[derive(Clone, Debug)]
pub struct RescaleReport {
    /// `(1/σ)u(τz)` on the induced grid.
    pub map: MapField,
    pub lambda: C64,
    /// `λτ/σ`.
    pub lambda_predicted: C64,
    /// Least-squares leading coefficient of the rescaled map.
    pub lambda_rescaled: C64,
    /// Bracket norm of `v = u − λz` on the whole grid and on `|z| ≤ τ`.
    pub norm_original: f64,
    pub norm_original_window: f64,
    pub norm_rescaled: f64,
    /// `τ^c/σ` times the windowed norm.
    pub norm_predicted: f64,
    pub relative_error: f64,
}

/// Builds `(1/σ)u(τz)` for `τ = e^{−m h_t}` and compares bracket norms of the remainders.
pub fn rescale_probe(u: &MapField, sigma: f64, tau: f64, spec: &WeightedNormSpec) -> Result<RescaleReport> {
    let g = &u.grid;
    if !(sigma != 0.0 && sigma.is_finite() && tau > 0.0) {
        return Err(Error::InvalidInput("scales must be nonzero and tau positive".into()));
    }
    if tau > 1.0 + 1e-12 {
        return Err(Error::WindowExceeded { r_min: g.r_min() / tau, r_max: tau });
    }
    let m = -tau.ln() / g.h_t();
    let shift = m.round();
    if (m - shift).abs() > 1e-8 {
        return Err(Error::InvalidInput(format!("tau = {tau} is not a whole number of radial steps")));
    }
    let shift = shift as usize;
    if g.n_t() < shift + 8 {
        return Err(Error::WindowExceeded { r_min: g.r_min() / tau, r_max: 1.0 });
    }
    let nt = g.n_t() - shift;
    let ng = BGrid::new(g.t_min() + shift as f64 * g.h_t(), nt, g.n_theta())?;
    let samples = Field::from_fn(&ng, |i, k| u.samples[(i, k)] / sigma);
    let lambda = fit_lambda(g, &u.samples);
    let lambda_predicted = lambda * tau / sigma;
    let lambda_rescaled = fit_lambda(&ng, &samples);
    let v = Field::from_fn(g, |i, k| u.samples[(i, k)] - lambda * g.z(i, k));
    // the window |z| ≤ τ carried on the induced grid: radii there are r/τ
    let vw = Field::from_fn(&ng, |i, k| v[(i, k)]);
    let vr = Field::from_fn(&ng, |i, k| samples[(i, k)] - lambda_predicted * ng.z(i, k));
    let norm_original = weighted_b_norm(g, &v, spec);
    let norm_original_window = weighted_b_norm(&ng, &vw, spec) / tau.powf(spec.weight_c);
    let norm_rescaled = weighted_b_norm(&ng, &vr, spec);
    let norm_predicted = tau.powf(spec.weight_c) / sigma.abs() * norm_original_window;
    let relative_error = (norm_rescaled - norm_predicted).abs() / norm_predicted.max(f64::MIN_POSITIVE);
    let map = MapField { grid: ng, samples, target: u.target.clone(), domain: u.domain.clone(), form_fit: None };
    Ok(RescaleReport {
        map,
        lambda,
        lambda_predicted,
        lambda_rescaled,
        norm_original,
        norm_original_window,
        norm_rescaled,
        norm_predicted,
        relative_error,
    })
}
