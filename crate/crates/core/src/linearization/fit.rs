use crate::geometry::stencil::{dft, frequency};
use crate::geometry::{BGrid, Field};
use crate::prelude::*;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub r_a: f64,
    pub r_b: f64,
    /// Fit and remove `w` from the mean mode before fitting exponents.
    pub subtract_constant: bool,
    pub min_goodness: f64,
}

impl FitOptions {
    pub fn window(r_a: f64, r_b: f64) -> Self {
        FitOptions { r_a, r_b, subtract_constant: false, min_goodness: 0.99 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticFit {
    /// Leading exponent `s` of `C r^s e^{ijθ}`.
    pub exponent: f64,
    pub coefficient: C64,
    pub mode: i64,
    /// `R²` of the log-linear fit.
    pub goodness: f64,
    pub constant: C64,
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r2 = if ss_tot <= 1e-300 { if ss_res <= 1e-300 { 1.0 } else { 0.0 } } else { 1.0 - ss_res / ss_tot };
    (slope, icpt, r2)
}

/// Least-squares `(w, C)` for `y ≈ w + C e^{st}`, returning the squared residual.
fn constant_plus_power(t: &[f64], y: &[C64], s: f64) -> (C64, C64, f64) {
    let n = t.len() as f64;
    let e: Vec<f64> = t.iter().map(|x| (s * x).exp()).collect();
    let se: f64 = e.iter().sum();
    let see: f64 = e.iter().map(|v| v * v).sum();
    let sy: C64 = y.iter().sum();
    let sey: C64 = e.iter().zip(y).map(|(a, b)| b * a).sum();
    let det = n * see - se * se;
    let w = (sy * see - sey * se) / det;
    let c = (sey * n - sy * se) / det;
    let res = e.iter().zip(y).map(|(a, b)| (b - w - c * a).norm_sqr()).sum();
    (w, c, res)
}

fn best_rate(t: &[f64], y: &[C64]) -> f64 {
    let f = |s: f64| constant_plus_power(t, y, s).2;
    let mut best = (0.02, f(0.02));
    let mut s = 0.02;
    while s <= 4.0 {
        let v = f(s);
        if v < best.1 {
            best = (s, v);
        }
        s += 0.02;
    }
    // golden section around the coarse minimum
    let (mut a, mut b) = (best.0 - 0.02, best.0 + 0.02);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Per-mode log-linear fit on the window; reports the mode dominating at the inner edge.
pub fn asymptotic_fit(grid: &BGrid, psi: &Field<C64>, opts: &FitOptions) -> Result<AsymptoticFit> {
    let rows: Vec<usize> = (0..grid.n_t()).filter(|&i| grid.r(i) >= opts.r_a && grid.r(i) <= opts.r_b).collect();
    if rows.len() < 10 {
        return Err(Error::InvalidInput(format!("fit window holds {} radial nodes, need 10", rows.len())));
    }
    let n = grid.n_theta();
    let t: Vec<f64> = rows.iter().map(|&i| grid.t(i)).collect();
    let mut hats: Vec<Vec<C64>> = rows.iter().map(|&i| dft(psi.row(i))).collect();
    let mut constant = ZERO;
    if opts.subtract_constant {
        let y: Vec<C64> = hats.iter().map(|h| h[0]).collect();
        let s = best_rate(&t, &y);
        constant = constant_plus_power(&t, &y, s).0;
        for h in &mut hats {
            h[0] -= constant;
        }
    }
    let peak = hats.iter().flatten().fold(0.0f64, |m, c| m.max(c.norm()));
    if peak == 0.0 {
        return Err(Error::PoorFit { goodness: 0.0 });
    }
    let dominant = (0..n)
        .max_by(|&a, &b| hats[0][a].norm().total_cmp(&hats[0][b].norm()))
        .unwrap_or(0);
    let y: Vec<f64> = hats.iter().map(|h| h[dominant].norm().max(1e-300).ln()).collect();
    let (slope, _, goodness) = linear_fit(&t, &y);
    let coefficient = hats.iter().zip(&t).map(|(h, &tt)| h[dominant] * (-slope * tt).exp()).sum::<C64>() / t.len() as f64;
    if !(goodness >= opts.min_goodness) {
        return Err(Error::PoorFit { goodness });
    }
    Ok(AsymptoticFit { exponent: slope, coefficient, mode: frequency(dominant, n), goodness, constant })
}
