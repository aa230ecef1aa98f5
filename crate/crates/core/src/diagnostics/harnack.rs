use crate::geometry::stencil::{dft, frequency, idft};
use crate::geometry::{BGrid, Field, Stencils};
use crate::linearization::{asymptotic_fit, BandedMatrix, FitOptions};
use crate::prelude::*;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct HarnackReport {
    /// `a + inf b`, the limit at the cone point.
    pub limit: f64,
    pub boundary_mean: f64,
    /// `e^{−σ/4α²}` times the boundary mean.
    pub bound: f64,
    pub slack: f64,
    /// Fitted vanishing rate of `f − (a + b)`.
    pub epsilon: f64,
    pub passed: bool,
}

/// `t`-log-derivative of the regular solution of `f'' − (j² + σ r^{2α}) f = 0` at radius `r`,
/// from the modified Bessel series in `ρ = r^α/α`.
fn regular_rate(j: i64, alpha: f64, sigma: f64, r: f64) -> f64 {
    let nu = j.unsigned_abs() as f64 / alpha;
    let y = 0.5 * sigma.sqrt() * r.powf(alpha) / alpha;
    let (mut s, mut ds) = (0.0, 0.0);
    let mut term = 1.0;
    for m in 0..60 {
        let mf = m as f64;
        if m > 0 {
            term *= y * y / (mf * (nu + mf));
        }
        s += term;
        ds += 2.0 * mf * term;
        if term < 1e-18 * s {
            break;
        }
    }
    // y·S'(y) = Σ 2m y^{2m}/…
    alpha * (nu + ds / s)
}

/// Solves `(Δ_α − σ) f = 0` on the grid with `f = boundary` on `r = 1` and regular behaviour
/// at the cone point; `Δ_α = r^{−2α}(∂_t² + ∂_θ²)` is the Laplacian of the standard cone.
pub fn admissible_supersolution(grid: &BGrid, alpha: f64, sigma: f64, boundary: &[f64]) -> Result<Field<f64>> {
    let (nt, n) = (grid.n_t(), grid.n_theta());
    if boundary.len() != n {
        return Err(Error::InvalidGrid("boundary data does not match grid"));
    }
    let st = Stencils::new(grid);
    let hat = dft(&boundary.iter().map(|&b| C64::new(b, 0.0)).collect::<Vec<_>>());
    let mut modes = vec![vec![ZERO; n]; nt];
    for (m, &bj) in hat.iter().enumerate() {
        let j = frequency(m, n);
        let dim = nt - 1;
        let mut a = BandedMatrix::zeros(dim, 5, 5);
        let s = regular_rate(j, alpha, sigma, grid.r_min());
        let mut rhs = vec![ZERO; dim];
        let put = |a: &mut BandedMatrix, row: usize, col: usize, w: f64, rhs: &mut [C64]| {
            if col == nt - 1 {
                rhs[row] -= bj * w;
            } else {
                a.add(row, col, w);
            }
        };
        let d1 = &st.d1[0];
        for (q, &w) in d1.weights.iter().enumerate() {
            put(&mut a, 0, d1.start + q, w, &mut rhs);
        }
        put(&mut a, 0, 0, -s, &mut rhs);
        for i in 1..nt - 1 {
            let d2 = &st.d2[i];
            for (q, &w) in d2.weights.iter().enumerate() {
                put(&mut a, i, d2.start + q, w, &mut rhs);
            }
            let jj = (j * j) as f64;
            put(&mut a, i, i, -(jj + sigma * grid.r(i).powf(2.0 * alpha)), &mut rhs);
        }
        let lu = a.factor()?;
        let mut re: Vec<f64> = rhs.iter().map(|c| c.re).collect();
        let mut im: Vec<f64> = rhs.iter().map(|c| c.im).collect();
        lu.solve(&mut re);
        lu.solve(&mut im);
        for i in 0..nt - 1 {
            modes[i][m] = C64::new(re[i], im[i]);
        }
        modes[nt - 1][m] = bj;
    }
    let mut f = Field::filled(grid, 0.0);
    for (i, row) in modes.iter().enumerate() {
        let vals = idft(row);
        for k in 0..n {
            f[(i, k)] = vals[k].re;
        }
    }
    for k in 0..n {
        f[(nt - 1, k)] = boundary[k];
    }
    Ok(f)
}

/// `b(θ)`: nonzero modes of the innermost row that do not decay towards the cone point.
fn limit_oscillation(grid: &BGrid, f: &Field<f64>) -> Vec<f64> {
    let n = grid.n_theta();
    let row = |i: usize| dft(&f.row(i).iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
    let far = ((1.0 / grid.h_t()).round() as usize).clamp(1, grid.n_t() - 1);
    let (h0, h1) = (row(0), row(far));
    let mut b = vec![ZERO; n];
    for m in 1..n {
        let rate = (h1[m].norm() / h0[m].norm()).ln() / (grid.t(far) - grid.t(0));
        if !(rate > 0.05) {
            b[m] = h0[m];
        }
    }
    idft(&b).into_iter().map(|c| c.re).collect()
}

/// Harnack lower bound at the cone point for a positive supersolution of `Δ_α − σ`.
pub fn harnack_check(grid: &BGrid, f: &Field<f64>, alpha: f64, sigma: f64, tolerance: f64) -> Result<HarnackReport> {
    let (nt, n) = (grid.n_t(), grid.n_theta());
    if f.as_slice().iter().any(|&v| !(v > 0.0)) {
        return Err(Error::HypothesisFail("f is not positive".into()));
    }
    let scale = f.sup_abs();
    let st = Stencils::new(grid);
    let lap = st.b_laplacian(f);
    let mut worst = f64::NEG_INFINITY;
    for i in 1..nt - 1 {
        let w = sigma * grid.r(i).powf(2.0 * alpha);
        for k in 0..n {
            worst = worst.max(lap[(i, k)] - w * f[(i, k)]);
        }
    }
    if worst > tolerance * scale {
        return Err(Error::HypothesisFail(format!("(Δ − σ)f ≤ 0 fails by {worst:e}")));
    }
    let mean = f.as_slice().iter().sum::<f64>() / f.as_slice().len() as f64;
    let flat = f.as_slice().iter().all(|v| (v - mean).abs() <= 1e-12 * scale);
    let (a, epsilon) = if flat {
        // nothing decays: f = a exactly
        (mean, f64::INFINITY)
    } else {
        let fc = f.map(|v| C64::new(v, 0.0));
        let window = (grid.r_min() * 2.0, (grid.r_min() * 40.0).min(0.5));
        let opts = FitOptions { subtract_constant: true, ..FitOptions::window(window.0, window.1) };
        let fit = asymptotic_fit(grid, &fc, &opts)
            .map_err(|e| Error::HypothesisFail(format!("decomposition fit: {e}")))?;
        (fit.constant.re, fit.exponent)
    };
    if !(epsilon * epsilon > sigma) {
        return Err(Error::HypothesisFail(format!("rate {epsilon} too slow for sigma {sigma}")));
    }
    let inf_b = limit_oscillation(grid, f).into_iter().fold(f64::INFINITY, f64::min);
    let limit = a + inf_b;
    let boundary_mean = f.row(nt - 1).iter().sum::<f64>() / n as f64;
    let bound = (-sigma / (4.0 * alpha * alpha)).exp() * boundary_mean;
    let slack = limit - bound;
    Ok(HarnackReport { limit, boundary_mean, bound, slack, epsilon, passed: slack >= -tolerance * scale })
}
