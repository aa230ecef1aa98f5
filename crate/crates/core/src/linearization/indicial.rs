use super::operator::LinearizedOperator;
use crate::field::MapField;
use crate::geometry::{round_cone_metric, BGrid, ConeAngle, DomainMetric, Field};
use crate::prelude::*;
use crate::Result;

/// `s² + 2(α−1)s − j² − 2(α−1)j`, roots `{j, 2−2α−j}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndicialPolynomial {
    pub j: i32,
    /// Coefficients of `s², s, 1`.
    pub coefficients: [f64; 3],
    pub roots: (f64, f64),
}

impl IndicialPolynomial {
    pub fn eval(&self, s: f64) -> f64 {
        let [a, b, c] = self.coefficients;
        (a * s + b) * s + c
    }

    /// Mode roots never coincide since `j = 1 − α` is not an integer.
    pub fn is_simple(&self) -> bool {
        self.roots.0 != self.roots.1
    }
}

pub fn indicial_polynomial(angle: ConeAngle, j: i32) -> IndicialPolynomial {
    let a1 = angle.alpha() - 1.0;
    let jf = j as f64;
    IndicialPolynomial {
        j,
        coefficients: [1.0, 2.0 * a1, -jf * jf - 2.0 * a1 * jf],
        roots: (jf, -2.0 * a1 - jf),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndicialData {
    pub alpha: f64,
    pub window: u32,
    /// Multiset union over `|j| ≤ window`, ascending.
    pub roots: Vec<f64>,
    pub per_mode: Vec<IndicialPolynomial>,
    pub first_above_one: f64,
    pub first_above_zero: f64,
}

pub fn indicial_roots(angle: ConeAngle, window: u32) -> IndicialData {
    let window = window.max(2);
    let w = window as i32;
    let per_mode: Vec<IndicialPolynomial> = (-w..=w).map(|j| indicial_polynomial(angle, j)).collect();
    let mut roots: Vec<f64> = per_mode.iter().flat_map(|p| [p.roots.0, p.roots.1]).collect();
    roots.sort_by(|a, b| a.total_cmp(b));
    let first = |lo: f64| roots.iter().copied().find(|&s| s > lo + 1e-12).unwrap_or(f64::INFINITY);
    IndicialData {
        alpha: angle.alpha(),
        window,
        first_above_one: first(1.0),
        first_above_zero: first(0.0),
        roots,
        per_mode,
    }
}

/// Sup over interior rows of `|L(r^s e^{ijθ})| / r^s` for the linearization at the identity of
/// the round cone, which coincides there with its indicial operator.
pub fn indicial_residual(angle: ConeAngle, s: f64, j: i32, grid: &BGrid) -> Result<f64> {
    let u0 = MapField::from_fn(*grid, round_cone_metric(angle), DomainMetric::Flat, |z| z);
    let op = LinearizedOperator::new(&u0)?;
    let psi = Field::from_fn(grid, |i, k| C64::from_polar(grid.r(i).powf(s), j as f64 * grid.theta(k)));
    let l = op.apply(&psi);
    let mut m: f64 = 0.0;
    for i in 2..grid.n_t() - 2 {
        let scale = grid.r(i).powf(s);
        for v in l.row(i) {
            m = m.max(v.norm() / scale);
        }
    }
    Ok(m)
}
