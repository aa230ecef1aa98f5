use super::{BGrid, Field, Stencils};
use crate::prelude::*;

/// Discrete `r^c C^{k,γ}_b` norm: weight exponent, derivative order and optional Hölder exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedNormSpec {
    pub weight_c: f64,
    pub order_k: u8,
    pub holder_gamma: Option<f64>,
}

impl WeightedNormSpec {
    pub fn new(weight_c: f64, order_k: u8, holder_gamma: Option<f64>) -> Self {
        assert!(order_k <= 2, "order above 2 is not supported");
        if let Some(g) = holder_gamma {
            assert!(g > 0.0 && g < 1.0, "Hölder exponent must lie in (0, 1)");
        }
        WeightedNormSpec { weight_c, order_k, holder_gamma }
    }
}

fn holder_seminorm(grid: &BGrid, f: &Field<C64>, gamma: f64) -> f64 {
    let (nt, n) = (grid.n_t(), grid.n_theta());
    let dth = grid.h_theta().powf(gamma);
    let mut best: f64 = 0.0;
    for i in 0..nt {
        for k in 0..n {
            let a = f[(i, k)];
            best = best.max((a - f[(i, (k + 1) % n)]).norm() / dth);
            if i + 1 < nt {
                let (r0, r1) = (grid.r(i), grid.r(i + 1));
                let m = ((r1 - r0) / (r1 + r0)).powf(gamma);
                best = best.max((a - f[(i + 1, k)]).norm() / m);
            }
        }
    }
    best
}

/// `Σ_{i+j≤k} sup |∂_t^i ∂_θ^j (r^{−c} f)|`, plus the sampled anisotropic Hölder seminorm of
/// each derivative when requested.
pub fn weighted_b_norm(grid: &BGrid, f: &Field<C64>, spec: &WeightedNormSpec) -> f64 {
    let st = Stencils::new(grid);
    weighted_b_norm_with(grid, &st, f, spec)
}

pub fn weighted_b_norm_with(grid: &BGrid, st: &Stencils, f: &Field<C64>, spec: &WeightedNormSpec) -> f64 {
    let g = Field::from_fn(grid, |i, k| f[(i, k)] * grid.r(i).powf(-spec.weight_c));
    let mut parts: Vec<Field<C64>> = vec![g.clone()];
    if spec.order_k >= 1 {
        parts.push(st.dt(&g));
        parts.push(st.dth(&g));
    }
    if spec.order_k >= 2 {
        parts.push(st.dtt(&g));
        parts.push(st.dth(&st.dt(&g)));
        parts.push(st.dthth(&g));
    }
    parts
        .iter()
        .map(|p| p.sup_norm() + spec.holder_gamma.map_or(0.0, |gam| holder_seminorm(grid, p, gam)))
        .sum()
}
