use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{BGrid, Field, Stencils};
use crate::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct SubsolutionReport {
    /// `min r²Δ₀e` over interior nodes.
    pub min_laplacian: f64,
    /// `max ∫∇e·∇ζ / ∫ζ` over the test functions.
    pub max_weak: f64,
    pub tolerance: f64,
    pub pointwise_pass: bool,
    pub weak_pass: bool,
}

impl SubsolutionReport {
    pub fn passed(&self) -> bool {
        self.pointwise_pass && self.weak_pass
    }
}

/// Checks `Δ₀e ≥ 0` at interior nodes and in weak form against ten random bumps `ζ ≥ 0`.
pub fn subsolution_check(grid: &BGrid, e: &Field<f64>, tolerance: f64, seed: u64) -> SubsolutionReport {
    let st = Stencils::new(grid);
    let lap = st.b_laplacian(e);
    let (nt, n) = (grid.n_t(), grid.n_theta());
    let mut min_lap = f64::INFINITY;
    for i in 2..nt - 2 {
        for &v in lap.row(i) {
            min_lap = min_lap.min(v);
        }
    }
    let et = st.dt(e);
    let eth = st.dth(e);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_weak = f64::NEG_INFINITY;
    let (t0, t1) = (grid.t(2), grid.t(nt - 3));
    for _ in 0..10 {
        let a = rng.gen_range(t0..t1);
        let b = rng.gen_range(a..t1).max(a + 8.0 * grid.h_t()).min(t1);
        let m = rng.gen_range(1..4) as f64;
        let ph = rng.gen_range(0.0..TAU);
        let amp = rng.gen_range(0.0..0.9);
        let zeta = Field::from_fn(grid, |i, k| {
            let t = grid.t(i);
            if t <= a || t >= b {
                0.0
            } else {
                let s = (PI * (t - a) / (b - a)).sin();
                s * s * s * (1.0 + amp * (m * grid.theta(k) + ph).cos())
            }
        });
        let zt = st.dt(&zeta);
        let zth = st.dth(&zeta);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..nt {
            for k in 0..n {
                num += et[(i, k)] * zt[(i, k)] + eth[(i, k)] * zth[(i, k)];
                den += zeta[(i, k)];
            }
        }
        if den > 0.0 {
            max_weak = max_weak.max(num / den);
        }
    }
    SubsolutionReport {
        min_laplacian: min_lap,
        max_weak,
        tolerance,
        pointwise_pass: min_lap >= -tolerance,
        weak_pass: max_weak <= tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_pass_and_concave_fails() {
        let g = BGrid::new(-2.0, 65, 16).unwrap();
        let rep = subsolution_check(&g, &Field::filled(&g, 3.0), 1e-12, 0);
        assert!(rep.passed() && rep.min_laplacian.abs() < 1e-9 && rep.max_weak.abs() < 1e-9);
        let e = Field::from_fn(&g, |i, _| -g.r(i).powi(2));
        assert!(!subsolution_check(&g, &e, 1e-6, 0).passed());
        let e = Field::from_fn(&g, |i, k| g.r(i).powi(2) + g.r(i) * g.theta(k).cos());
        assert!(subsolution_check(&g, &e, 1e-6, 0).passed());
    }
}
