use crate::geometry::{BGrid, Field};
use crate::prelude::*;

/// Lift `w̃(z̃) = a z̃ + b z̄̃ + v(z̃)` of a map into the cone of angle `π` to the double cover
/// `z = z̃²`. The remainder is the odd holomorphic polynomial `v = Σ_m v[m] z̃^{2m+3}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiConeLift {
    pub a: C64,
    pub b: C64,
    pub v: Vec<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiConeResidue {
    pub residue: C64,
    /// `|a| > |b|`
    pub orientation_preserving: bool,
}

/// Residue `a b̄ / 4` of the pushed-forward Hopf differential, for the target metric
/// `|u|^{−1}|du|²/4` that makes `u = w̃²` an isometry of the double cover.
pub fn pi_cone_residue(lift: &PiConeLift) -> PiConeResidue {
    PiConeResidue { residue: lift.a * lift.b.conj() / 4.0, orientation_preserving: lift.a.norm() > lift.b.norm() }
}

impl PiConeLift {
    pub fn lifted(&self, zt: C64) -> C64 {
        let mut out = self.a * zt + self.b * zt.conj();
        let z2 = zt * zt;
        let mut p = z2 * zt;
        for &c in &self.v {
            out += c * p;
            p *= z2;
        }
        out
    }
}

/// Samples of `u(z) = w̃(√z)²` on the base grid.
pub fn pi_cone_pushforward(lift: &PiConeLift, grid: &BGrid) -> Field<C64> {
    Field::from_fn(grid, |i, k| {
        let zt = C64::from_polar(grid.r(i).sqrt(), grid.theta(k) / 2.0);
        let w = lift.lifted(zt);
        w * w
    })
}
