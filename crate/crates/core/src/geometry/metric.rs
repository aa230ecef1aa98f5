use super::stencil::{dft, frequency};
use super::{BGrid, ConeAngle, Field};
use crate::prelude::*;
use crate::{Error, Result};

/// One term `amplitude · r^power · cos(frequency · θ)` of a conformal factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuTerm {
    pub amplitude: f64,
    pub power: f64,
    pub frequency: i32,
}

impl MuTerm {
    // g = u^a ū^b with a = (s+k)/2, b = (s-k)/2, so that Re g = r^s cos kθ
    #[inline]
    fn parts(&self, u: C64) -> (C64, f64, f64) {
        let (r, th) = (u.norm(), u.im.atan2(u.re));
        let k = self.frequency as f64;
        let g = C64::from_polar(r.powf(self.power), k * th);
        (g, (self.power + k) / 2.0, (self.power - k) / 2.0)
    }
}

/// Conformal factor `μ` as a finite sum of closed-form terms, with analytic derivatives.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MuProfile {
    pub terms: Vec<MuTerm>,
}

impl MuProfile {
    pub fn zero() -> Self {
        MuProfile { terms: Vec::new() }
    }

    pub fn single(amplitude: f64, power: f64, frequency: i32) -> Self {
        MuProfile { terms: vec![MuTerm { amplitude, power, frequency }] }
    }

    pub fn scaled(&self, s: f64) -> Self {
        MuProfile {
            terms: self.terms.iter().map(|t| MuTerm { amplitude: s * t.amplitude, ..*t }).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == 0.0)
    }

    /// Smallest power present; the declared vanishing rate.
    pub fn rate(&self) -> Option<f64> {
        self.terms.iter().filter(|t| t.amplitude != 0.0).map(|t| t.power).reduce(f64::min)
    }

    pub fn value(&self, u: C64) -> f64 {
        self.terms.iter().map(|t| t.amplitude * t.parts(u).0.re).sum()
    }

    /// `∂μ/∂u`
    pub fn d_u(&self, u: C64) -> C64 {
        let mut acc = ZERO;
        for t in &self.terms {
            let (g, a, b) = t.parts(u);
            acc += t.amplitude * (g * a + g.conj() * b) / (2.0 * u);
        }
        acc
    }

    /// `∂²μ/∂u²`
    pub fn d_uu(&self, u: C64) -> C64 {
        let mut acc = ZERO;
        for t in &self.terms {
            let (g, a, b) = t.parts(u);
            acc += t.amplitude * (g * (a * (a - 1.0)) + g.conj() * (b * (b - 1.0))) / (2.0 * u * u);
        }
        acc
    }

    /// `∂²μ/∂u∂ū`, a quarter of the flat Laplacian.
    pub fn d_uubar(&self, u: C64) -> f64 {
        let r2 = u.norm_sqr();
        self.terms
            .iter()
            .map(|t| {
                let (g, a, b) = t.parts(u);
                t.amplitude * a * b * g.re / r2
            })
            .sum()
    }
}

/// `ρ(u) = c·e^{2μ(u)}·|u|^{2(α−1)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicMetric {
    pub angle: ConeAngle,
    pub c: f64,
    pub mu: MuProfile,
}

pub fn round_cone_metric(angle: ConeAngle) -> ConicMetric {
    ConicMetric { angle, c: 1.0, mu: MuProfile::zero() }
}

impl ConicMetric {
    /// Rejects profiles whose vanishing rate would make the curvature blow up (`ν < 2α`).
    pub fn new(angle: ConeAngle, c: f64, mu: MuProfile) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidInput(alloc::format!("normalization c = {c} must be positive")));
        }
        if let Some(nu) = mu.rate() {
            if nu < 2.0 * angle.alpha() - 1e-12 {
                return Err(Error::InvalidInput(alloc::format!(
                    "conformal factor vanishes at rate {nu} < 2 alpha = {}",
                    2.0 * angle.alpha()
                )));
            }
        }
        Ok(ConicMetric { angle, c, mu })
    }

    pub fn alpha(&self) -> f64 {
        self.angle.alpha()
    }

    /// Declared vanishing rate; an unperturbed cone reports `+∞`.
    pub fn nu(&self) -> f64 {
        self.mu.rate().unwrap_or(f64::INFINITY)
    }

    pub fn density(&self, u: C64) -> f64 {
        self.c * (2.0 * self.mu.value(u)).exp() * u.norm_sqr().powf(self.alpha() - 1.0)
    }

    /// `Γ(u) = ∂ log ρ / ∂u = 2μ_u + (α−1)/u`.
    pub fn gamma(&self, u: C64) -> C64 {
        self.mu.d_u(u) * 2.0 + (self.alpha() - 1.0) / u
    }

    /// `(∂Γ/∂u, ∂Γ/∂ū)`.
    pub fn gamma_derivatives(&self, u: C64) -> (C64, f64) {
        (self.mu.d_uu(u) * 2.0 - (self.alpha() - 1.0) / (u * u), 2.0 * self.mu.d_uubar(u))
    }

    /// Gauss curvature of the target at `u`.
    pub fn curvature(&self, u: C64) -> f64 {
        let a = self.alpha();
        -(4.0 / self.c) * (-2.0 * self.mu.value(u)).exp() * u.norm_sqr().powf(1.0 - a) * self.mu.d_uubar(u)
    }
}

/// Metric on the domain disc.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainMetric {
    Flat,
    Conic(ConicMetric),
}

impl DomainMetric {
    pub fn sigma(&self, z: C64) -> f64 {
        match self {
            DomainMetric::Flat => 1.0,
            DomainMetric::Conic(m) => m.density(z),
        }
    }

    pub fn curvature(&self, z: C64) -> f64 {
        match self {
            DomainMetric::Flat => 0.0,
            DomainMetric::Conic(m) => m.curvature(z),
        }
    }
}

/// `κ = −(4/c)·e^{−2μ}|z|^{−2α}·(z∂_z)(z̄∂_z̄)μ` from the analytic closures.
pub fn gauss_curvature(metric: &ConicMetric, grid: &BGrid) -> Field<f64> {
    Field::from_fn(grid, |i, k| metric.curvature(grid.z(i, k)))
}

/// Same quantity from grid samples of `μ`. The samples must be resolved in `θ`: the top
/// quarter of the spectrum has to be negligible for second differences to mean anything.
pub fn gauss_curvature_from_samples(
    mu: &Field<f64>,
    grid: &BGrid,
    angle: ConeAngle,
    c: f64,
) -> Result<Field<f64>> {
    if !mu.matches(grid) {
        return Err(Error::InvalidGrid("samples do not match grid"));
    }
    let n = grid.n_theta();
    let mut tail: f64 = 0.0;
    let mut total: f64 = 0.0;
    for i in 0..grid.n_t() {
        let row: Vec<C64> = mu.row(i).iter().map(|&x| C64::new(x, 0.0)).collect();
        for (m, c) in dft(&row).iter().enumerate() {
            let p = c.norm_sqr();
            total += p;
            if frequency(m, n).unsigned_abs() as usize * 4 > n {
                tail += p;
            }
        }
    }
    let rel = if total > 0.0 { (tail / total).sqrt() } else { 0.0 };
    if rel > 1e-6 {
        return Err(Error::InsufficientRegularity { tail: rel });
    }
    let st = grid.stencils();
    let lap = st.b_laplacian(mu);
    let a = angle.alpha();
    Ok(Field::from_fn(grid, |i, k| {
        let r = grid.r(i);
        -(4.0 / c) * (-2.0 * mu[(i, k)]).exp() * r.powf(-2.0 * a) * 0.25 * lap[(i, k)]
    }))
}
