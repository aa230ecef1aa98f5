use crate::geometry::stencil::{dft, frequency};
use crate::geometry::{arg_2pi, polar_pow, BGrid, ConeAngle, Field};
use crate::prelude::*;
use crate::{Error, Result};

/// Coefficients `a_j`, `|j| ≤ J`, of a twisted boundary expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedSeries {
    angle: ConeAngle,
    order: usize,
    coeffs: Vec<C64>,
}

impl TwistedSeries {
    pub fn new(angle: ConeAngle, order: usize) -> Result<Self> {
        if order < 4 {
            return Err(Error::InvalidInput(alloc::format!("series order {order} below 4")));
        }
        Ok(TwistedSeries { angle, order, coeffs: vec![ZERO; 2 * order + 1] })
    }

    pub fn identity(angle: ConeAngle, order: usize) -> Result<Self> {
        let mut s = Self::new(angle, order)?;
        s.set(0, ONE);
        Ok(s)
    }

    pub fn with_coeffs(angle: ConeAngle, order: usize, pairs: &[(i32, C64)]) -> Result<Self> {
        let mut s = Self::new(angle, order)?;
        for &(j, a) in pairs {
            if j.unsigned_abs() as usize > order {
                return Err(Error::InvalidInput(alloc::format!("mode {j} outside order {order}")));
            }
            s.set(j, a);
        }
        Ok(s)
    }

    pub fn angle(&self) -> ConeAngle {
        self.angle
    }

    pub fn alpha(&self) -> f64 {
        self.angle.alpha()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, j: i32) -> C64 {
        if j.unsigned_abs() as usize > self.order {
            ZERO
        } else {
            self.coeffs[(j + self.order as i32) as usize]
        }
    }

    /// Panics if `|j| > J`.
    pub fn set(&mut self, j: i32, a: C64) {
        assert!(j.unsigned_abs() as usize <= self.order, "mode outside series order");
        self.coeffs[(j + self.order as i32) as usize] = a;
    }

    pub fn modes(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        let o = self.order as i32;
        self.coeffs.iter().enumerate().map(move |(m, &a)| (m as i32 - o, a))
    }

    /// `|a_J| + |a_{−J}|`
    pub fn tail(&self) -> f64 {
        self.coeffs[0].norm() + self.coeffs[2 * self.order].norm()
    }

    pub fn exponent(&self, j: i32) -> f64 {
        1.0 + j as f64 / self.alpha()
    }

    /// Boundary value `Σ a_j e^{i(1+j/α)θ}` at sector angle `θ ∈ [0, 2πα]`.
    pub fn sector_trace(&self, theta: f64) -> C64 {
        self.modes().map(|(j, a)| a * C64::from_polar(1.0, self.exponent(j) * theta)).sum()
    }

    /// Frame function `W_b(θ) = Σ a_j e^{ijθ}` at cone angle `θ ∈ [0, 2π)`.
    pub fn frame(&self, theta: f64) -> C64 {
        self.modes().map(|(j, a)| a * C64::from_polar(1.0, j as f64 * theta)).sum()
    }

    /// Boundary map in cone coordinates, `e^{iθ} W_b(θ)^{1/α}`.
    pub fn cone_boundary(&self, theta: f64) -> Result<C64> {
        Ok(C64::from_polar(1.0, theta) * self.frame_root(self.frame(theta))?)
    }

    // W^{1/α} on the branch continuous through a_0
    fn frame_root(&self, w: C64) -> Result<C64> {
        let a0 = self.coeff(0);
        if a0 == ZERO {
            return Err(Error::InvalidInput("a_0 = 0: no cone-coordinate branch".into()));
        }
        let p = 1.0 / self.alpha();
        let q = w / a0;
        Ok(polar_pow(a0.norm(), a0.im.atan2(a0.re), p) * polar_pow(q.norm(), q.im.atan2(q.re), p))
    }

    /// Distance to the identity data in the proxy norm `Σ |a_j − δ_{j0}|(1 + j²)`.
    pub fn distance_to_identity(&self) -> f64 {
        self.modes()
            .map(|(j, a)| {
                let d = if j == 0 { a - ONE } else { a };
                d.norm() * (1.0 + (j * j) as f64)
            })
            .sum()
    }

    /// Dirichlet energy of the synthesized map, `(π/2α) Σ |a_j|² |1 + j/α|`.
    pub fn energy(&self) -> f64 {
        let a = self.alpha();
        PI / (2.0 * a) * self.modes().map(|(j, c)| c.norm_sqr() * self.exponent(j).abs()).sum::<f64>()
    }

    /// Energy of the part of the map inside `|z| < r`.
    pub fn energy_inside(&self, r: f64) -> f64 {
        let a = self.alpha();
        PI / (2.0 * a)
            * self
                .modes()
                .map(|(j, c)| {
                    let e = self.exponent(j).abs();
                    c.norm_sqr() * e * r.powf(2.0 * a * e)
                })
                .sum::<f64>()
    }

    /// Samples of the harmonic map in cone coordinates, `u = z·W^{1/α}` with
    /// `W = Σ_{j≥0} a_j z^j + Σ_{k≥1} a_{−k} z̄^k r^{−2α}`.
    pub fn map_on_grid(&self, grid: &BGrid) -> Result<Field<C64>> {
        let a = self.alpha();
        let mut out = Field::filled(grid, ZERO);
        for i in 0..grid.n_t() {
            let r = grid.r(i);
            let damp = r.powf(-2.0 * a);
            for k in 0..grid.n_theta() {
                let z = grid.z(i, k);
                let mut w = self.coeff(0);
                let mut zp = ONE;
                for j in 1..=self.order as i32 {
                    zp *= z;
                    w += self.coeff(j) * zp + self.coeff(-j) * zp.conj() * damp;
                }
                out[(i, k)] = z * self.frame_root(w)?;
            }
        }
        Ok(out)
    }
}

/// Boundary data as closed samples `φ(θ_m)`, `θ_m = 2πα·m/n`, `m = 0..=n`, in the sector.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTrace {
    pub angle: ConeAngle,
    pub samples: Vec<C64>,
}

impl BoundaryTrace {
    pub fn from_series(series: &TwistedSeries, n: usize) -> Self {
        let span = series.angle().total_angle();
        let samples = (0..=n).map(|m| series.sector_trace(span * m as f64 / n as f64)).collect();
        BoundaryTrace { angle: series.angle(), samples }
    }

    /// From values of the boundary map in cone coordinates at `θ_k = 2πk/n`. The sector value
    /// is `φ^α` along the lift of `arg φ` that starts near `θ`.
    pub fn from_cone_samples(angle: ConeAngle, values: &[C64]) -> Result<Self> {
        let n = values.len();
        if n < 8 {
            return Err(Error::InvalidInput("need at least 8 boundary samples".into()));
        }
        let a = angle.alpha();
        let mut samples = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let th = TAU * m as f64 / n as f64;
            let v = values[m % n];
            if v == ZERO {
                return Err(Error::ZeroInput);
            }
            let rel = v * C64::from_polar(1.0, -th);
            let lift = th + rel.im.atan2(rel.re);
            samples.push(polar_pow(v.norm(), lift, a));
        }
        Ok(BoundaryTrace { angle, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.samples.len() < 2
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryAnalysis {
    pub series: TwistedSeries,
    pub reconstruction_error: f64,
    pub twist_mismatch: f64,
}

/// Twisted Fourier coefficients of sector samples by trapezoid quadrature.
pub fn analyze_boundary(trace: &BoundaryTrace, order: usize, tolerance: f64) -> Result<BoundaryAnalysis> {
    let n = trace.len();
    if n < 8 {
        return Err(Error::InvalidInput("need at least 8 boundary samples".into()));
    }
    if 2 * order >= n {
        return Err(Error::Aliasing { order, samples: n });
    }
    let angle = trace.angle;
    let s = &trace.samples;
    let mismatch = (s[n] - C64::from_polar(1.0, angle.total_angle()) * s[0]).norm();
    let scale = s[0].norm().max(1.0);
    if mismatch > tolerance * scale {
        return Err(Error::TwistViolation { mismatch, tolerance: tolerance * scale });
    }
    // untwist: φ(θ)e^{−iθ} is periodic in θ/α, then plain DFT
    let span = angle.total_angle();
    let row: Vec<C64> = (0..n).map(|m| s[m] * C64::from_polar(1.0, -span * m as f64 / n as f64)).collect();
    let hat = dft(&row);
    let mut series = TwistedSeries::new(angle, order)?;
    for (m, c) in hat.iter().enumerate() {
        let j = frequency(m, n);
        if j.unsigned_abs() as usize <= order {
            series.set(j as i32, *c);
        }
    }
    let mut err: f64 = 0.0;
    for (m, v) in s.iter().enumerate() {
        let th = span * m as f64 / n as f64;
        err = err.max((series.sector_trace(th) - v).norm());
    }
    Ok(BoundaryAnalysis { series, reconstruction_error: err, twist_mismatch: mismatch })
}

/// `Σ_{j≥0} a_j ρ^{1+j/α}e^{i(1+j/α)φ} + Σ_{j<0} a_j ρ^{−1−j/α}e^{i(1+j/α)φ}` for any real `φ`,
/// without the sector check.
pub fn synthesize_polar(series: &TwistedSeries, rho: f64, phi: f64) -> C64 {
    if rho == 0.0 {
        return ZERO;
    }
    series
        .modes()
        .filter(|&(_, c)| c != ZERO)
        .map(|(j, c)| {
            let e = series.exponent(j);
            c * C64::from_polar(rho.powf(e.abs()), e * phi)
        })
        .sum()
}

/// Harmonic map of the unit sector `{|ζ| ≤ 1, 0 ≤ arg ζ ≤ 2πα}` with the given boundary series.
pub fn synthesize(series: &TwistedSeries, zeta: C64) -> Result<C64> {
    for (j, c) in series.modes() {
        if j < 0 && c != ZERO && series.exponent(j) >= 0.0 {
            return Err(Error::NonConeMapping { mode: j });
        }
    }
    let rho = zeta.norm();
    if rho > 1.0 + 1e-12 {
        return Err(Error::InvalidInput("point outside the unit sector".into()));
    }
    if rho == 0.0 {
        return Ok(ZERO);
    }
    let span = series.angle().total_angle();
    let mut phi = arg_2pi(zeta);
    if phi > span {
        // the closing ray arg = 2πα may come back as a tiny negative angle
        if TAU - phi < 1e-12 {
            phi = 0.0;
        } else if phi - span < 1e-12 {
            phi = span;
        } else {
            return Err(Error::InvalidInput("point outside the sector".into()));
        }
    }
    Ok(synthesize_polar(series, rho, phi))
}

/// Residue at the cone point of the Hopf differential of the synthesized map, in the
/// cone coordinates of domain and target: `a_0 · ā_{−1} · (1/α − 1)`.
pub fn residue_from_series(series: &TwistedSeries) -> C64 {
    series.coeff(0) * series.coeff(-1).conj() * (1.0 / series.alpha() - 1.0)
}

/// Boundary series of `u ∘ m_w^{-1}`, where `m_w(z) = (z − w)/(1 − w̄z)`; the recentred map
/// has its cone-point preimage at `w` in the original disc.
pub fn recentre(series: &TwistedSeries, w: C64, order: usize, n: usize) -> Result<TwistedSeries> {
    if w.norm() >= 1.0 {
        return Err(Error::OutOfDisc { w, radius: 1.0 });
    }
    if 2 * order >= n {
        return Err(Error::Aliasing { order, samples: n });
    }
    let a = series.alpha();
    let row: Vec<C64> = (0..n)
        .map(|k| {
            let th = TAU * k as f64 / n as f64;
            let e = C64::from_polar(1.0, th);
            let pre = (e + w) / (ONE + w.conj() * e);
            let q = pre / e;
            let shift = q.im.atan2(q.re);
            series.frame(th + shift) * C64::from_polar(1.0, a * shift)
        })
        .collect();
    let hat = dft(&row);
    let mut out = TwistedSeries::new(series.angle(), order)?;
    for (m, c) in hat.iter().enumerate() {
        let j = frequency(m, n);
        if j.unsigned_abs() as usize <= order {
            out.set(j as i32, *c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> ConeAngle {
        ConeAngle::new(1.0 / 3.0).unwrap()
    }

    #[test]
    fn identity_trace_analyzes_to_unit_coefficient() {
        let s = TwistedSeries::identity(third(), 8).unwrap();
        let an = analyze_boundary(&BoundaryTrace::from_series(&s, 64), 8, 1e-10).unwrap();
        for (j, a) in an.series.modes() {
            let expect = if j == 0 { ONE } else { ZERO };
            assert!((a - expect).norm() < 1e-14, "{j} {a}");
        }
    }

    #[test]
    fn twisted_mode_is_recovered() {
        let alpha = 1.0 / 3.0;
        let n = 64;
        let span = TAU * alpha;
        let samples = (0..=n)
            .map(|m| {
                let th = span * m as f64 / n as f64;
                C64::from_polar(1.0, th) + C64::from_polar(0.1, (1.0 - 1.0 / alpha) * th)
            })
            .collect();
        let tr = BoundaryTrace { angle: third(), samples };
        let an = analyze_boundary(&tr, 6, 1e-10).unwrap();
        assert!((an.series.coeff(0) - ONE).norm() < 1e-14);
        assert!((an.series.coeff(-1) - 0.1).norm() < 1e-14);
        assert!(an.reconstruction_error < 1e-13);
    }

    #[test]
    fn half_angle_exponents_are_odd_integers() {
        let s = TwistedSeries::new(ConeAngle::new(0.5).unwrap(), 4).unwrap();
        let ex: Vec<f64> = (-2..=2).map(|j| s.exponent(j)).collect();
        assert_eq!(ex, [-3.0, -1.0, 1.0, 3.0, 5.0]);
    }

    #[test]
    fn twist_and_aliasing_errors() {
        let mut tr = BoundaryTrace::from_series(&TwistedSeries::identity(third(), 4).unwrap(), 32);
        assert!(matches!(analyze_boundary(&tr, 16, 1e-10), Err(Error::Aliasing { .. })));
        tr.samples[32] += 0.01;
        assert!(matches!(analyze_boundary(&tr, 4, 1e-10), Err(Error::TwistViolation { .. })));
    }

    #[test]
    fn synthesis_examples() {
        let lam = C64::new(0.7, 0.2);
        let s = TwistedSeries::with_coeffs(third(), 4, &[(0, lam)]).unwrap();
        let zeta = C64::from_polar(0.5, 1.0);
        assert!((synthesize(&s, zeta).unwrap() - lam * zeta).norm() < 1e-15);

        let s = TwistedSeries::with_coeffs(ConeAngle::new(0.5).unwrap(), 4, &[(1, ONE)]).unwrap();
        assert!((synthesize(&s, zeta).unwrap() - zeta.powi(3)).norm() < 1e-14);

        let s = TwistedSeries::with_coeffs(third(), 4, &[(-1, ONE)]).unwrap();
        assert!((synthesize(&s, zeta).unwrap() - zeta.conj().powi(2)).norm() < 1e-14);
        assert_eq!(synthesize(&s, ZERO).unwrap(), ZERO);
    }

    #[test]
    fn residue_examples() {
        let s = TwistedSeries::with_coeffs(third(), 4, &[(0, ONE), (-1, C64::new(0.1, 0.0))]).unwrap();
        assert!((residue_from_series(&s) - 0.2).norm() < 1e-14);
        let s = TwistedSeries::with_coeffs(third(), 4, &[(0, ONE), (-1, C64::new(0.0, 0.1))]).unwrap();
        assert!((residue_from_series(&s) - C64::new(0.0, -0.2)).norm() < 1e-14);
        let s = TwistedSeries::identity(third(), 4).unwrap();
        assert_eq!(residue_from_series(&s), ZERO);
    }

    #[test]
    fn cone_samples_roundtrip() {
        let s = TwistedSeries::with_coeffs(third(), 6, &[(0, ONE), (-1, C64::new(0.05, 0.02)), (2, C64::new(0.0, 0.03))])
            .unwrap();
        let n = 64;
        let vals: Vec<C64> = (0..n).map(|k| s.cone_boundary(TAU * k as f64 / n as f64).unwrap()).collect();
        let tr = BoundaryTrace::from_cone_samples(third(), &vals).unwrap();
        let an = analyze_boundary(&tr, 6, 1e-10).unwrap();
        for (j, a) in s.modes() {
            assert!((an.series.coeff(j) - a).norm() < 1e-12, "{j}");
        }
    }

    #[test]
    fn recentring_at_origin_is_identity_and_energy_is_invariant() {
        let s = TwistedSeries::with_coeffs(third(), 8, &[(0, ONE), (-1, C64::new(0.05, 0.0))]).unwrap();
        let same = recentre(&s, ZERO, 8, 64).unwrap();
        for (j, a) in s.modes() {
            assert!((same.coeff(j) - a).norm() < 1e-14);
        }
        let moved = recentre(&s, C64::new(0.1, -0.05), 24, 128).unwrap();
        assert!(moved.tail() < 1e-12);
        let back = recentre(&moved, -C64::new(0.1, -0.05), 8, 128).unwrap();
        for (j, a) in s.modes() {
            assert!((back.coeff(j) - a).norm() < 1e-10, "{j}");
        }
    }
}
