use super::banded::{BandedLu, BandedMatrix};
use crate::field::{tension, MapField};
use crate::geometry::stencil::{dft, frequency, idft};
use crate::geometry::{BGrid, Field, Stencils};
use crate::prelude::*;
use crate::{Error, Result};

/// Closure of the discrete problem at `r_min`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InnerCondition {
    /// Each Fourier mode `j` satisfies `∂_t ψ̂_j = s_j ψ̂_j` with `s_j` its regular indicial root
    /// `max(j, 2 − 2α − j)`.
    RegularModes,
    /// `ψ = 0` on the inner circle.
    Homogeneous,
    /// `∂_t ψ = s ψ` for every mode.
    Robin(f64),
}

impl InnerCondition {
    fn rates(&self, alpha: f64, n: usize) -> Option<Vec<f64>> {
        match *self {
            InnerCondition::Homogeneous => None,
            InnerCondition::Robin(s) => Some(vec![s; n]),
            InnerCondition::RegularModes => Some(
                (0..n)
                    .map(|m| {
                        let j = frequency(m, n) as f64;
                        j.max(2.0 - 2.0 * alpha - j)
                    })
                    .collect(),
            ),
        }
    }

    /// Circulant column `σ(m)` of the rate operator in physical space.
    fn circulant(&self, alpha: f64, n: usize) -> Option<Vec<C64>> {
        let rates = self.rates(alpha, n)?;
        let spec: Vec<C64> = rates.iter().map(|&s| C64::new(s, 0.0) / n as f64).collect();
        Some(idft(&spec))
    }
}

/// Residual of the inner condition on row 0 for the field `u` (applied to `u` itself).
pub fn inner_residual(grid: &BGrid, st: &Stencils, u: &Field<C64>, cond: InnerCondition, alpha: f64) -> Vec<C64> {
    let n = grid.n_theta();
    match cond.rates(alpha, n) {
        None => u.row(0).to_vec(),
        Some(rates) => {
            let hat = dft(u.row(0));
            let scaled: Vec<C64> = hat.iter().zip(&rates).map(|(c, s)| c * s).collect();
            let su = idft(&scaled);
            (0..n).map(|k| st.dt_at(u, 0, k) - su[k]).collect()
        }
    }
}

/// Derivative of the normalized tension `¼[(∂_t²+∂_θ²)u + Γ(u)D⁻u D⁺u]` at `u0`:
/// `Lψ = ¼(∂_t²+∂_θ²)ψ + (a+b)∂_tψ + i(b−a)∂_θψ + cψ + dψ̄`.
#[derive(Clone, Debug)]
pub struct LinearizedOperator {
    grid: BGrid,
    alpha: f64,
    st: Stencils,
    pub coef_t: Field<C64>,
    pub coef_theta: Field<C64>,
    pub coef_psi: Field<C64>,
    pub coef_conj: Field<C64>,
}

fn idx(i: usize, k: usize, n: usize) -> usize {
    (i * n + k) * 2
}

impl LinearizedOperator {
    pub fn new(u0: &MapField) -> Result<Self> {
        u0.check_puncture()?;
        let g = u0.grid;
        let st = Stencils::new(&g);
        let jet = u0.jet(&st);
        let mut coef_t = Field::filled(&g, ZERO);
        let mut coef_theta = Field::filled(&g, ZERO);
        let mut coef_psi = Field::filled(&g, ZERO);
        let mut coef_conj = Field::filled(&g, ZERO);
        for i in 0..g.n_t() {
            for k in 0..g.n_theta() {
                let v = u0.samples[(i, k)];
                let (dm, dp) = (jet.dminus(i, k), jet.dplus(i, k));
                let gam = u0.target.gamma(v);
                let (gu, gub) = u0.target.gamma_derivatives(v);
                let a = 0.25 * gam * dp;
                let b = 0.25 * gam * dm;
                coef_t[(i, k)] = a + b;
                coef_theta[(i, k)] = I * (b - a);
                coef_psi[(i, k)] = 0.25 * gu * dm * dp;
                coef_conj[(i, k)] = 0.25 * gub * dm * dp;
            }
        }
        Ok(LinearizedOperator { grid: g, alpha: u0.target.alpha(), st, coef_t, coef_theta, coef_psi, coef_conj })
    }

    pub fn grid(&self) -> &BGrid {
        &self.grid
    }

    pub fn stencils(&self) -> &Stencils {
        &self.st
    }

    pub fn apply(&self, psi: &Field<C64>) -> Field<C64> {
        let lap = self.st.b_laplacian(psi);
        let pt = self.st.dt(psi);
        let pth = self.st.dth(psi);
        Field::from_fn(&self.grid, |i, k| {
            let p = psi[(i, k)];
            0.25 * lap[(i, k)]
                + self.coef_t[(i, k)] * pt[(i, k)]
                + self.coef_theta[(i, k)] * pth[(i, k)]
                + self.coef_psi[(i, k)] * p
                + self.coef_conj[(i, k)] * p.conj()
        })
    }

    /// Enumerates `(equation node, unknown node, coefficient, acts on conjugate)`.
    /// Equation rows are `0..n_t−1`: row 0 carries the inner condition.
    fn for_each_term(&self, inner: InnerCondition, mut f: impl FnMut((usize, usize), (usize, usize), C64, bool)) {
        let (n_t, n) = (self.grid.n_t(), self.grid.n_theta());
        let st = &self.st;
        match inner.circulant(self.alpha, n) {
            None => {
                for k in 0..n {
                    f((0, k), (0, k), ONE, false);
                }
            }
            Some(sig) => {
                for k in 0..n {
                    let d1 = &st.d1[0];
                    for (j, &w) in d1.weights.iter().enumerate() {
                        f((0, k), (d1.start + j, k), C64::new(w, 0.0), false);
                    }
                    for (m, &s) in sig.iter().enumerate() {
                        if s.norm() > 1e-15 {
                            f((0, k), (0, (k + n - m) % n), -s, false);
                        }
                    }
                }
            }
        }
        for i in 1..n_t - 1 {
            let (d1, d2) = (&st.d1[i], &st.d2[i]);
            for k in 0..n {
                let e = (i, k);
                let ct = self.coef_t[e];
                for (j, &w) in d2.weights.iter().enumerate() {
                    f(e, (d2.start + j, k), C64::new(0.25 * w, 0.0), false);
                }
                for (j, &w) in d1.weights.iter().enumerate() {
                    f(e, (d1.start + j, k), ct * w, false);
                }
                let cth = self.coef_theta[e];
                for m in 0..n {
                    let col = (i, (k + n - m) % n);
                    let p = C64::new(0.25 * st.c2[m], 0.0) + cth * st.c1[m];
                    if p.norm() > 0.0 {
                        f(e, col, p, false);
                    }
                }
                f(e, e, self.coef_psi[e], false);
                f(e, e, self.coef_conj[e], true);
            }
        }
    }

    /// Real system for the unknown rows `0..n_t−1`; the outer row is Dirichlet data.
    pub fn assemble(&self, inner: InnerCondition) -> BandedMatrix {
        let (n_t, n) = (self.grid.n_t(), self.grid.n_theta());
        let dim = (n_t - 1) * n * 2;
        let band = 10 * n - 1;
        let mut a = BandedMatrix::zeros(dim, band.min(dim - 1), band.min(dim - 1));
        self.for_each_term(inner, |(ei, ek), (ci, ck), p, conj| {
            if ci == n_t - 1 {
                return;
            }
            let (r, c) = (idx(ei, ek, n), idx(ci, ck, n));
            if conj {
                a.add(r, c, p.re);
                a.add(r, c + 1, p.im);
                a.add(r + 1, c, p.im);
                a.add(r + 1, c + 1, -p.re);
            } else {
                a.add(r, c, p.re);
                a.add(r, c + 1, -p.im);
                a.add(r + 1, c, p.im);
                a.add(r + 1, c + 1, p.re);
            }
        });
        a
    }

    /// Contribution of outer-row values to each equation, i.e. the operator applied to a field
    /// supported on the outer row, flattened like the unknowns.
    pub fn boundary_action(&self, inner: InnerCondition, outer: &[C64]) -> Vec<f64> {
        let (n_t, n) = (self.grid.n_t(), self.grid.n_theta());
        let mut out = vec![0.0; (n_t - 1) * n * 2];
        self.for_each_term(inner, |(ei, ek), (ci, ck), p, conj| {
            if ci != n_t - 1 {
                return;
            }
            let v = if conj { p * outer[ck].conj() } else { p * outer[ck] };
            let r = idx(ei, ek, n);
            out[r] += v.re;
            out[r + 1] += v.im;
        });
        out
    }

    pub fn factor(&self, inner: InnerCondition) -> Result<BandedLu> {
        self.assemble(inner).factor()
    }

    /// Solves `Lψ = f` in the interior with the inner condition and `ψ = outer` on `r = 1`.
    /// `f` supplies rows `1..n_t−1` (row 0 of `f` is the inner-condition right-hand side).
    pub fn solve(&self, inner: InnerCondition, rhs: &Field<C64>, outer: &[C64]) -> Result<Field<C64>> {
        let lu = self.factor(inner)?;
        Ok(self.solve_with(&lu, inner, rhs, outer))
    }

    pub fn solve_with(&self, lu: &BandedLu, inner: InnerCondition, rhs: &Field<C64>, outer: &[C64]) -> Field<C64> {
        let (n_t, n) = (self.grid.n_t(), self.grid.n_theta());
        let mut b = self.boundary_action(inner, outer);
        for i in 0..n_t - 1 {
            for k in 0..n {
                let r = idx(i, k, n);
                b[r] = rhs[(i, k)].re - b[r];
                b[r + 1] = rhs[(i, k)].im - b[r + 1];
            }
        }
        lu.solve(&mut b);
        Field::from_fn(&self.grid, |i, k| {
            if i == n_t - 1 {
                outer[k]
            } else {
                let r = idx(i, k, n);
                C64::new(b[r], b[r + 1])
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct LinearizedTension {
    /// `Lψ`, normalized like the tension: `|z|²(σ/4)·dτ[ψ]`.
    pub normalized: Field<C64>,
    /// `dτ[ψ] = 4Lψ/(σr²)`.
    pub tau: Field<C64>,
}

/// Linearized tension of `psi` at `u0`; `u0` must be harmonic to `harmonic_tol`
/// (pass `f64::INFINITY` to skip the check).
pub fn linearized_tension(u0: &MapField, psi: &Field<C64>, harmonic_tol: f64) -> Result<LinearizedTension> {
    if !psi.matches(&u0.grid) {
        return Err(Error::InvalidGrid("variation does not match grid"));
    }
    if harmonic_tol.is_finite() {
        let t = tension(u0)?;
        if t.sup_normalized > harmonic_tol {
            return Err(Error::NotHarmonic { residual: t.sup_normalized, tolerance: harmonic_tol });
        }
    }
    let op = LinearizedOperator::new(u0)?;
    let normalized = op.apply(psi);
    let g = &u0.grid;
    let tau = Field::from_fn(g, |i, k| normalized[(i, k)] * 4.0 / (u0.domain.sigma(g.z(i, k)) * g.r(i).powi(2)));
    Ok(LinearizedTension { normalized, tau })
}

#[derive(Clone, Debug)]
pub struct JacobiSolution {
    pub psi: Field<C64>,
    /// Sup of `|Lψ|` over interior rows.
    pub residual: f64,
}

/// Jacobi field along `u0` with prescribed values on `r = 1`.
pub fn jacobi_solve(u0: &MapField, outer: &[C64], inner: InnerCondition) -> Result<JacobiSolution> {
    let g = &u0.grid;
    if outer.len() != g.n_theta() {
        return Err(Error::InvalidGrid("boundary data does not match grid"));
    }
    let op = LinearizedOperator::new(u0)?;
    let psi = op.solve(inner, &Field::filled(g, ZERO), outer)?;
    let lpsi = op.apply(&psi);
    let residual = (1..g.n_t() - 1)
        .flat_map(|i| lpsi.row(i).iter().map(|v| v.norm()))
        .fold(0.0, f64::max);
    Ok(JacobiSolution { psi, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{round_cone_metric, ConeAngle, ConicMetric, DomainMetric, MuProfile};

    fn target(alpha: f64) -> ConicMetric {
        let a = ConeAngle::new(alpha).unwrap();
        ConicMetric::new(a, 1.3, MuProfile::single(0.2, 2.0 * alpha + 0.5, 1)).unwrap()
    }

    #[test]
    fn linearization_matches_difference_quotients() {
        // second-order consistency in δ of the central quotient
        let g = BGrid::new(-1.5, 33, 16).unwrap();
        let t = target(1.0 / 3.0);
        let u0 = MapField::from_fn(g, t, DomainMetric::Flat, |z| z + 0.05 * z.conj() * z * z + 0.02 * z * z);
        let psi = Field::from_fn(&g, |i, k| {
            let z = g.z(i, k);
            C64::new(0.3, -0.2) * z * z + 0.1 * z.conj() + C64::new(0.0, 0.05) * z
        });
        let lin = linearized_tension(&u0, &psi, f64::INFINITY).unwrap().normalized;
        let err = |d: f64| {
            let plus = tension(&u0.with_samples(u0.samples.zip_map(&psi, |a, b| a + b * d))).unwrap().normalized;
            let minus = tension(&u0.with_samples(u0.samples.zip_map(&psi, |a, b| a - b * d))).unwrap().normalized;
            let mut m: f64 = 0.0;
            for i in 0..g.n_t() {
                for k in 0..g.n_theta() {
                    let q = (plus[(i, k)] - minus[(i, k)]) / (2.0 * d);
                    m = m.max((q - lin[(i, k)]).norm());
                }
            }
            m
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        let order = (e1 / e2).log2();
        assert!(order > 1.9, "order {order} ({e1}, {e2})");
    }

    #[test]
    fn harmonicity_is_required() {
        let g = BGrid::new(-1.5, 33, 16).unwrap();
        let u0 = MapField::from_fn(g, target(0.4), DomainMetric::Flat, |z| z + 0.1 * z.conj());
        let psi = Field::filled(&g, ONE);
        assert!(matches!(linearized_tension(&u0, &psi, 1e-8), Err(Error::NotHarmonic { .. })));
    }

    #[test]
    fn solve_reproduces_a_manufactured_solution() {
        let g = BGrid::new(-2.0, 33, 16).unwrap();
        let u0 = MapField::from_fn(g, target(0.3), DomainMetric::Flat, |z| z + 0.03 * z.conj() * z);
        let op = LinearizedOperator::new(&u0).unwrap();
        // ψ = z² satisfies the regular-mode closure exactly in each mode
        let psi = Field::from_fn(&g, |i, k| g.z(i, k).powi(2) * C64::new(1.0, 0.5));
        let mut rhs = op.apply(&psi);
        let ir = inner_residual(&g, op.stencils(), &psi, InnerCondition::RegularModes, 0.3);
        rhs.row_mut(0).copy_from_slice(&ir);
        let back = op.solve(InnerCondition::RegularModes, &rhs, psi.row(g.n_t() - 1)).unwrap();
        let err = back.zip_map(&psi, |a, b| a - b).sup_norm();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn jacobi_field_of_rotation_on_round_cone() {
        // rotations are isometries: ψ = iz is a Jacobi field along the identity
        let alpha = 0.4;
        let g = BGrid::new(-3.0, 97, 16).unwrap();
        let u0 = MapField::from_fn(g, round_cone_metric(ConeAngle::new(alpha).unwrap()), DomainMetric::Flat, |z| z);
        let outer: Vec<C64> = (0..16).map(|k| I * g.z(g.n_t() - 1, k)).collect();
        let sol = jacobi_solve(&u0, &outer, InnerCondition::RegularModes).unwrap();
        let err = Field::from_fn(&g, |i, k| sol.psi[(i, k)] - I * g.z(i, k)).sup_norm();
        assert!(err < 1e-6, "{err}");
        assert!(sol.residual < 1e-12);
    }
}
