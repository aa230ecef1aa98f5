//! Differentiation in the b-directions: finite differences in `t`, trigonometric in `θ`.

use core::ops::{Add, Mul, Sub};

use super::{BGrid, Field};
use crate::prelude::*;

/// Field values that the stencils can act on.
pub trait Sample: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl Sample for f64 {}
impl Sample for C64 {}

/// Finite-difference weights for derivatives `0..=m` at `x0` on nodes `xs` (Fornberg).
/// Returns `w[d][j]`.
pub fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

#[derive(Clone, Debug)]
pub struct RowStencil {
    pub start: usize,
    pub weights: Vec<f64>,
}

/// Radial stencils per row plus circulant columns for `∂_θ`, `∂_θ²`.
#[derive(Clone, Debug)]
pub struct Stencils {
    n_t: usize,
    n_theta: usize,
    pub d1: Vec<RowStencil>,
    pub d2: Vec<RowStencil>,
    /// `(D_θ f)_j = Σ_k c1[(j - k) mod n] f_k`
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
}

fn row_stencils(n: usize, h: f64, order: usize, width: usize) -> Vec<RowStencil> {
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let xs: Vec<f64> = (0..width).map(|j| (start + j) as f64).collect();
            let w = fornberg(i as f64, &xs, order);
            let scale = h.powi(order as i32);
            RowStencil { start, weights: w[order].iter().map(|x| x / scale).collect() }
        })
        .collect()
}

impl Stencils {
    pub fn new(grid: &BGrid) -> Self {
        let (n_t, n) = (grid.n_t(), grid.n_theta());
        let ht = grid.h_t();
        let d1 = row_stencils(n_t, ht, 1, 5);
        let mut d2 = row_stencils(n_t, ht, 2, 6);
        // interior second derivative: symmetric five-point
        let centred = row_stencils(n_t, ht, 2, 5);
        for i in 2..n_t - 2 {
            d2[i] = centred[i].clone();
        }
        let h = grid.h_theta();
        let mut c1 = vec![0.0; n];
        let mut c2 = vec![0.0; n];
        let even = n % 2 == 0;
        c2[0] = if even { -PI * PI / (3.0 * h * h) - 1.0 / 6.0 } else { -PI * PI / (3.0 * h * h) + 1.0 / 12.0 };
        for m in 1..n {
            let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
            let x = m as f64 * h / 2.0;
            let s = x.sin();
            if even {
                c1[m] = 0.5 * sgn * x.cos() / s;
                c2[m] = -0.5 * sgn / (s * s);
            } else {
                c1[m] = 0.5 * sgn / s;
                c2[m] = -0.5 * sgn * x.cos() / (s * s);
            }
        }
        Stencils { n_t, n_theta: n, d1, d2, c1, c2 }
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    #[inline]
    fn radial<T: Sample>(st: &RowStencil, f: &Field<T>, k: usize) -> T {
        let mut acc = T::default();
        for (j, &w) in st.weights.iter().enumerate() {
            acc = acc + f[(st.start + j, k)] * w;
        }
        acc
    }

    #[inline]
    fn circulant<T: Sample>(c: &[f64], row: &[T], k: usize) -> T {
        let n = row.len();
        let mut acc = T::default();
        for (m, &cm) in c.iter().enumerate() {
            if cm != 0.0 {
                acc = acc + row[(k + n - m) % n] * cm;
            }
        }
        acc
    }

    pub fn dt_at<T: Sample>(&self, f: &Field<T>, i: usize, k: usize) -> T {
        Self::radial(&self.d1[i], f, k)
    }

    pub fn dtt_at<T: Sample>(&self, f: &Field<T>, i: usize, k: usize) -> T {
        Self::radial(&self.d2[i], f, k)
    }

    pub fn dt<T: Sample>(&self, f: &Field<T>) -> Field<T> {
        let mut out = f.clone();
        for i in 0..self.n_t {
            for k in 0..self.n_theta {
                out[(i, k)] = Self::radial(&self.d1[i], f, k);
            }
        }
        out
    }

    pub fn dtt<T: Sample>(&self, f: &Field<T>) -> Field<T> {
        let mut out = f.clone();
        for i in 0..self.n_t {
            for k in 0..self.n_theta {
                out[(i, k)] = Self::radial(&self.d2[i], f, k);
            }
        }
        out
    }

    pub fn dth<T: Sample>(&self, f: &Field<T>) -> Field<T> {
        self.periodic(f, &self.c1)
    }

    pub fn dthth<T: Sample>(&self, f: &Field<T>) -> Field<T> {
        self.periodic(f, &self.c2)
    }

    fn periodic<T: Sample>(&self, f: &Field<T>, c: &[f64]) -> Field<T> {
        let mut out = f.clone();
        for i in 0..self.n_t {
            for k in 0..self.n_theta {
                out[(i, k)] = Self::circulant(c, f.row(i), k);
            }
        }
        out
    }

    pub fn row_dth<T: Sample>(&self, row: &[T]) -> Vec<T> {
        (0..row.len()).map(|k| Self::circulant(&self.c1, row, k)).collect()
    }

    /// `∂_t² + ∂_θ²`, the flat Laplacian times `r²`.
    pub fn b_laplacian<T: Sample>(&self, f: &Field<T>) -> Field<T> {
        let a = self.dtt(f);
        let b = self.dthth(f);
        a.zip_map(&b, |x, y| x + y)
    }
}

/// First derivatives and b-Laplacian of a complex field, the inputs to every evaluator.
#[derive(Clone, Debug)]
pub struct Jet {
    pub ut: Field<C64>,
    pub uth: Field<C64>,
    pub lap: Field<C64>,
}

impl Jet {
    pub fn new(st: &Stencils, u: &Field<C64>) -> Self {
        Jet { ut: st.dt(u), uth: st.dth(u), lap: st.b_laplacian(u) }
    }

    /// `D⁻u = (∂_t − i∂_θ)u = 2 z u_z`.
    #[inline]
    pub fn dminus(&self, i: usize, k: usize) -> C64 {
        self.ut[(i, k)] - I * self.uth[(i, k)]
    }

    /// `D⁺u = (∂_t + i∂_θ)u = 2 z̄ u_z̄`.
    #[inline]
    pub fn dplus(&self, i: usize, k: usize) -> C64 {
        self.ut[(i, k)] + I * self.uth[(i, k)]
    }
}

/// `ĉ_j = (1/n) Σ_k f_k e^{−ijθ_k}`, stored at index `j mod n`.
pub fn dft(row: &[C64]) -> Vec<C64> {
    let n = row.len();
    let h = TAU / n as f64;
    (0..n)
        .map(|j| {
            let mut acc = ZERO;
            for (k, &f) in row.iter().enumerate() {
                acc += f * C64::from_polar(1.0, -h * ((j * k) % n) as f64);
            }
            acc / n as f64
        })
        .collect()
}

pub fn idft(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len();
    let h = TAU / n as f64;
    (0..n)
        .map(|k| {
            let mut acc = ZERO;
            for (j, &c) in coeffs.iter().enumerate() {
                acc += c * C64::from_polar(1.0, h * ((j * k) % n) as f64);
            }
            acc
        })
        .collect()
}

/// Signed frequency of DFT slot `m`; the Nyquist slot of an even grid is reported as `+n/2`.
#[inline]
pub fn frequency(m: usize, n: usize) -> i64 {
    if 2 * m <= n {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

#[inline]
pub fn slot(j: i64, n: usize) -> usize {
    j.rem_euclid(n as i64) as usize
}
