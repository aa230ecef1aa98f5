use core::ops::{Index, IndexMut};

use crate::prelude::*;
use crate::{Error, Result};

/// Log-polar tensor grid: `n_t` uniform nodes in `t = log r` on `[t_min, 0]`,
/// `n_theta` periodic nodes on `[0, 2π)`. The puncture is never a node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BGrid {
    t_min: f64,
    n_t: usize,
    n_theta: usize,
}

impl BGrid {
    pub fn new(t_min: f64, n_t: usize, n_theta: usize) -> Result<Self> {
        if !(t_min.is_finite() && t_min < 0.0) {
            return Err(Error::InvalidGrid("t_min must be finite and negative"));
        }
        if n_t < 8 || n_theta < 8 {
            return Err(Error::InvalidGrid("need at least 8 nodes in each direction"));
        }
        Ok(BGrid { t_min, n_t, n_theta })
    }

    #[inline]
    pub fn t_min(&self) -> f64 {
        self.t_min
    }
    #[inline]
    pub fn n_t(&self) -> usize {
        self.n_t
    }
    #[inline]
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
    #[inline]
    pub fn len(&self) -> usize {
        self.n_t * self.n_theta
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }
    #[inline]
    pub fn h_t(&self) -> f64 {
        -self.t_min / (self.n_t - 1) as f64
    }
    #[inline]
    pub fn h_theta(&self) -> f64 {
        TAU / self.n_theta as f64
    }
    #[inline]
    pub fn t(&self, i: usize) -> f64 {
        // exact at both ends
        if i + 1 == self.n_t {
            0.0
        } else {
            self.t_min + i as f64 * self.h_t()
        }
    }
    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        self.t(i).exp()
    }
    #[inline]
    pub fn theta(&self, k: usize) -> f64 {
        k as f64 * self.h_theta()
    }
    #[inline]
    pub fn z(&self, i: usize, k: usize) -> C64 {
        C64::from_polar(self.r(i), self.theta(k))
    }
    pub fn r_min(&self) -> f64 {
        self.t_min.exp()
    }

    /// Row whose radius is closest to `r`.
    pub fn row_near(&self, r: f64) -> usize {
        let x = (r.ln() - self.t_min) / self.h_t();
        let i = x.round();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.n_t - 1)
        }
    }

    pub fn stencils(&self) -> super::Stencils {
        super::Stencils::new(self)
    }
}

/// Row-major samples on a [`BGrid`], row `i` is the circle `t = t_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    n_t: usize,
    n_theta: usize,
    data: Vec<T>,
}

impl<T: Copy> Field<T> {
    pub fn filled(grid: &BGrid, value: T) -> Self {
        Field { n_t: grid.n_t, n_theta: grid.n_theta, data: vec![value; grid.len()] }
    }

    pub fn from_fn(grid: &BGrid, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..grid.n_t {
            for k in 0..grid.n_theta {
                data.push(f(i, k));
            }
        }
        Field { n_t: grid.n_t, n_theta: grid.n_theta, data }
    }

    pub fn from_vec(grid: &BGrid, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidGrid("field length does not match grid"));
        }
        Ok(Field { n_t: grid.n_t, n_theta: grid.n_theta, data })
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field { n_t: self.n_t, n_theta: self.n_theta, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn zip_map<U: Copy, V: Copy>(&self, other: &Field<U>, f: impl Fn(T, U) -> V) -> Field<V> {
        assert_eq!(self.data.len(), other.data.len());
        Field {
            n_t: self.n_t,
            n_theta: self.n_theta,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn matches(&self, grid: &BGrid) -> bool {
        self.n_t == grid.n_t && self.n_theta == grid.n_theta
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n_theta..(i + 1) * self.n_theta]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.n_theta..(i + 1) * self.n_theta]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_t, self.n_theta)
    }
}

impl Field<f64> {
    pub fn sup_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Field<C64> {
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.norm()))
    }
}

impl<T> Index<(usize, usize)> for Field<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, k): (usize, usize)) -> &T {
        &self.data[i * self.n_theta + k]
    }
}

impl<T> IndexMut<(usize, usize)> for Field<T> {
    #[inline]
    fn index_mut(&mut self, (i, k): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n_theta + k]
    }
}
