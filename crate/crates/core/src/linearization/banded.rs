use crate::prelude::*;
use crate::{Error, Result};

/// Real band matrix in LAPACK layout with room for the fill-in of partial pivoting.
#[derive(Clone, Debug)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandedMatrix { n, kl, ku, ldab, ab: vec![0.0; ldab * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        self.kl + self.ku + i - j + j * self.ldab
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i > j + self.kl || j > i + self.ku {
            0.0
        } else {
            self.ab[self.idx(i, j)]
        }
    }

    /// Panics outside the declared band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(i <= j + self.kl && j <= i + self.ku, "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.ab[self.idx(i, j)] * x[j];
            }
        }
        y
    }

    /// LU with partial pivoting.
    pub fn factor(mut self) -> Result<BandedLu> {
        let (n, kl) = (self.n, self.kl);
        let scale = self.ab.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tiny = 1e-14 * scale.max(f64::MIN_POSITIVE);
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = j;
            let mut best = self.ab[self.idx(j, j)].abs();
            for i in j + 1..=j + km {
                let v = self.ab[self.idx(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            ipiv[j] = p;
            if best <= tiny || !best.is_finite() {
                return Err(Error::SingularSystem { column: j });
            }
            ju = ju.max((j + self.ku + (p - j)).min(n - 1));
            if p != j {
                for c in j..=ju {
                    let (a, b) = (self.idx(j, c), self.idx(p, c));
                    self.ab.swap(a, b);
                }
            }
            let piv = self.ab[self.idx(j, j)];
            let base = self.idx(j + 1, j);
            for v in &mut self.ab[base..base + km] {
                *v /= piv;
            }
            for c in j + 1..=ju {
                let ajc = self.ab[self.idx(j, c)];
                if ajc != 0.0 {
                    let lcol = self.idx(j + 1, j);
                    let ucol = self.idx(j + 1, c);
                    for m in 0..km {
                        self.ab[ucol + m] -= self.ab[lcol + m] * ajc;
                    }
                }
            }
        }
        Ok(BandedLu { m: self, ipiv })
    }
}

#[derive(Clone, Debug)]
pub struct BandedLu {
    m: BandedMatrix,
    ipiv: Vec<usize>,
}

impl BandedLu {
    pub fn solve(&self, b: &mut [f64]) {
        let m = &self.m;
        let (n, kl, kv) = (m.n, m.kl, m.kl + m.ku);
        assert_eq!(b.len(), n);
        for j in 0..n {
            b.swap(j, self.ipiv[j]);
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            if bj != 0.0 {
                let base = m.idx(j + 1, j);
                for t in 0..km {
                    b[j + 1 + t] -= m.ab[base + t] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= m.ab[m.idx(j, j)];
            let bj = b[j];
            let top = j.saturating_sub(kv);
            for i in top..j {
                b[i] -= m.ab[m.idx(i, j)] * bj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solves_random_band_systems_with_pivoting() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, kl, ku) in &[(1usize, 0usize, 0usize), (10, 2, 3), (57, 5, 1), (40, 0, 4), (64, 7, 7)] {
            let mut a = BandedMatrix::zeros(n, kl, ku);
            for i in 0..n {
                for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                    // weak diagonal forces row exchanges
                    a.add(i, j, rng.gen_range(-1.0..1.0) * if i == j && kl > 0 { 0.01 } else if i == j { 4.0 } else { 1.0 });
                }
            }
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut b = a.matvec(&x);
            let lu = a.clone().factor().unwrap();
            lu.solve(&mut b);
            let err = x.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            assert!(err < 1e-8, "n={n} err={err}");
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = BandedMatrix::zeros(3, 1, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, 1.0);
        assert!(matches!(a.factor(), Err(Error::SingularSystem { column: 2 })));
    }
}
