//! Banded LU with partial pivoting, in the style of LAPACK's `gbtf2`.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals. Storage reserves
/// `kl` extra super-diagonals for pivoting fill.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandedMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            return 0.0;
        }
        self.data[self.slot(i, j)]
    }

    /// Sets entry `(i, j)`; `j` must lie within the declared band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i}, {j}) outside band"
        );
        let s = self.slot(i, j);
        self.data[s] = value;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku);
        let s = self.slot(i, j);
        self.data[s] += value;
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            *yi = (lo..=hi).map(|j| self.get(i, j) * x[j]).sum();
        }
    }

    /// Factorizes in place.
    pub fn factorize(mut self) -> Result<BandedLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut pivots = vec![0usize; n];
        let mut lower = vec![0.0; n * kl.max(1)];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut piv = k;
            let mut best = self.get(k, k).abs();
            for r in k + 1..=last_row {
                let a = self.get(r, k).abs();
                if a > best {
                    best = a;
                    piv = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "banded matrix is singular at column {k}"
                )));
            }
            pivots[k] = piv;
            let last_col = (k + kl + ku).min(n - 1);
            if piv != k {
                for j in k..=last_col {
                    let (a, b) = (self.slot(k, j), self.slot(piv, j));
                    self.data.swap(a, b);
                }
            }
            let diag = self.data[self.slot(k, k)];
            for r in k + 1..=last_row {
                let s = self.slot(r, k);
                let m = self.data[s] / diag;
                self.data[s] = 0.0;
                lower[k * kl + (r - k - 1)] = m;
                if m != 0.0 {
                    for j in k + 1..=last_col {
                        let src = self.data[self.slot(k, j)];
                        let dst = self.slot(r, j);
                        self.data[dst] -= m * src;
                    }
                }
            }
        }
        Ok(BandedLu {
            upper: self,
            lower,
            pivots,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    upper: BandedMatrix,
    lower: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    /// Overwrites `b` with the solution of `A x = b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let a = &self.upper;
        let (n, kl) = (a.n, a.kl);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                b[r] -= self.lower[k * kl + (r - k - 1)] * bk;
            }
        }
        for i in (0..n).rev() {
            let hi = (i + a.kl + a.ku).min(n - 1);
            let mut s = b[i];
            for j in i + 1..=hi {
                s -= a.data[a.slot(i, j)] * b[j];
            }
            b[i] = s / a.data[a.slot(i, i)];
        }
    }
}
