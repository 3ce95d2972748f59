//! Banded matrices and LU factorization with partial pivoting.
//!
//! Storage follows the LAPACK `gbtrf` layout: column-major with `2*kl + ku + 1`
//! rows per column, the extra `kl` rows holding fill-in created by row
//! interchanges.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.kl
    }

    pub fn upper(&self) -> usize {
        self.ku
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i <= j + self.kl && j <= i + self.ku
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            0.0
        }
    }

    /// Adds `value` to entry `(i, j)`. Panics if the entry lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let k = self.offset(i, j);
        self.data[k] += value;
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.offset(i, j);
        self.data[k] = value;
    }

    /// Iterates over all stored in-band entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |j| {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            (lo..=hi).map(move |i| (i, j, self.get(i, j)))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for (i, j, a) in self.entries() {
            y[i] += a * x[j];
        }
        y
    }

    /// Product `self * diag(d) * other` of two band matrices.
    pub fn mul_diag_mul(&self, d: &[f64], other: &BandMatrix) -> BandMatrix {
        assert_eq!(self.n, other.n);
        assert_eq!(d.len(), self.n);
        let n = self.n;
        let kl = (self.kl + other.kl).min(n.saturating_sub(1));
        let ku = (self.ku + other.ku).min(n.saturating_sub(1));
        let mut out = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            let k_lo = i.saturating_sub(self.kl);
            let k_hi = (i + self.ku).min(n - 1);
            for k in k_lo..=k_hi {
                let a = self.get(i, k) * d[k];
                if a == 0.0 {
                    continue;
                }
                let j_lo = k.saturating_sub(other.kl);
                let j_hi = (k + other.ku).min(n - 1);
                for j in j_lo..=j_hi {
                    let b = other.get(k, j);
                    if b != 0.0 {
                        out.add(i, j, a * b);
                    }
                }
            }
        }
        out
    }

    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let mut pivots = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = j;
            let mut best = self.data[self.offset(j, j)].abs();
            for i in j + 1..=j + km {
                let a = self.data[self.offset(i, j)].abs();
                if a > best {
                    best = a;
                    p = i;
                }
            }
            pivots[j] = p;
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular(j));
            }
            ju = ju.max((p + ku).min(n - 1));
            if p != j {
                for c in j..=ju {
                    let a = self.offset(j, c);
                    let b = self.offset(p, c);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.offset(j, j)];
            for i in j + 1..=j + km {
                let k = self.offset(i, j);
                self.data[k] /= pivot;
            }
            for c in j + 1..=ju {
                let a = self.data[self.offset(j, c)];
                if a == 0.0 {
                    continue;
                }
                for i in j + 1..=j + km {
                    let l = self.data[self.offset(i, j)];
                    let k = self.offset(i, c);
                    self.data[k] -= l * a;
                }
            }
        }
        Ok(BandLu { lu: self, pivots })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let a = &self.lu;
        let n = a.n;
        assert_eq!(b.len(), n);
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                b.swap(j, p);
            }
            let km = a.kl.min(n - 1 - j);
            let bj = b[j];
            if bj != 0.0 {
                for i in j + 1..=j + km {
                    b[i] -= a.data[a.offset(i, j)] * bj;
                }
            }
        }
        let width = a.kl + a.ku;
        for j in (0..n).rev() {
            b[j] /= a.data[a.offset(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                for i in j.saturating_sub(width)..j {
                    b[i] -= a.data[a.offset(i, j)] * bj;
                }
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
