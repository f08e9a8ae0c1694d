//! Banded direct factorizations.
//!
//! [`BandLu`] is an LU factorization with partial pivoting for a matrix with
//! `kl` subdiagonals and `ku` superdiagonals. Row interchanges can push the
//! upper factor out to `kl + ku` superdiagonals, so every row of `U` is stored
//! with width `kl + ku + 1`. The lower bandwidth is measured from the actual
//! nonzero pattern, so a Gauss-Seidel type M part (narrow upper band, long
//! lower reach) is factored without densifying the upper triangle.
//!
//! [`BandCholesky`] is the symmetric counterpart without pivoting, used to
//! certify positive definiteness.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

#[derive(Debug, Clone)]
pub struct BandLu {
    order: usize,
    kl: usize,
    width: usize,
    // Row k holds U(k, k..k + width).
    upper: Vec<f64>,
    // Row k holds the multipliers applied to rows k+1..=k+kl at step k.
    lower: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &SquareMatrix) -> Result<Self> {
        let (kl, ku) = a.bandwidths();
        Self::factor_with_bandwidths(a, kl, ku)
    }

    /// Factors `a`, which must have no entries outside the `(kl, ku)` band.
    fn factor_with_bandwidths(a: &SquareMatrix, kl: usize, ku: usize) -> Result<Self> {
        let n = a.order();
        let width = kl + ku + 1;
        let mut work = vec![0.0; n * width];

        // Row i starts at column i - kl; the first kl rows are shifted left
        // so that they start at column 0.
        for i in 0..n {
            let start = i.saturating_sub(kl);
            let row = &mut work[i * width..(i + 1) * width];
            for (j, v) in a.row(i) {
                debug_assert!(j + kl >= i && j <= i + ku, "entry outside declared band");
                row[j - start] = v;
            }
        }

        let mut lower = vec![0.0; n * kl];
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = work[k * width].abs();
            for r in k + 1..=last {
                let v = work[r * width].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular { column: k });
            }
            pivots[k] = p;
            if p != k {
                for t in 0..width {
                    work.swap(k * width + t, p * width + t);
                }
            }
            let pivot = work[k * width];
            for r in k + 1..=last {
                let factor = work[r * width] / pivot;
                lower[k * kl + (r - k - 1)] = factor;
                // Eliminate and shift row r left so it starts at column k + 1.
                for t in 1..width {
                    work[r * width + t - 1] = work[r * width + t] - factor * work[k * width + t];
                }
                work[r * width + width - 1] = 0.0;
            }
        }

        Ok(Self {
            order: n,
            kl,
            width,
            upper: work,
            lower,
            pivots,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        let n = self.order;
        if b.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: b.len(),
            });
        }
        let kl = self.kl;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                let last = (k + kl).min(n - 1);
                for r in k + 1..=last {
                    b[r] -= self.lower[k * kl + (r - k - 1)] * bk;
                }
            }
        }
        let w = self.width;
        for k in (0..n).rev() {
            let row = &self.upper[k * w..(k + 1) * w];
            let reach = w.min(n - k);
            let mut s = b[k];
            for t in 1..reach {
                s -= row[t] * b[k + t];
            }
            b[k] = s / row[0];
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

/// Banded Cholesky factor `A = L L^T`, with row `i` of `L` stored over
/// columns `i - kd ..= i`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    order: usize,
    kd: usize,
    lower: Vec<f64>,
}

impl BandCholesky {
    /// Factors a symmetric matrix, reading only its lower triangle.
    ///
    /// Returns the index of the first nonpositive pivot on failure.
    pub fn factor(a: &SquareMatrix) -> std::result::Result<Self, usize> {
        let n = a.order();
        let kd = a.bandwidths().0;
        let w = kd + 1;
        let mut l = vec![0.0; n * w];
        // L(i, j) lives at l[i * w + (j + kd - i)].
        let at = |i: usize, j: usize| i * w + (j + kd - i);
        for i in 0..n {
            let lo = i.saturating_sub(kd);
            for (j, v) in a.row_range(i, lo, i) {
                l[at(i, j)] = v;
            }
            for j in lo..=i {
                let kmin = lo.max(j.saturating_sub(kd));
                let mut s = l[at(i, j)];
                for k in kmin..j {
                    s -= l[at(i, k)] * l[at(j, k)];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(i);
                    }
                    l[at(i, i)] = s.sqrt();
                } else {
                    l[at(i, j)] = s / l[at(j, j)];
                }
            }
        }
        Ok(Self {
            order: n,
            kd,
            lower: l,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bandwidth(&self) -> usize {
        self.kd
    }

    /// Entry `L(i, j)` of the factor.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if j > i || i - j > self.kd {
            0.0
        } else {
            self.lower[i * (self.kd + 1) + (j + self.kd - i)]
        }
    }
}
