//! Compressed sparse row storage for square real matrices.
//!
//! Indices are 0-based in the Rust API. Matrix Market files (see [`crate::mtx`])
//! use 1-based indices and are converted on the way in and out.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A real `n x n` matrix stored in CSR form.
///
/// Column indices within a row are sorted and unique, and explicit zeros are
/// never stored. Instances are immutable once built.
#[derive(Clone)]
pub struct SquareMatrix {
    order: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    symmetry_hint: Option<bool>,
}

impl SquareMatrix {
    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Duplicate positions are summed and entries that end up exactly zero
    /// are dropped.
    pub fn from_triplets<I>(order: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if order == 0 {
            return Err(Error::Parameter("matrix order must be positive".into()));
        }
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, v) in triplets {
            if i >= order || j >= order {
                return Err(Error::Parameter(format!(
                    "entry ({}, {}) outside a {order}x{order} matrix",
                    i + 1,
                    j + 1
                )));
            }
            entries.push((i, j, v));
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));

        let mut row_ptr = vec![0usize; order + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        let mut k = 0;
        while k < entries.len() {
            let (i, j, mut v) = entries[k];
            k += 1;
            while k < entries.len() && entries[k].0 == i && entries[k].1 == j {
                v += entries[k].2;
                k += 1;
            }
            if v != 0.0 {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..order {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            order,
            row_ptr,
            cols,
            vals,
            symmetry_hint: None,
        })
    }

    /// Builds a matrix from dense rows. Every row must have `rows.len()` entries.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            triplets.extend(row.iter().enumerate().map(|(j, &v)| (i, j, v)));
        }
        Self::from_triplets(n, triplets)
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let n = m.nrows();
        Self::from_triplets(
            n,
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (i, j, m[(i, j)])),
        )
    }

    pub fn identity(order: usize) -> Result<Self> {
        Self::from_triplets(order, (0..order).map(|i| (i, i, 1.0)))
    }

    pub fn zeros(order: usize) -> Result<Self> {
        Self::from_triplets(order, std::iter::empty())
    }

    pub fn with_symmetry_hint(mut self, hint: Option<bool>) -> Self {
        self.symmetry_hint = hint;
        self
    }

    pub fn symmetry_hint(&self) -> Option<bool> {
        self.symmetry_hint
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row_slices(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    fn row_slices(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[range.clone()], &self.vals[range])
    }

    /// Stored entries of row `i` as `(col, value)`, in increasing column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (cols, vals) = self.row_slices(i);
        cols.iter().copied().zip(vals.iter().copied())
    }

    /// Stored entries of row `i` with `lo <= col <= hi`.
    pub fn row_range(&self, i: usize, lo: usize, hi: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (cols, vals) = self.row_slices(i);
        let start = cols.partition_point(|&c| c < lo);
        let end = cols.partition_point(|&c| c <= hi);
        cols[start..end]
            .iter()
            .copied()
            .zip(vals[start..end].iter().copied())
    }

    /// All stored entries as `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.order).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    /// Largest `i - j` and `j - i` over stored entries.
    pub fn bandwidths(&self) -> (usize, usize) {
        self.iter().fold((0, 0), |(lo, up), (i, j, _)| {
            if i > j {
                (lo.max(i - j), up)
            } else {
                (lo, up.max(j - i))
            }
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.order];
        self.mul_vec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
        Ok(())
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.order {
            return Err(Error::Dimension {
                expected: self.order,
                got: len,
            });
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let t = Self::from_triplets(self.order, self.iter().map(|(i, j, v)| (j, i, v)))
            .expect("transpose keeps indices in range");
        t.with_symmetry_hint(self.symmetry_hint)
    }

    /// Maps every stored entry through `f(row, col, value)`; entries mapped
    /// to `None` are dropped.
    pub fn filter_map<F>(&self, mut f: F) -> Self
    where
        F: FnMut(usize, usize, f64) -> Option<f64>,
    {
        let entries: Vec<_> = self
            .iter()
            .filter_map(|(i, j, v)| f(i, j, v).map(|w| (i, j, w)))
            .collect();
        Self::from_triplets(self.order, entries).expect("filter keeps indices in range")
    }

    /// `sum_k coeff_k * M_k` for matrices of equal order.
    pub fn linear_combination(terms: &[(f64, &SquareMatrix)]) -> Result<Self> {
        let order = terms
            .first()
            .map(|(_, m)| m.order)
            .ok_or_else(|| Error::Parameter("empty linear combination".into()))?;
        let mut triplets = Vec::new();
        for &(c, m) in terms {
            if m.order != order {
                return Err(Error::Dimension {
                    expected: order,
                    got: m.order,
                });
            }
            triplets.extend(m.iter().map(|(i, j, v)| (i, j, c * v)));
        }
        Self::from_triplets(order, triplets)
    }

    /// Exact entrywise symmetry of the stored values.
    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|(i, j, v)| self.get(j, i) == v)
    }

    /// Largest absolute stored value (0 for the zero matrix).
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.order, self.order);
        for (i, j, v) in self.iter() {
            d[(i, j)] = v;
        }
        d
    }
}

impl PartialEq for SquareMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.row_ptr == other.row_ptr
            && self.cols == other.cols
            && self.vals == other.vals
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SquareMatrix")
            .field("order", &self.order)
            .field("nnz", &self.nnz())
            .field("entries", &self.iter().take(32).collect::<Vec<_>>())
            .finish()
    }
}

/// Euclidean norm.
pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}
