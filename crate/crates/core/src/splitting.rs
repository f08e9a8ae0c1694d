//! Banded splitting `A = T - E - F`.
//!
//! `T` keeps the band `|i - j| <= m`. `E` and `F` hold the *negated* entries
//! strictly below and strictly above the band, so every iteration formula
//! uses them with a plus sign. With `m = 0` this is the classical
//! diagonal / strictly-lower / strictly-upper splitting.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

#[derive(Debug, Clone)]
pub struct BandedSplitting {
    half_bandwidth: usize,
    band: SquareMatrix,
    lower: SquareMatrix,
    upper: SquareMatrix,
}

pub fn extract_splitting(a: &SquareMatrix, m: usize) -> Result<BandedSplitting> {
    let n = a.order();
    if m >= n {
        return Err(Error::Parameter(format!(
            "half-bandwidth m = {m} must lie in [0, {}]",
            n - 1
        )));
    }
    let band = a.filter_map(|i, j, v| (i.abs_diff(j) <= m).then_some(v));
    let lower = a.filter_map(|i, j, v| (i > j + m).then_some(-v));
    let upper = a.filter_map(|i, j, v| (j > i + m).then_some(-v));
    Ok(BandedSplitting {
        half_bandwidth: m,
        band,
        lower,
        upper,
    })
}

impl BandedSplitting {
    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    pub fn order(&self) -> usize {
        self.band.order()
    }

    /// The band part `T`.
    pub fn band(&self) -> &SquareMatrix {
        &self.band
    }

    /// `E`: negated entries with `i > j + m`.
    pub fn lower(&self) -> &SquareMatrix {
        &self.lower
    }

    /// `F`: negated entries with `j > i + m`.
    pub fn upper(&self) -> &SquareMatrix {
        &self.upper
    }

    /// `T - E - F`.
    pub fn reconstruct(&self) -> SquareMatrix {
        SquareMatrix::linear_combination(&[(1.0, &self.band), (-1.0, &self.lower), (-1.0, &self.upper)])
            .expect("parts share one order")
    }
}
