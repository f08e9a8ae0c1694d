//! One-step operators for the banded-splitting iterations.
//!
//! | method | M part          | N part              | rhs scale |
//! |--------|-----------------|---------------------|-----------|
//! | GJ     | `T`             | `E + F`             | 1         |
//! | GGS    | `T - E`         | `F`                 | 1         |
//! | GSOR   | `T - w E`       | `(1 - w) T + w F`   | `w`       |
//!
//! GJ and GGS split `A = M - N`; GSOR splits `w A = M - N`. One step is
//! `x' = M^{-1} (N x + scale * b)`, with `M` factored once at build time.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::band::BandLu;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::splitting::BandedSplitting;

/// Default cap on the order of explicitly assembled iteration matrices.
pub const DEFAULT_DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Generalized Jacobi.
    #[serde(rename = "GJ")]
    Gj,
    /// Generalized Gauss-Seidel.
    #[serde(rename = "GGS")]
    Ggs,
    /// Generalized successive over-relaxation.
    #[serde(rename = "GSOR")]
    Gsor,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Gj => "GJ",
            Method::Ggs => "GGS",
            Method::Gsor => "GSOR",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gj" | "jacobi" => Ok(Method::Gj),
            "ggs" | "gs" | "gauss-seidel" => Ok(Method::Ggs),
            "gsor" | "sor" => Ok(Method::Gsor),
            other => Err(Error::Parameter(format!("unknown method '{other}'"))),
        }
    }
}

/// A square linear map applied matrix-free.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = Op x`. Both slices have length [`dim`](Self::dim).
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

impl LinearOperator for SquareMatrix {
    fn dim(&self) -> usize {
        self.order()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_into(x, y).expect("operator dimensions");
    }
}

/// The map `x -> M^{-1} N x` with `M` held as a prepared factorization.
#[derive(Debug, Clone)]
pub struct SplitOperator {
    solver: BandLu,
    multiplier: SquareMatrix,
}

impl SplitOperator {
    pub fn new(m_part: &SquareMatrix, n_part: SquareMatrix) -> Result<Self> {
        if m_part.order() != n_part.order() {
            return Err(Error::Dimension {
                expected: m_part.order(),
                got: n_part.order(),
            });
        }
        Ok(Self {
            solver: BandLu::factor(m_part)?,
            multiplier: n_part,
        })
    }

    pub fn solver(&self) -> &BandLu {
        &self.solver
    }

    pub fn multiplier(&self) -> &SquareMatrix {
        &self.multiplier
    }

    /// Dense `M^{-1} N`, one solve per column of `N`.
    pub fn to_dense(&self, dense_limit: usize) -> Result<DMatrix<f64>> {
        let n = self.multiplier.order();
        if n > dense_limit {
            return Err(Error::TooLarge {
                order: n,
                limit: dense_limit,
            });
        }
        let by_column = self.multiplier.transpose();
        let columns: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut col = vec![0.0; n];
                for (i, v) in by_column.row(j) {
                    col[i] = v;
                }
                self.solver
                    .solve_in_place(&mut col)
                    .expect("column length matches order");
                col
            })
            .collect();
        Ok(DMatrix::from_fn(n, n, |i, j| columns[j][i]))
    }
}

impl LinearOperator for SplitOperator {
    fn dim(&self) -> usize {
        self.multiplier.order()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.multiplier.mul_vec_into(x, y).expect("operator dimensions");
        self.solver.solve_in_place(y).expect("operator dimensions");
    }
}

/// A prepared GJ, GGS or GSOR step on a fixed splitting.
#[derive(Debug, Clone)]
pub struct StepOperator {
    method: Method,
    omega: f64,
    splitting: BandedSplitting,
    m_part: SquareMatrix,
    op: SplitOperator,
    rhs_scale: f64,
}

/// Builds the step operator. `omega` is only read for [`Method::Gsor`].
pub fn build_step(splitting: BandedSplitting, method: Method, omega: f64) -> Result<StepOperator> {
    let t = splitting.band();
    let e = splitting.lower();
    let f = splitting.upper();
    let (omega, m_part, n_part) = match method {
        Method::Gj => (1.0, t.clone(), SquareMatrix::linear_combination(&[(1.0, e), (1.0, f)])?),
        Method::Ggs => (1.0, SquareMatrix::linear_combination(&[(1.0, t), (-1.0, e)])?, f.clone()),
        Method::Gsor => {
            if omega == 0.0 || !omega.is_finite() {
                return Err(Error::Parameter(format!(
                    "relaxation factor must be finite and nonzero, got {omega}"
                )));
            }
            if !(omega > 0.0 && omega < 2.0) {
                log::warn!("relaxation factor {omega} lies outside (0, 2)");
            }
            (
                omega,
                SquareMatrix::linear_combination(&[(1.0, t), (-omega, e)])?,
                SquareMatrix::linear_combination(&[(1.0 - omega, t), (omega, f)])?,
            )
        }
    };
    let op = SplitOperator::new(&m_part, n_part).map_err(|e| match e {
        Error::Singular { column } => Error::SingularSplitting {
            method,
            m: splitting.half_bandwidth(),
            column,
        },
        other => other,
    })?;
    Ok(StepOperator {
        method,
        omega,
        rhs_scale: omega,
        splitting,
        m_part,
        op,
    })
}

impl StepOperator {
    pub fn method(&self) -> Method {
        self.method
    }

    /// Relaxation factor; 1 for GJ and GGS.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn splitting(&self) -> &BandedSplitting {
        &self.splitting
    }

    pub fn m_part(&self) -> &SquareMatrix {
        &self.m_part
    }

    pub fn n_part(&self) -> &SquareMatrix {
        self.op.multiplier()
    }

    pub fn order(&self) -> usize {
        self.m_part.order()
    }

    pub fn apply_step(&self, x: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.order()];
        self.apply_step_into(x, b, &mut out)?;
        Ok(out)
    }

    /// Writes the next iterate into `out`.
    pub fn apply_step_into(&self, x: &[f64], b: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.order();
        for len in [x.len(), b.len(), out.len()] {
            if len != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: len,
                });
            }
        }
        self.op.multiplier().mul_vec_into(x, out)?;
        for (o, bi) in out.iter_mut().zip(b) {
            *o += self.rhs_scale * bi;
        }
        self.op.solver().solve_in_place(out)
    }

    /// The matrix-free iteration operator `x -> M^{-1} N x`.
    pub fn iteration_operator(&self) -> &SplitOperator {
        &self.op
    }

    /// Dense iteration matrix `M^{-1} N`.
    pub fn iteration_matrix(&self, dense_limit: usize) -> Result<DMatrix<f64>> {
        self.op.to_dense(dense_limit)
    }
}

impl LinearOperator for StepOperator {
    fn dim(&self) -> usize {
        self.order()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply(x, y)
    }
}
