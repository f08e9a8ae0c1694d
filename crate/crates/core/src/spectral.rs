//! Spectral radius of iteration matrices.
//!
//! Dense mode takes every eigenvalue of an explicit matrix from a real Schur
//! decomposition (Hessenberg reduction followed by shifted QR sweeps).
//! Power mode works matrix-free on any [`LinearOperator`]. Each round applies
//! the operator twice and fits both a one-term model `Hx = l x` and a
//! two-term recurrence `H^2 x = a Hx + b x`; the latter captures dominant
//! `+-l` pairs and complex conjugate pairs, which are common for iteration
//! matrices. The model with the smaller relative residual wins.

use nalgebra::{DMatrix, Schur};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::norm2;
use crate::step::LinearOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralMode {
    Dense,
    Power,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralEstimate {
    pub rho: f64,
    pub mode: SpectralMode,
    /// False when power iteration stopped without meeting its residual target.
    pub reliable: bool,
    /// Relative residual of the accepted eigen-model (power mode only).
    pub residual: Option<f64>,
    /// Operator applications spent (power mode only).
    pub applications: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    pub max_applications: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            max_applications: 10_000,
            tol: 1e-10,
            seed: 0x5eed,
        }
    }
}

/// Largest eigenvalue modulus of a dense square matrix.
///
/// Indices whose row or column is entirely zero only contribute zero
/// eigenvalues (the matrix is block triangular after a symmetric permutation),
/// so they are stripped before the Schur sweep. The QR iteration can stall on
/// what remains when the deflation threshold is at machine precision; it is
/// retried with slightly looser thresholds before giving up.
pub fn dense_spectral_radius(h: &DMatrix<f64>) -> Result<f64> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::Dimension {
            expected: n,
            got: h.ncols(),
        });
    }
    let h = strip_trivial_indices(h);
    let n = h.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    for eps in [f64::EPSILON, 1e-14, 1e-12] {
        if let Some(schur) = Schur::try_new(h.clone(), eps, 1000 * n.max(10)) {
            return Ok(schur
                .complex_eigenvalues()
                .iter()
                .fold(0.0, |r: f64, z| r.max(z.norm())));
        }
    }
    Err(Error::EigenSolve)
}

fn strip_trivial_indices(h: &DMatrix<f64>) -> DMatrix<f64> {
    let mut keep: Vec<usize> = (0..h.nrows()).collect();
    loop {
        let before = keep.len();
        let snapshot = keep.clone();
        keep.retain(|&i| {
            snapshot.iter().any(|&j| h[(i, j)] != 0.0) && snapshot.iter().any(|&j| h[(j, i)] != 0.0)
        });
        if keep.len() == before {
            break;
        }
    }
    h.select_rows(&keep).select_columns(&keep)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Moduli of the roots of `t^2 - a t - b`.
fn quadratic_root_radius(a: f64, b: f64) -> f64 {
    let disc = a * a + 4.0 * b;
    if disc >= 0.0 {
        let s = disc.sqrt();
        ((a + s) / 2.0).abs().max(((a - s) / 2.0).abs())
    } else {
        // complex pair with product -b
        (-b).sqrt()
    }
}

pub fn power_spectral_radius<O: LinearOperator + ?Sized>(op: &O, opts: PowerOptions) -> SpectralEstimate {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);

    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut applications = 0;
    let mut best = (f64::NAN, f64::INFINITY);

    while applications + 2 <= opts.max_applications.max(2) {
        op.apply(&x, &mut y);
        applications += 1;
        let ny = norm2(&y);
        if ny == 0.0 {
            return SpectralEstimate {
                rho: 0.0,
                mode: SpectralMode::Power,
                reliable: true,
                residual: Some(0.0),
                applications,
            };
        }
        op.apply(&y, &mut z);
        applications += 1;
        let nz = norm2(&z);

        // one-term model: y = l x
        let l1 = dot(&x, &y);
        let r1 = y.iter().zip(&x).map(|(p, q)| (p - l1 * q).powi(2)).sum::<f64>().sqrt() / ny;
        let mut candidate = (l1.abs(), r1);

        // two-term model: z = a y + b x, least squares
        if nz > 0.0 {
            let (yy, yx, xx) = (dot(&y, &y), dot(&y, &x), 1.0);
            let det = yy * xx - yx * yx;
            if det > 1e-12 * yy * xx {
                let (yz, xz) = (dot(&y, &z), dot(&x, &z));
                let a = (yz * xx - yx * xz) / det;
                let b = (yy * xz - yx * yz) / det;
                let r2 = z
                    .iter()
                    .zip(y.iter().zip(&x))
                    .map(|(zi, (yi, xi))| (zi - a * yi - b * xi).powi(2))
                    .sum::<f64>()
                    .sqrt()
                    / nz;
                if r2 < candidate.1 {
                    candidate = (quadratic_root_radius(a, b), r2);
                }
            }
        }
        if candidate.1 < best.1 || !best.0.is_finite() {
            best = candidate;
        }
        if candidate.1 <= opts.tol {
            return SpectralEstimate {
                rho: candidate.0,
                mode: SpectralMode::Power,
                reliable: true,
                residual: Some(candidate.1),
                applications,
            };
        }
        if nz == 0.0 {
            // H^2 x = 0: nilpotent on this start vector.
            return SpectralEstimate {
                rho: 0.0,
                mode: SpectralMode::Power,
                reliable: true,
                residual: Some(0.0),
                applications,
            };
        }
        x.iter_mut().zip(&z).for_each(|(xi, zi)| *xi = zi / nz);
    }

    SpectralEstimate {
        rho: best.0,
        mode: SpectralMode::Power,
        reliable: false,
        residual: Some(best.1),
        applications,
    }
}

/// Densifies a matrix-free operator by applying it to the unit vectors.
pub fn materialize<O: LinearOperator + ?Sized>(op: &O) -> DMatrix<f64> {
    let n = op.dim();
    let mut h = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..n {
            h[(i, j)] = col[i];
        }
    }
    h
}

/// Spectral radius of an operator, densified when `mode` is [`SpectralMode::Dense`].
pub fn spectral_radius<O: LinearOperator + ?Sized>(
    op: &O,
    mode: SpectralMode,
    dense_limit: usize,
    power: PowerOptions,
) -> Result<SpectralEstimate> {
    match mode {
        SpectralMode::Dense => {
            let n = op.dim();
            if n > dense_limit {
                return Err(Error::TooLarge {
                    order: n,
                    limit: dense_limit,
                });
            }
            Ok(SpectralEstimate {
                rho: dense_spectral_radius(&materialize(op))?,
                mode,
                reliable: true,
                residual: None,
                applications: n,
            })
        }
        SpectralMode::Power => Ok(power_spectral_radius(op, power)),
    }
}
