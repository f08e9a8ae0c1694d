#![allow(dead_code)]

use std::path::PathBuf;

use gsolve::SquareMatrix;
use nalgebra::DMatrix;
use rand::Rng;

pub fn fixture(name: &str) -> SquareMatrix {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    gsolve::mtx::read_matrix_market_file(&path).unwrap()
}

/// Dense `(M, N)` pair written straight from the splitting definitions,
/// without going through the library's band extraction.
pub fn dense_split(a: &DMatrix<f64>, m: usize, method: &str, omega: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let t = DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) <= m { a[(i, j)] } else { 0.0 });
    let e = DMatrix::from_fn(n, n, |i, j| if i > j + m { -a[(i, j)] } else { 0.0 });
    let f = DMatrix::from_fn(n, n, |i, j| if j > i + m { -a[(i, j)] } else { 0.0 });
    match method {
        "gj" => (t, e + f),
        "ggs" => (&t - &e, f),
        "gsor" => (&t - &e * omega, &t * (1.0 - omega) + &f * omega),
        _ => panic!("unknown method {method}"),
    }
}

/// `M^{-1} N` through nalgebra's dense LU.
pub fn oracle_iteration_matrix(a: &DMatrix<f64>, m: usize, method: &str, omega: f64) -> DMatrix<f64> {
    let (mm, nn) = dense_split(a, m, method, omega);
    mm.lu().solve(&nn).expect("M part invertible")
}

pub fn oracle_rho(h: &DMatrix<f64>) -> f64 {
    h.complex_eigenvalues().iter().fold(0.0, |r: f64, z| r.max(z.norm()))
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Random sparse pattern with roughly `density` off-diagonal fill.
pub fn random_pattern<R: Rng>(rng: &mut R, n: usize, density: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i != j && rng.random_bool(density) {
            rng.random_range(-1.0..1.0)
        } else {
            0.0
        }
    })
}

/// Strictly diagonally dominant with random diagonal signs.
pub fn random_sdd<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let density = rng.random_range(0.2..0.9);
    let mut a = random_pattern(rng, n, density);
    for i in 0..n {
        let off: f64 = a.row(i).iter().map(|v| v.abs()).sum();
        let d = off * rng.random_range(1.0..1.5) + rng.random_range(0.01..0.5);
        a[(i, i)] = if rng.random_bool(0.5) { d } else { -d };
    }
    a
}

/// Nonsingular M-matrix `D1 Z D2` with `Z` a strictly dominant Z-matrix and
/// `D1`, `D2` positive diagonal; typically not row dominant itself.
pub fn random_m<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut z = random_sdd(rng, n);
    for i in 0..n {
        for j in 0..n {
            z[(i, j)] = if i == j { z[(i, j)].abs() } else { -z[(i, j)].abs() };
        }
    }
    let d1: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
    let d2: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
    DMatrix::from_fn(n, n, |i, j| d1[i] * z[(i, j)] * d2[j])
}

/// H-matrix: an M-matrix with every entry's sign flipped at random, so its
/// comparison matrix is the M-matrix.
pub fn random_h<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let m = random_m(rng, n);
    m.map(|v| if rng.random_bool(0.5) { -v } else { v })
}

/// Dense general matrix with a dominant diagonal so every M part is invertible.
pub fn random_general<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    for i in 0..n {
        a[(i, i)] += (n as f64 + 1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    }
    a
}

pub fn sparse(a: &DMatrix<f64>) -> SquareMatrix {
    SquareMatrix::from_dense(a).unwrap()
}

/// Prints one acceptance line and returns whether it passed.
pub fn report(id: &str, pass: bool, detail: impl AsRef<str>) -> bool {
    println!("{} {id}: {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
    pass
}
