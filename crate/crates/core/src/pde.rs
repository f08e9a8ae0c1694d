//! Five-point finite-difference systems for `-Δu + g(x, y) u = f` on the unit
//! square with homogeneous Dirichlet data.
//!
//! Unknowns are ordered block by block: block `i` holds the points with
//! x-index `i`, and within a block the y-index runs fastest. The scaled system
//! has diagonal entries `4 + h² g`, `-1` between neighbours in a block and `-I`
//! between adjacent blocks. The right-hand side is `A · 1`, so the exact
//! discrete solution is the all-ones vector.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReactionTerm {
    XPlusY,
    Zero,
    ExpXY,
    NegExp4XY,
}

impl ReactionTerm {
    pub const ALL: [ReactionTerm; 4] = [
        ReactionTerm::XPlusY,
        ReactionTerm::Zero,
        ReactionTerm::ExpXY,
        ReactionTerm::NegExp4XY,
    ];

    pub fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            ReactionTerm::XPlusY => x + y,
            ReactionTerm::Zero => 0.0,
            ReactionTerm::ExpXY => (x * y).exp(),
            ReactionTerm::NegExp4XY => -(4.0 * x * y).exp(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ReactionTerm::XPlusY => "xplusy",
            ReactionTerm::Zero => "zero",
            ReactionTerm::ExpXY => "expxy",
            ReactionTerm::NegExp4XY => "negexp4xy",
        }
    }

    /// Human-readable formula.
    pub fn formula(self) -> &'static str {
        match self {
            ReactionTerm::XPlusY => "x+y",
            ReactionTerm::Zero => "0",
            ReactionTerm::ExpXY => "exp(xy)",
            ReactionTerm::NegExp4XY => "-exp(4xy)",
        }
    }
}

impl fmt::Display for ReactionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReactionTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xplusy" | "x+y" => Ok(ReactionTerm::XPlusY),
            "zero" | "0" => Ok(ReactionTerm::Zero),
            "expxy" | "exp(xy)" => Ok(ReactionTerm::ExpXY),
            "negexp4xy" | "-exp(4xy)" => Ok(ReactionTerm::NegExp4XY),
            other => Err(Error::Parameter(format!(
                "unknown reaction term '{other}' (expected xplusy, zero, expxy or negexp4xy)"
            ))),
        }
    }
}

pub fn builtin_g(term: ReactionTerm, x: f64, y: f64) -> f64 {
    term.eval(x, y)
}

/// How grid size `n` maps to blocks and mesh points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridLayout {
    /// `n` blocks of `n` points, `h = 1/(n+1)`, point `(i, j)` at `(ih, jh)`.
    #[default]
    Square,
    /// `n-1` blocks of `n` points, `h = 1/n`, point `(i, j)` at `((i+1)h, jh)`.
    /// This is the arrangement behind the published benchmark iteration counts.
    Benchmark,
}

impl GridLayout {
    /// `(blocks, points per block, h)`.
    pub fn shape(self, n: usize) -> (usize, usize, f64) {
        match self {
            GridLayout::Square => (n, n, 1.0 / (n as f64 + 1.0)),
            GridLayout::Benchmark => (n - 1, n, 1.0 / n as f64),
        }
    }

    /// Mesh point of block `i`, point `j` (both 1-based).
    pub fn point(self, i: usize, j: usize, h: f64) -> (f64, f64) {
        match self {
            GridLayout::Square => (i as f64 * h, j as f64 * h),
            GridLayout::Benchmark => ((i + 1) as f64 * h, j as f64 * h),
        }
    }
}

impl fmt::Display for GridLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridLayout::Square => "square",
            GridLayout::Benchmark => "benchmark",
        })
    }
}

impl FromStr for GridLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "square" => Ok(GridLayout::Square),
            "benchmark" | "bench" => Ok(GridLayout::Benchmark),
            other => Err(Error::Parameter(format!(
                "unknown grid layout '{other}' (expected square or benchmark)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PdeProblem {
    pub n: usize,
    pub h: f64,
    pub layout: GridLayout,
    /// Name of the reaction term, or "custom".
    pub label: String,
    pub matrix: SquareMatrix,
    pub rhs: Vec<f64>,
    pub exact: Vec<f64>,
}

/// Square-layout system for a built-in reaction term.
pub fn assemble(n: usize, term: ReactionTerm) -> Result<PdeProblem> {
    assemble_layout(n, term, GridLayout::Square)
}

pub fn assemble_layout(n: usize, term: ReactionTerm, layout: GridLayout) -> Result<PdeProblem> {
    let mut p = assemble_with(n, layout, |x, y| term.eval(x, y))?;
    p.label = term.name().to_string();
    Ok(p)
}

/// Assembles with an arbitrary reaction term `g(x, y)`.
pub fn assemble_with<G: Fn(f64, f64) -> f64>(n: usize, layout: GridLayout, g: G) -> Result<PdeProblem> {
    if n < 2 {
        return Err(Error::Parameter(format!("grid size must be at least 2, got {n}")));
    }
    let (blocks, per_block, h) = layout.shape(n);
    let order = blocks * per_block;
    let idx = |i: usize, j: usize| (i - 1) * per_block + (j - 1);
    let mut triplets = Vec::with_capacity(5 * order);
    for i in 1..=blocks {
        for j in 1..=per_block {
            let row = idx(i, j);
            let (x, y) = layout.point(i, j, h);
            triplets.push((row, row, 4.0 + h * h * g(x, y)));
            if j > 1 {
                triplets.push((row, idx(i, j - 1), -1.0));
            }
            if j < per_block {
                triplets.push((row, idx(i, j + 1), -1.0));
            }
            if i > 1 {
                triplets.push((row, idx(i - 1, j), -1.0));
            }
            if i < blocks {
                triplets.push((row, idx(i + 1, j), -1.0));
            }
        }
    }
    let matrix = SquareMatrix::from_triplets(order, triplets)?.with_symmetry_hint(Some(true));
    let exact = vec![1.0; order];
    let rhs = matrix.mul_vec(&exact)?;
    Ok(PdeProblem {
        n,
        h,
        layout,
        label: "custom".into(),
        matrix,
        rhs,
        exact,
    })
}
