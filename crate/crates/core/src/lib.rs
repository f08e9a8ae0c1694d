//! Generalized Jacobi, Gauss-Seidel and SOR iterations built on banded
//! splittings `A = T - E - F`, with matrix-class certification, spectral
//! radius estimation and a finite-difference benchmark generator.

pub mod band;
pub mod classify;
pub mod engine;
pub mod error;
pub mod matrix;
pub mod mtx;
pub mod pde;
pub mod spectral;
pub mod splitting;
pub mod step;

pub use classify::{classify, ClassificationReport, Membership};
pub use engine::{iterate, predict, solve, ConvergenceVerdict, Guarantee, IterationConfig, SolveReport};
pub use error::{Error, Result};
pub use matrix::SquareMatrix;
pub use pde::{assemble, assemble_layout, GridLayout, PdeProblem, ReactionTerm};
pub use spectral::{spectral_radius, PowerOptions, SpectralEstimate, SpectralMode};
pub use splitting::{extract_splitting, BandedSplitting};
pub use step::{build_step, LinearOperator, Method, StepOperator};
