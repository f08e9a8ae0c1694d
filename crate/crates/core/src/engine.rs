//! Iterative solve loop and theorem-based convergence prediction.

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::classify::{classify, ClassificationReport, Membership};
use crate::error::{Error, Result};
use crate::matrix::{norm_inf, SquareMatrix};
use crate::spectral::{dense_spectral_radius, spectral_radius, PowerOptions, SpectralMode};
use crate::splitting::extract_splitting;
use crate::step::{build_step, Method, SplitOperator, StepOperator, DEFAULT_DENSE_LIMIT};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// A step difference this many times larger than the first one stops the loop.
pub const DIVERGENCE_FACTOR: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct IterationConfig {
    pub method: Method,
    /// Half-bandwidth of the band part.
    pub m: usize,
    /// Relaxation factor, GSOR only.
    pub omega: f64,
    /// Bound on `||x_{k+1} - x_k||_2`.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting vector; `None` means zero.
    pub x0: Option<Vec<f64>>,
    /// Largest order for which iteration matrices are formed explicitly.
    pub dense_limit: usize,
}

impl IterationConfig {
    pub fn new(method: Method, m: usize) -> Self {
        Self {
            method,
            m,
            omega: 1.0,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            x0: None,
            dense_limit: DEFAULT_DENSE_LIMIT,
        }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_x0(mut self, x0: Vec<f64>) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn with_dense_limit(mut self, dense_limit: usize) -> Self {
        self.dense_limit = dense_limit;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Parameter(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Builds the step operator this configuration describes.
    pub fn build(&self, a: &SquareMatrix) -> Result<StepOperator> {
        self.validate()?;
        build_step(extract_splitting(a, self.m)?, self.method, self.omega)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub diverged: bool,
    /// Number of steps taken when the stopping test first passed.
    pub iterations: usize,
    pub final_diff_norm: f64,
    /// `||x - x_exact||_inf` when an exact solution was supplied.
    pub final_error_norm: Option<f64>,
    /// Wall time of the iteration loop only.
    pub elapsed_seconds: f64,
    /// "diverged" when the growth guard stopped the loop.
    pub note: Option<String>,
    #[serde(skip)]
    pub solution: Vec<f64>,
}

pub fn solve(a: &SquareMatrix, b: &[f64], config: &IterationConfig) -> Result<SolveReport> {
    let op = config.build(a)?;
    iterate(&op, b, config, None)
}

/// Runs a prepared operator from `config.x0` (zero by default).
///
/// Iteration `k` is the `k`-th application of the step; the loop stops at the
/// first `k` with `||x_k - x_{k-1}||_2 <= tol`, after `max_iter` steps, or when
/// the difference grows past [`DIVERGENCE_FACTOR`] times the first one.
pub fn iterate(
    op: &StepOperator,
    b: &[f64],
    config: &IterationConfig,
    exact: Option<&[f64]>,
) -> Result<SolveReport> {
    config.validate()?;
    let n = op.order();
    let mut x = match &config.x0 {
        Some(x0) if x0.len() != n => {
            return Err(Error::Dimension {
                expected: n,
                got: x0.len(),
            })
        }
        Some(x0) => x0.clone(),
        None => vec![0.0; n],
    };
    if let Some(e) = exact {
        if e.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: e.len(),
            });
        }
    }
    let mut next = vec![0.0; n];
    let mut first_diff = None;
    let mut diff = f64::INFINITY;
    let mut converged = false;
    let mut diverged = false;
    let mut iterations = 0;

    let start = Instant::now();
    while iterations < config.max_iter {
        op.apply_step_into(&x, b, &mut next)?;
        iterations += 1;
        diff = x
            .iter()
            .zip(&next)
            .map(|(p, q)| (q - p) * (q - p))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut x, &mut next);
        let first = *first_diff.get_or_insert(diff);
        if diff <= config.tol {
            converged = true;
            break;
        }
        if !diff.is_finite() || diff > DIVERGENCE_FACTOR * first {
            diverged = true;
            break;
        }
    }
    let elapsed_seconds = start.elapsed().as_secs_f64();

    let final_error_norm = exact.map(|e| {
        let err: Vec<f64> = x.iter().zip(e).map(|(p, q)| p - q).collect();
        norm_inf(&err)
    });
    Ok(SolveReport {
        converged,
        diverged,
        iterations,
        final_diff_norm: diff,
        final_error_norm,
        elapsed_seconds,
        note: diverged.then(|| "diverged".to_string()),
        solution: x,
    })
}

/// Convergence theorems that can certify a (class, method, relaxation) triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Guarantee {
    #[serde(rename = "SDD+GJ/GGS")]
    SddSplitting,
    #[serde(rename = "M+GJ/GGS")]
    MSplitting,
    #[serde(rename = "H+GJ/GGS")]
    HSplitting,
    #[serde(rename = "SDD+GSOR")]
    SddGsor,
    #[serde(rename = "M+GSOR")]
    MGsor,
    #[serde(rename = "H+GSOR")]
    HGsor,
    #[serde(rename = "M+GSOR overrelaxed")]
    MGsorOverrelaxed,
}

impl fmt::Display for Guarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Guarantee::SddSplitting => "SDD+GJ/GGS",
            Guarantee::MSplitting => "M+GJ/GGS",
            Guarantee::HSplitting => "H+GJ/GGS",
            Guarantee::SddGsor => "SDD+GSOR, w in (0,1]",
            Guarantee::MGsor => "M+GSOR, w in (0,1]",
            Guarantee::HGsor => "H+GSOR, w in (0,1]",
            Guarantee::MGsorOverrelaxed => "M+GSOR overrelaxed",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceVerdict {
    pub rho_estimate: Option<f64>,
    pub guaranteed: bool,
    pub guarantee_source: Vec<Guarantee>,
    pub predicted_converges: Membership,
    pub classification: ClassificationReport,
    pub notes: Vec<String>,
}

/// Matches the matrix classes of `a` against the convergence theorems for
/// `config` and, when the order allows, checks the spectral radius directly.
pub fn predict(a: &SquareMatrix, config: &IterationConfig) -> ConvergenceVerdict {
    let classification = classify(a);
    let mut notes = Vec::new();
    let mut sources = Vec::new();
    let (sdd, m, h) = (
        classification.is_sdd.is_yes(),
        classification.is_m.is_yes(),
        classification.is_h.is_yes(),
    );
    let omega = config.omega;
    let under = omega > 0.0 && omega <= 1.0;
    let order = a.order();

    let splitting = match extract_splitting(a, config.m) {
        Ok(s) => Some(s),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };

    match config.method {
        Method::Gj | Method::Ggs => {
            if sdd {
                sources.push(Guarantee::SddSplitting);
            }
            if m {
                sources.push(Guarantee::MSplitting);
            }
            if h {
                sources.push(Guarantee::HSplitting);
            }
        }
        Method::Gsor if under => {
            if sdd {
                sources.push(Guarantee::SddGsor);
            }
            if m {
                sources.push(Guarantee::MGsor);
            }
            if h {
                sources.push(Guarantee::HGsor);
            }
        }
        Method::Gsor => {
            if m && omega > 1.0 {
                if let Some(s) = &splitting {
                    match overrelaxation_condition(s, omega, config.dense_limit) {
                        Ok((true, _)) => sources.push(Guarantee::MGsorOverrelaxed),
                        Ok((false, why)) => notes.push(why),
                        Err(e) => notes.push(format!("overrelaxation check failed: {e}")),
                    }
                }
            } else {
                notes.push(format!("no convergence theorem covers GSOR with w = {omega} here"));
            }
        }
    }

    let rho_estimate = match &splitting {
        Some(s) if order <= config.dense_limit => {
            match build_step(s.clone(), config.method, omega)
                .and_then(|op| op.iteration_matrix(config.dense_limit))
                .and_then(|hm| dense_spectral_radius(&hm))
            {
                Ok(r) => Some(r),
                Err(e) => {
                    notes.push(format!("spectral radius unavailable: {e}"));
                    None
                }
            }
        }
        Some(_) => {
            notes.push(format!(
                "order {order} above dense limit {}; spectral radius not computed",
                config.dense_limit
            ));
            None
        }
        None => None,
    };

    let guaranteed = !sources.is_empty();
    let predicted_converges = match rho_estimate {
        Some(r) => (r < 1.0).into(),
        None if guaranteed => Membership::Yes,
        None => Membership::Undetermined,
    };
    if guaranteed && predicted_converges == Membership::No {
        notes.push("theorem guarantee contradicts the computed spectral radius".into());
    }
    ConvergenceVerdict {
        rho_estimate,
        guaranteed,
        guarantee_source: sources,
        predicted_converges,
        classification,
        notes,
    }
}

/// For an M-matrix and `w > 1`: `w < 2 / (1 + rho(H_GJ))` and `rho(T^{-1} E) < 1 / w`.
fn overrelaxation_condition(
    s: &crate::splitting::BandedSplitting,
    omega: f64,
    dense_limit: usize,
) -> Result<(bool, String)> {
    let mode = if s.order() <= dense_limit {
        SpectralMode::Dense
    } else {
        SpectralMode::Power
    };
    let gj = SplitOperator::new(
        s.band(),
        SquareMatrix::linear_combination(&[(1.0, s.lower()), (1.0, s.upper())])?,
    )?;
    let rho_gj = spectral_radius(&gj, mode, dense_limit, PowerOptions::default())?.rho;
    let lower = SplitOperator::new(s.band(), s.lower().clone())?;
    let rho_lower = spectral_radius(&lower, mode, dense_limit, PowerOptions::default())?.rho;
    let bound = 2.0 / (1.0 + rho_gj);
    let ok = omega < bound && rho_lower * omega < 1.0;
    Ok((
        ok,
        format!(
            "overrelaxation bound: w < {bound:.6} and rho(T^-1 E) = {rho_lower:.6} < 1/w = {:.6}",
            1.0 / omega
        ),
    ))
}
