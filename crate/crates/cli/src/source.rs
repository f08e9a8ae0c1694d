use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use gsolve::mtx;
use gsolve::pde::{assemble_layout, GridLayout, ReactionTerm};
use gsolve::SquareMatrix;

#[derive(Debug, Args, Clone)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Matrix Market file (coordinate, real or integer)
    #[arg(long, value_name = "PATH")]
    pub mtx: Option<PathBuf>,

    /// Assemble a finite-difference system, e.g. `g=xplusy n=30 [layout=square]`
    #[arg(long, value_name = "SPEC", num_args = 1..)]
    pub pde: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeSpec {
    pub term: ReactionTerm,
    pub n: usize,
    pub layout: GridLayout,
}

impl PdeSpec {
    pub fn parse(tokens: &[String]) -> Result<Self> {
        let mut term = None;
        let mut n = None;
        let mut layout = GridLayout::Benchmark;
        for tok in tokens.iter().flat_map(|t| t.split([',', ' '])).filter(|t| !t.is_empty()) {
            let (key, value) = tok
                .split_once('=')
                .with_context(|| format!("expected key=value in pde spec, got '{tok}'"))?;
            match key {
                "g" => term = Some(value.parse::<ReactionTerm>()?),
                "n" => n = Some(value.parse::<usize>().with_context(|| format!("bad grid size '{value}'"))?),
                "layout" => layout = value.parse()?,
                other => bail!("unknown pde key '{other}' (expected g, n, layout)"),
            }
        }
        Ok(Self {
            term: term.context("pde spec needs g=<xplusy|zero|expxy|negexp4xy>")?,
            n: n.context("pde spec needs n=<grid size>")?,
            layout,
        })
    }
}

pub struct Loaded {
    pub label: String,
    pub matrix: SquareMatrix,
    /// Right-hand side and exact solution when the source defines them.
    pub system: Option<(Vec<f64>, Vec<f64>)>,
}

impl SourceArgs {
    pub fn load(&self) -> Result<Loaded> {
        if let Some(path) = &self.mtx {
            let matrix = mtx::read_matrix_market_file(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(Loaded {
                label: path.display().to_string(),
                matrix,
                system: None,
            });
        }
        let spec = PdeSpec::parse(self.pde.as_deref().unwrap_or_default())?;
        let p = assemble_layout(spec.n, spec.term, spec.layout)?;
        Ok(Loaded {
            label: format!("pde g={} n={} layout={}", spec.term, spec.n, spec.layout),
            matrix: p.matrix,
            system: Some((p.rhs, p.exact)),
        })
    }
}
