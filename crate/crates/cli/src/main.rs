mod output;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gsolve::classify::{classify, comparison_matrix};
use gsolve::engine::{iterate, predict};
use gsolve::pde::{assemble_layout, GridLayout, ReactionTerm};
use gsolve::spectral::{spectral_radius, PowerOptions, SpectralMode};
use gsolve::step::DEFAULT_DENSE_LIMIT;
use gsolve::{extract_splitting, mtx, IterationConfig, Method};
use rayon::prelude::*;

use output::{Format, RunRecord, TableRecord};
use source::SourceArgs;

#[derive(Debug, Parser)]
#[command(name = "gsolve", version, about = "Banded-splitting Jacobi / Gauss-Seidel / SOR solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a system with one or more methods
    Run(RunArgs),
    /// Reproduce the finite-difference benchmark tables
    Table(TableArgs),
    /// Report matrix classes, optionally with a convergence prediction
    Classify(ClassifyArgs),
    /// Spectral radius of an iteration matrix
    Rho(RhoArgs),
    /// Write derived matrices and vectors
    Export(ExportArgs),
}

/// `sor` is GSOR with `m = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodName {
    Gj,
    Ggs,
    Sor,
    Gsor,
}

impl MethodName {
    fn resolve(self, m: usize) -> (Method, usize) {
        match self {
            MethodName::Gj => (Method::Gj, m),
            MethodName::Ggs => (Method::Ggs, m),
            MethodName::Sor => (Method::Gsor, 0),
            MethodName::Gsor => (Method::Gsor, m),
        }
    }

    fn label(self) -> &'static str {
        match self {
            MethodName::Gj => "GJ",
            MethodName::Ggs => "GGS",
            MethodName::Sor => "SOR",
            MethodName::Gsor => "GSOR",
        }
    }
}

#[derive(Debug, clap::Args)]
struct SolverArgs {
    /// Half-bandwidth of the band part
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Relaxation factor (GSOR / SOR)
    #[arg(long, default_value_t = 1.5)]
    omega: f64,
    /// Stop when ||x_{k+1} - x_k||_2 <= tol
    #[arg(long, default_value_t = gsolve::engine::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = gsolve::engine::DEFAULT_MAX_ITER)]
    max_iter: usize,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Comma-separated list
    #[arg(long, value_enum, value_delimiter = ',', default_value = "gj,ggs,sor,gsor")]
    method: Vec<MethodName>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Right-hand side vector file; defaults to A·1 (exact solution all ones)
    #[arg(long, value_name = "PATH")]
    rhs: Option<PathBuf>,
    /// Exact solution for error reporting
    #[arg(long, value_name = "PATH", requires = "rhs")]
    exact: Option<PathBuf>,
    /// Starting vector; defaults to zero
    #[arg(long, value_name = "PATH")]
    x0: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, clap::Args)]
struct TableArgs {
    /// 1, 2, 3, 4 or all
    #[arg(default_value = "all")]
    which: String,
    #[command(flatten)]
    solver: SolverArgs,
    /// Grid sizes
    #[arg(long, value_delimiter = ',', default_value = "20,30,40")]
    n: Vec<usize>,
    #[arg(long, default_value_t = GridLayout::Benchmark)]
    layout: GridLayout,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
}

#[derive(Debug, clap::Args)]
struct ClassifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Also predict convergence for this method
    #[arg(long, value_enum)]
    predict: Option<MethodName>,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Debug, clap::Args)]
struct RhoArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum)]
    method: MethodName,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Matrix-free power estimate instead of a dense eigensolve
    #[arg(long)]
    power: bool,
    /// Largest order for dense mode (also GSOLVE_DENSE_LIMIT)
    #[arg(long)]
    dense_limit: Option<usize>,
    /// Start-vector seed for power mode
    #[arg(long, default_value_t = PowerOptions::default().seed)]
    seed: u64,
    /// Operator application budget for power mode
    #[arg(long, default_value_t = PowerOptions::default().max_applications)]
    max_applications: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportWhat {
    /// A, and b / x_exact for assembled systems
    System,
    /// Comparison matrix <A>
    Comparison,
    /// Band part T and outer parts E, F for the given m
    Split,
}

#[derive(Debug, clap::Args)]
struct ExportArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value_t = ExportWhat::System)]
    what: ExportWhat,
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

fn dense_limit(flag: Option<usize>) -> Result<usize> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match std::env::var("GSOLVE_DENSE_LIMIT") {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("GSOLVE_DENSE_LIMIT must be an integer, got '{v}'")),
        Err(_) => Ok(DEFAULT_DENSE_LIMIT),
    }
}

fn cmd_run(args: RunArgs) -> Result<bool> {
    let loaded = args.source.load()?;
    let n = loaded.matrix.order();
    let (b, exact) = match (&args.rhs, loaded.system) {
        (Some(path), _) => {
            let b = mtx::read_vector_file(path).with_context(|| format!("reading {}", path.display()))?;
            let exact = match &args.exact {
                Some(p) => Some(mtx::read_vector_file(p).with_context(|| format!("reading {}", p.display()))?),
                None => None,
            };
            (b, exact)
        }
        (None, Some((b, x))) => (b, Some(x)),
        (None, None) => {
            let ones = vec![1.0; n];
            (loaded.matrix.mul_vec(&ones)?, Some(ones))
        }
    };
    let x0 = match &args.x0 {
        Some(p) => Some(mtx::read_vector_file(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };

    let mut all_converged = true;
    let mut records = Vec::new();
    for name in &args.method {
        let (method, m) = name.resolve(args.solver.m);
        let mut cfg = IterationConfig::new(method, m)
            .with_omega(args.solver.omega)
            .with_tol(args.solver.tol)
            .with_max_iter(args.solver.max_iter);
        if let Some(x0) = &x0 {
            cfg = cfg.with_x0(x0.clone());
        }
        let omega = if method == Method::Gsor { Some(args.solver.omega) } else { None };
        let mut record = RunRecord::new(&loaded.label, name.label(), m, omega, n);
        match cfg.build(&loaded.matrix).and_then(|op| iterate(&op, &b, &cfg, exact.as_deref())) {
            Ok(r) => {
                all_converged &= r.converged;
                record.fill(&r);
            }
            Err(e) => {
                all_converged = false;
                log::error!("{} failed: {e}", name.label());
                record.error = Some(e.to_string());
            }
        }
        records.push(record);
    }
    output::write_run(&records, args.format)?;
    Ok(all_converged)
}

fn cmd_table(args: TableArgs) -> Result<bool> {
    let tables: Vec<usize> = match args.which.as_str() {
        "all" => vec![1, 2, 3, 4],
        w => match w.parse::<usize>() {
            Ok(t @ 1..=4) => vec![t],
            _ => bail!("table must be 1, 2, 3, 4 or all (got '{w}')"),
        },
    };
    let columns = [MethodName::Gj, MethodName::Ggs, MethodName::Sor, MethodName::Gsor];
    let mut cells = Vec::new();
    for &t in &tables {
        for &n in &args.n {
            for &c in &columns {
                cells.push((t, n, c));
            }
        }
    }
    let solver = &args.solver;
    let layout = args.layout;
    let records: Vec<Result<TableRecord>> = cells
        .par_iter()
        .map(|&(t, n, name)| {
            let term = ReactionTerm::ALL[t - 1];
            let p = assemble_layout(n, term, layout)?;
            let (method, m) = name.resolve(solver.m);
            let cfg = IterationConfig::new(method, m)
                .with_omega(solver.omega)
                .with_tol(solver.tol)
                .with_max_iter(solver.max_iter);
            let op = cfg.build(&p.matrix)?;
            let r = iterate(&op, &p.rhs, &cfg, Some(&p.exact))?;
            Ok(TableRecord {
                table: t,
                g: term.formula().to_string(),
                n,
                method: name.label().to_string(),
                m,
                omega: solver.omega,
                converged: r.converged,
                iterations: r.iterations,
                error_inf: r.final_error_norm.unwrap_or(f64::NAN),
                seconds: r.elapsed_seconds,
            })
        })
        .collect();
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;
    let all_converged = records.iter().all(|r| r.converged);
    output::write_tables(&records, args.format, solver.m, solver.omega)?;
    Ok(all_converged)
}

fn cmd_classify(args: ClassifyArgs) -> Result<bool> {
    let loaded = args.source.load()?;
    let report = classify(&loaded.matrix);
    let verdict = args.predict.map(|name| {
        let (method, m) = name.resolve(args.m);
        predict(&loaded.matrix, &IterationConfig::new(method, m).with_omega(args.omega))
    });
    if args.json {
        let value = serde_json::json!({
            "source": loaded.label,
            "classification": report,
            "prediction": verdict,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
        return Ok(true);
    }
    println!("source: {}", loaded.label);
    println!("order: {}", loaded.matrix.order());
    for (name, flag) in [
        ("SDD", report.is_sdd),
        ("Z", report.is_z),
        ("L", report.is_l),
        ("M", report.is_m),
        ("H", report.is_h),
        ("SPD", report.is_spd),
    ] {
        println!("{name}: {flag}");
    }
    for note in &report.notes {
        println!("note: {note}");
    }
    if let (Some(v), Some(name)) = (verdict, args.predict) {
        let (_, m) = name.resolve(args.m);
        println!("predict: {} m={m} omega={}", name.label(), args.omega);
        match v.rho_estimate {
            Some(r) => println!("  rho: {}", output::sig6(r)),
            None => println!("  rho: n/a"),
        }
        println!("  guaranteed: {}", v.guaranteed);
        for g in &v.guarantee_source {
            println!("  by: {g}");
        }
        println!("  converges: {}", v.predicted_converges);
        for note in &v.notes {
            println!("  note: {note}");
        }
    }
    Ok(true)
}

fn cmd_rho(args: RhoArgs) -> Result<bool> {
    let loaded = args.source.load()?;
    let limit = dense_limit(args.dense_limit)?;
    let (method, m) = args.method.resolve(args.m);
    let cfg = IterationConfig::new(method, m).with_omega(args.omega).with_dense_limit(limit);
    let op = cfg.build(&loaded.matrix)?;
    let mode = if args.power { SpectralMode::Power } else { SpectralMode::Dense };
    let power = PowerOptions {
        seed: args.seed,
        max_applications: args.max_applications,
        ..PowerOptions::default()
    };
    let est = spectral_radius(op.iteration_operator(), mode, limit, power)?;
    let mode = match est.mode {
        SpectralMode::Dense => "dense",
        SpectralMode::Power => "power",
    };
    println!("{} mode={mode} reliable={}", output::sig6(est.rho), est.reliable);
    Ok(true)
}

fn cmd_export(args: ExportArgs) -> Result<bool> {
    let loaded = args.source.load()?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let write = |name: &str, a: &gsolve::SquareMatrix| -> Result<()> {
        let path = args.out.join(name);
        mtx::write_matrix_market_file(a, &path).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
        Ok(())
    };
    match args.what {
        ExportWhat::System => {
            write("A.mtx", &loaded.matrix)?;
            if let Some((b, x)) = &loaded.system {
                for (name, v) in [("b.txt", b), ("x_exact.txt", x)] {
                    let path = args.out.join(name);
                    mtx::write_vector_file(v, &path).with_context(|| format!("writing {}", path.display()))?;
                    eprintln!("wrote {}", path.display());
                }
            }
        }
        ExportWhat::Comparison => write("comparison.mtx", &comparison_matrix(&loaded.matrix))?,
        ExportWhat::Split => {
            let s = extract_splitting(&loaded.matrix, args.m)?;
            write("T.mtx", s.band())?;
            write("E.mtx", s.lower())?;
            write("F.mtx", s.upper())?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Table(a) => cmd_table(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Rho(a) => cmd_rho(a),
        Command::Export(a) => cmd_export(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
