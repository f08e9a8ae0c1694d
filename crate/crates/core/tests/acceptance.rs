//! One PASS/FAIL line per acceptance check. Run with `--nocapture` to see them.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use common::*;
use gsolve::classify::classify;
use gsolve::engine::{iterate, predict};
use gsolve::pde::{assemble_layout, GridLayout, ReactionTerm};
use gsolve::spectral::dense_spectral_radius;
use gsolve::step::DEFAULT_DENSE_LIMIT;
use gsolve::{build_step, extract_splitting, IterationConfig, Membership, Method, SquareMatrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const RHO_TOL: f64 = 5e-5;
const RHO_BUDGET_SECONDS: f64 = 1.0;
const TABLE_SLACK: usize = 1;
const TABLE_BUDGET_SECONDS: f64 = 120.0;
const SUITE_SIZE: usize = 100;
const SUITE_SEED: u64 = 20_240_601;
const SUITE_MARGIN: f64 = 1e-10;
const SUITE_BUDGET_SECONDS: f64 = 30.0;
const EQUIV_TOL: f64 = 1e-14;
const EQUIV_INSTANCES: usize = 50;
const IFF_GAP: f64 = 1e-6;
const IFF_ERROR_TOL: f64 = 1e-5;
const IFF_STOP_TOL: f64 = 1e-7;

fn rho(a: &SquareMatrix, method: Method, m: usize, omega: f64) -> f64 {
    let op = build_step(extract_splitting(a, m).unwrap(), method, omega).unwrap();
    dense_spectral_radius(&op.iteration_matrix(DEFAULT_DENSE_LIMIT).unwrap()).unwrap()
}

#[test]
fn c1_spectral_radius_regression() {
    let start = Instant::now();
    let cases = [
        ("spd3.mtx", Method::Gj, 1, 1.0, 1.5883),
        ("spd3.mtx", Method::Ggs, 1, 1.0, 30.1584),
        ("lmat3.mtx", Method::Gj, 1, 1.0, 2.8689),
        ("lmat3.mtx", Method::Ggs, 1, 1.0, 3.0952),
        ("spd4.mtx", Method::Gsor, 2, 1.8, 1.1511),
        ("spd3.mtx", Method::Gsor, 1, 0.6, 1.7649),
        ("lmat3.mtx", Method::Gsor, 1, 0.9, 2.6705),
        ("lmat3.mtx", Method::Gsor, 1, 0.4, 0.6000),
    ];
    let mut ok = true;
    for (file, method, m, omega, expected) in cases {
        let got = rho(&fixture(file), method, m, omega);
        let d = (got - expected).abs();
        ok &= report(
            "c1",
            d <= RHO_TOL,
            format!("{file} {method} m={m} w={omega}: rho={got:.6} expected={expected:.4} |d|={d:.2e}"),
        );
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= report("c1", secs < RHO_BUDGET_SECONDS, format!("runtime {secs:.3}s"));
    assert!(ok);
}

const TABLES: [(ReactionTerm, [[usize; 4]; 3]); 4] = [
    (ReactionTerm::XPlusY, [[619, 322, 211, 105], [1336, 695, 466, 240], [2312, 1204, 815, 422]]),
    (ReactionTerm::Zero, [[652, 339, 222, 112], [1405, 731, 491, 253], [2429, 1264, 856, 444]]),
    (ReactionTerm::ExpXY, [[611, 318, 208, 104], [1319, 687, 460, 237], [2282, 1188, 804, 417]]),
    (ReactionTerm::NegExp4XY, [[824, 427, 282, 143], [1736, 899, 606, 313], [2972, 1540, 1045, 543]]),
];
const GRID: [usize; 3] = [20, 30, 40];
/// Columns GJ, GGS, SOR, GSOR: (method, m).
const COLUMNS: [(Method, usize, &str); 4] =
    [(Method::Gj, 1, "GJ"), (Method::Ggs, 1, "GGS"), (Method::Gsor, 0, "SOR"), (Method::Gsor, 1, "GSOR")];

/// Iteration counts indexed `[table][grid][column]`, plus the wall time.
fn table_counts() -> &'static (Vec<[[usize; 4]; 3]>, f64) {
    static COUNTS: OnceLock<(Vec<[[usize; 4]; 3]>, f64)> = OnceLock::new();
    COUNTS.get_or_init(|| {
        let start = Instant::now();
        let cells: Vec<(usize, usize, usize)> = (0..4)
            .flat_map(|t| (0..3).flat_map(move |g| (0..4).map(move |c| (t, g, c))))
            .collect();
        let results: Vec<usize> = cells
            .par_iter()
            .map(|&(t, g, c)| {
                let p = assemble_layout(GRID[g], TABLES[t].0, GridLayout::Benchmark).unwrap();
                let (method, m, _) = COLUMNS[c];
                let cfg = IterationConfig::new(method, m).with_omega(1.5);
                let op = cfg.build(&p.matrix).unwrap();
                let r = iterate(&op, &p.rhs, &cfg, None).unwrap();
                assert!(r.converged);
                r.iterations
            })
            .collect();
        let mut out = vec![[[0; 4]; 3]; 4];
        for (&(t, g, c), &k) in cells.iter().zip(&results) {
            out[t][g][c] = k;
        }
        (out, start.elapsed().as_secs_f64())
    })
}

#[test]
fn c2_table_reproduction() {
    let (counts, secs) = table_counts();
    let mut ok = true;
    for (t, (term, expected)) in TABLES.iter().enumerate() {
        for (g, n) in GRID.iter().enumerate() {
            for (c, (_, _, name)) in COLUMNS.iter().enumerate() {
                let (got, want) = (counts[t][g][c], expected[g][c]);
                ok &= report(
                    "c2",
                    got.abs_diff(want) <= TABLE_SLACK,
                    format!("table {} g={} n={n} {name}: {got} (expected {want})", t + 1, term.formula()),
                );
            }
        }
    }
    ok &= report("c2", *secs < TABLE_BUDGET_SECONDS, format!("48 cells in {secs:.2}s"));
    assert!(ok);
}

#[test]
fn c3_method_ordering() {
    let (counts, _) = table_counts();
    let mut ok = true;
    for (t, (term, _)) in TABLES.iter().enumerate() {
        for (g, n) in GRID.iter().enumerate() {
            let [gj, ggs, sor, gsor] = counts[t][g];
            ok &= report(
                "c3",
                gsor < sor && sor < ggs && ggs < gj,
                format!("g={} n={n}: GSOR {gsor} < SOR {sor} < GGS {ggs} < GJ {gj}", term.formula()),
            );
        }
    }
    assert!(ok);
}

struct SuiteTally {
    checks: usize,
    violations: Vec<String>,
}

impl SuiteTally {
    fn check(&mut self, what: String, rho: f64) {
        self.checks += 1;
        if rho > 1.0 - SUITE_MARGIN {
            self.violations.push(format!("{what}: rho={rho}"));
        }
    }
}

fn run_suite<F>(label: &str, mut generate: F, overrelaxed: bool) -> bool
where
    F: FnMut(&mut ChaCha8Rng, usize) -> DMatrix<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ label.len() as u64);
    let mut tally = SuiteTally {
        checks: 0,
        violations: Vec::new(),
    };
    let mut over_cases = 0;
    let mut unguaranteed = 0;
    for k in 0..SUITE_SIZE {
        let n = rng.random_range(5..=30);
        let dense = generate(&mut rng, n);
        let a = sparse(&dense);
        let m = rng.random_range(0..=(n / 2));
        let omega = rng.random_range(0.05..=1.0);
        for (method, w) in [(Method::Gj, 1.0), (Method::Ggs, 1.0), (Method::Gsor, omega)] {
            tally.check(format!("{label}#{k} n={n} m={m} {method} w={w:.3}"), rho(&a, method, m, w));
            let cfg = IterationConfig::new(method, m).with_omega(w);
            if !predict(&a, &cfg).guaranteed {
                unguaranteed += 1;
            }
        }
        if overrelaxed {
            let s = extract_splitting(&a, m).unwrap();
            let rho_gj = rho(&a, Method::Gj, m, 1.0);
            let w = 1.0 + rng.random_range(0.0..1.0) * (2.0 / (1.0 + rho_gj) - 1.0);
            let lower = gsolve::step::SplitOperator::new(s.band(), s.lower().clone()).unwrap();
            let rho_te = dense_spectral_radius(&lower.to_dense(DEFAULT_DENSE_LIMIT).unwrap()).unwrap();
            if w > 1.0 && w < 2.0 / (1.0 + rho_gj) && rho_te < 1.0 / w {
                over_cases += 1;
                tally.check(format!("{label}#{k} n={n} m={m} GSOR w={w:.4} (overrelaxed)"), rho(&a, Method::Gsor, m, w));
            }
        }
    }
    let mut ok = true;
    for v in &tally.violations {
        ok &= report("c4", false, v);
    }
    let extra = if overrelaxed {
        format!(", {over_cases} overrelaxed instances")
    } else {
        String::new()
    };
    ok &= report(
        "c4",
        tally.violations.is_empty(),
        format!("{label}: {} bounds checked, {} violations{extra}", tally.checks, tally.violations.len()),
    );
    ok &= report(
        "c4",
        unguaranteed == 0,
        format!("{label}: {unguaranteed} instances where the class certificate gave no guarantee"),
    );
    ok
}

#[test]
fn c4_theorem_suites() {
    let start = Instant::now();
    let mut ok = run_suite("SDD", random_sdd, false);
    ok &= run_suite("M", random_m, true);
    ok &= run_suite("H", random_h, false);
    let secs = start.elapsed().as_secs_f64();
    ok &= report("c4", secs < SUITE_BUDGET_SECONDS, format!("runtime {secs:.2}s"));
    assert!(ok);
}

/// Classical Jacobi, Gauss-Seidel and SOR matrices from `D - L - U`.
fn classical(a: &DMatrix<f64>, omega: f64) -> [DMatrix<f64>; 3] {
    let n = a.nrows();
    let d = DMatrix::from_diagonal(&a.diagonal());
    let l = DMatrix::from_fn(n, n, |i, j| if i > j { -a[(i, j)] } else { 0.0 });
    let u = DMatrix::from_fn(n, n, |i, j| if j > i { -a[(i, j)] } else { 0.0 });
    let jacobi = DMatrix::from_fn(n, n, |i, j| (l[(i, j)] + u[(i, j)]) / d[(i, i)]);
    let gs = (&d - &l).solve_lower_triangular(&u).unwrap();
    let sor = (&d - &l * omega)
        .solve_lower_triangular(&(&d * (1.0 - omega) + &u * omega))
        .unwrap();
    [jacobi, gs, sor]
}

#[test]
fn c5_equivalence_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED + 5);
    let mut worst = [0.0f64; 4];
    let mut exact = true;
    for _ in 0..EQUIV_INSTANCES {
        let n = rng.random_range(2..=30);
        let dense = random_general(&mut rng, n);
        let a = sparse(&dense);
        let omega = rng.random_range(0.1..1.9);
        let expected = classical(&dense, omega);
        for (k, (method, w)) in [(Method::Gj, 1.0), (Method::Ggs, 1.0), (Method::Gsor, omega)].into_iter().enumerate() {
            let op = build_step(extract_splitting(&a, 0).unwrap(), method, w).unwrap();
            let h = op.iteration_matrix(DEFAULT_DENSE_LIMIT).unwrap();
            worst[k] = worst[k].max(max_abs_diff(&h, &expected[k]));
        }
        let m = rng.random_range(0..n);
        let s = extract_splitting(&a, m).unwrap();
        let ggs = build_step(s.clone(), Method::Ggs, 1.0).unwrap().iteration_matrix(DEFAULT_DENSE_LIMIT).unwrap();
        let gsor = build_step(s.clone(), Method::Gsor, 1.0).unwrap().iteration_matrix(DEFAULT_DENSE_LIMIT).unwrap();
        worst[3] = worst[3].max(max_abs_diff(&ggs, &gsor));
        for mm in 0..n {
            exact &= extract_splitting(&a, mm).unwrap().reconstruct() == a;
        }
    }
    let mut ok = true;
    for (k, name) in ["m=0 GJ vs Jacobi", "m=0 GGS vs Gauss-Seidel", "m=0 GSOR vs SOR", "GSOR(w=1) vs GGS"].iter().enumerate() {
        ok &= report("c5", worst[k] <= EQUIV_TOL, format!("{name}: max |diff| = {:.2e}", worst[k]));
    }
    ok &= report("c5", exact, "T - E - F == A exactly for every m on every instance");
    assert!(ok);
}

#[test]
fn c6_convergence_iff_rho_below_one() {
    let pde = |term| assemble_layout(6, term, GridLayout::Benchmark).unwrap().matrix;
    let fixtures: Vec<(String, SquareMatrix)> = vec![
        ("spd3".into(), fixture("spd3.mtx")),
        ("lmat3".into(), fixture("lmat3.mtx")),
        ("spd4".into(), fixture("spd4.mtx")),
        ("identity3".into(), fixture("identity3.mtx")),
        ("m4".into(), fixture("m4.mtx")),
        ("pde6 x+y".into(), pde(ReactionTerm::XPlusY)),
        ("pde6 -exp(4xy)".into(), pde(ReactionTerm::NegExp4XY)),
    ];
    let mut ok = true;
    let mut decided = 0;
    for (name, a) in &fixtures {
        let n = a.order();
        let dense = a.to_dense();
        let x_true: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) / (n as f64)).collect();
        let b = a.mul_vec(&x_true).unwrap();
        let direct = dense.clone().lu().solve(&DVector::from_vec(b.clone())).unwrap();
        for m in 0..n.min(3) {
            for (method, w) in [
                (Method::Gj, 1.0),
                (Method::Ggs, 1.0),
                (Method::Gsor, 0.4),
                (Method::Gsor, 0.6),
                (Method::Gsor, 0.9),
                (Method::Gsor, 1.5),
                (Method::Gsor, 1.8),
            ] {
                let cfg = IterationConfig::new(method, m).with_omega(w);
                let Ok(op) = cfg.build(a) else { continue };
                let r = dense_spectral_radius(&op.iteration_matrix(DEFAULT_DENSE_LIMIT).unwrap()).unwrap();
                // error <~ rho/(1-rho) * step difference, so tighten the stop test near rho = 1
                let cfg = if r < 1.0 {
                    cfg.with_tol(IFF_STOP_TOL.min(0.5 * IFF_ERROR_TOL * (1.0 - r) / r.max(f64::MIN_POSITIVE)))
                } else {
                    cfg
                };
                let run = iterate(&op, &b, &cfg, Some(direct.as_slice())).unwrap();
                let err = run.final_error_norm.unwrap();
                let label = format!("{name} {method} m={m} w={w}: rho={r:.6}");
                if r < 1.0 - IFF_GAP {
                    decided += 1;
                    ok &= report(
                        "c6",
                        run.converged && err <= IFF_ERROR_TOL,
                        format!("{label} converged={} in {} err={err:.2e}", run.converged, run.iterations),
                    );
                } else if r > 1.0 + IFF_GAP {
                    decided += 1;
                    let stopped = run.diverged || (!run.converged && run.iterations == cfg.max_iter);
                    ok &= report(
                        "c6",
                        stopped && !run.converged,
                        format!("{label} diverged={} after {}", run.diverged, run.iterations),
                    );
                }
            }
        }
    }
    ok &= report("c6", decided > 50, format!("{decided} (fixture, method) pairs decided"));
    assert!(ok);
}

#[test]
fn c7_classifier_on_fixtures() {
    let mut ok = true;
    let r = classify(&fixture("spd3.mtx"));
    for (flag, got, want) in [
        ("SPD", r.is_spd, Membership::Yes),
        ("L", r.is_l, Membership::No),
        ("M", r.is_m, Membership::No),
        ("H", r.is_h, Membership::No),
    ] {
        ok &= report("c7", got == want, format!("spd3 {flag}: {got} (expected {want})"));
    }
    let r = classify(&fixture("lmat3.mtx"));
    for (flag, got, want) in [
        ("L", r.is_l, Membership::Yes),
        ("M", r.is_m, Membership::No),
        ("H", r.is_h, Membership::No),
        ("SDD", r.is_sdd, Membership::No),
    ] {
        ok &= report("c7", got == want, format!("lmat3 {flag}: {got} (expected {want})"));
    }
    for term in [ReactionTerm::XPlusY, ReactionTerm::Zero, ReactionTerm::ExpXY] {
        let p = assemble_layout(20, term, GridLayout::Benchmark).unwrap();
        let r = classify(&p.matrix);
        for (flag, got) in [("SDD", r.is_sdd), ("M", r.is_m)] {
            ok &= report(
                "c7",
                got == Membership::Yes,
                format!("pde n=20 g={} {flag}: {got} (expected true)", term.formula()),
            );
        }
    }
    assert!(ok);
}
