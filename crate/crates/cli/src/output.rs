use std::io::{self, Write};

use anyhow::Result;
use clap::ValueEnum;
use gsolve::SolveReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Markdown,
    Jsonl,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunRecord {
    pub source: String,
    pub method: String,
    pub m: usize,
    pub omega: Option<f64>,
    pub order: usize,
    pub converged: bool,
    pub diverged: bool,
    pub iterations: usize,
    pub final_diff_norm: Option<f64>,
    pub error_inf: Option<f64>,
    pub seconds: Option<f64>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn new(source: &str, method: &str, m: usize, omega: Option<f64>, order: usize) -> Self {
        Self {
            source: source.to_string(),
            method: method.to_string(),
            m,
            omega,
            order,
            converged: false,
            diverged: false,
            iterations: 0,
            final_diff_norm: None,
            error_inf: None,
            seconds: None,
            error: None,
        }
    }

    pub fn fill(&mut self, r: &SolveReport) {
        self.converged = r.converged;
        self.diverged = r.diverged;
        self.iterations = r.iterations;
        self.final_diff_norm = Some(r.final_diff_norm);
        self.error_inf = r.final_error_norm;
        self.seconds = Some(r.elapsed_seconds);
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TableRecord {
    pub table: usize,
    pub g: String,
    pub n: usize,
    pub method: String,
    pub m: usize,
    pub omega: f64,
    pub converged: bool,
    pub iterations: usize,
    pub error_inf: f64,
    pub seconds: f64,
}

/// Six significant digits, no exponent for ordinary magnitudes.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..=9).contains(&mag) {
        return format!("{x:.5e}");
    }
    format!("{x:.prec$}", prec = (5 - mag).max(0) as usize)
}

fn opt(x: Option<f64>, fmt: impl Fn(f64) -> String) -> String {
    x.map(fmt).unwrap_or_else(|| "-".into())
}

fn write_csv<T: Serialize>(rows: &[T], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_jsonl<T: Serialize>(rows: &[T], mut out: impl Write) -> Result<()> {
    for r in rows {
        serde_json::to_writer(&mut out, r)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_run(records: &[RunRecord], format: Format) -> Result<()> {
    let out = io::stdout().lock();
    match format {
        Format::Csv => write_csv(records, out),
        Format::Jsonl => write_jsonl(records, out),
        Format::Markdown => {
            let mut out = out;
            writeln!(out, "| method | m | omega | converged | iterations | diff norm | error (inf) | seconds |")?;
            writeln!(out, "|---|---|---|---|---|---|---|---|")?;
            for r in records {
                let status = match (&r.error, r.converged, r.diverged) {
                    (Some(e), _, _) => format!("error: {e}"),
                    (None, true, _) => "yes".into(),
                    (None, false, true) => "diverged".into(),
                    (None, false, false) => "no".into(),
                };
                writeln!(
                    out,
                    "| {} | {} | {} | {status} | {} | {} | {} | {} |",
                    r.method,
                    r.m,
                    opt(r.omega, |w| w.to_string()),
                    r.iterations,
                    opt(r.final_diff_norm, |v| format!("{v:.3e}")),
                    opt(r.error_inf, |v| format!("{v:.3e}")),
                    opt(r.seconds, |v| format!("{v:.3}")),
                )?;
            }
            Ok(())
        }
    }
}

pub fn write_tables(records: &[TableRecord], format: Format, m: usize, omega: f64) -> Result<()> {
    let out = io::stdout().lock();
    match format {
        Format::Csv => write_csv(records, out),
        Format::Jsonl => write_jsonl(records, out),
        Format::Markdown => {
            let mut out = out;
            let mut tables: Vec<usize> = records.iter().map(|r| r.table).collect();
            tables.dedup();
            for (k, t) in tables.iter().enumerate() {
                let rows: Vec<&TableRecord> = records.iter().filter(|r| r.table == *t).collect();
                if k > 0 {
                    writeln!(out)?;
                }
                writeln!(
                    out,
                    "Table {t}: g(x,y) = {}, m = {m}, omega = {omega}; iterations (seconds)",
                    rows[0].g
                )?;
                writeln!(out)?;
                writeln!(out, "| n | GJ | GGS | SOR | GSOR |")?;
                writeln!(out, "|---|---|---|---|---|")?;
                for chunk in rows.chunks(4) {
                    write!(out, "| {} |", chunk[0].n)?;
                    for r in chunk {
                        let mark = if r.converged { "" } else { "*" };
                        write!(out, " {}{mark}({:.2}) |", r.iterations, r.seconds)?;
                    }
                    writeln!(out)?;
                }
            }
            if records.iter().any(|r| !r.converged) {
                writeln!(out, "\n* did not converge")?;
            }
            Ok(())
        }
    }
}
