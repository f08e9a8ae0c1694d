//! Matrix Market coordinate files and plain vector files.
//!
//! Reading accepts `real` or `integer` fields with `general`, `symmetric` or
//! `skew-symmetric` storage. Duplicate entries are summed. Writing always
//! emits `coordinate real general` with shortest round-trip decimals.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Storage {
    General,
    Symmetric,
    SkewSymmetric,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<SquareMatrix> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "expected a %%MatrixMarket matrix header"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported format '{}'", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field '{}'", tokens[3])));
    }
    let storage = match tokens[4].as_str() {
        "general" => Storage::General,
        "symmetric" => Storage::Symmetric,
        "skew-symmetric" => Storage::SkewSymmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut stored = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "expected 'rows cols entries'"));
                }
                let dims: Vec<usize> = fields
                    .iter()
                    .map(|f| f.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| parse_err(lineno, e.to_string()))?;
                if dims[0] != dims[1] {
                    return Err(parse_err(
                        lineno,
                        format!("matrix is {}x{}, not square", dims[0], dims[1]),
                    ));
                }
                if dims[0] == 0 {
                    return Err(parse_err(lineno, "matrix order must be positive"));
                }
                size = Some((dims[0], dims[2]));
                triplets.reserve(dims[2]);
            }
            Some((n, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "expected 'row col value'"));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad row index"))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad column index"))?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad value"))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(lineno, format!("index ({i}, {j}) out of range")));
                }
                let (i, j) = (i - 1, j - 1);
                stored += 1;
                triplets.push((i, j, v));
                if i != j {
                    match storage {
                        Storage::General => {}
                        Storage::Symmetric => triplets.push((j, i, v)),
                        Storage::SkewSymmetric => triplets.push((j, i, -v)),
                    }
                }
            }
        }
    }

    let (n, declared) = size.ok_or_else(|| parse_err(0, "missing size line"))?;
    if stored != declared {
        return Err(parse_err(
            0,
            format!("header declares {declared} entries, found {stored}"),
        ));
    }
    let hint = match storage {
        Storage::Symmetric => Some(true),
        _ => None,
    };
    Ok(SquareMatrix::from_triplets(n, triplets)?.with_symmetry_hint(hint))
}

pub fn read_matrix_market_file(path: impl AsRef<Path>) -> Result<SquareMatrix> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

pub fn write_matrix_market<W: Write>(a: &SquareMatrix, mut out: W) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.order(), a.order(), a.nnz())?;
    for (i, j, v) in a.iter() {
        writeln!(out, "{} {} {:?}", i + 1, j + 1, v)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_matrix_market_file(a: &SquareMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_matrix_market(a, BufWriter::new(File::create(path)?))
}

/// Reads whitespace-delimited reals; `%` and `#` start comment lines.
pub fn read_vector<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            out.push(
                tok.parse()
                    .map_err(|_| parse_err(idx + 1, format!("bad number '{tok}'")))?,
            );
        }
    }
    Ok(out)
}

pub fn read_vector_file(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    read_vector(BufReader::new(File::open(path)?))
}

/// One value per line.
pub fn write_vector<W: Write>(x: &[f64], mut out: W) -> Result<()> {
    for v in x {
        writeln!(out, "{v:?}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_vector_file(x: &[f64], path: impl AsRef<Path>) -> Result<()> {
    write_vector(x, BufWriter::new(File::create(path)?))
}
