//! Loading dense CSV and sparse LIBSVM text into a row-major point matrix.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line} has {got} columns, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("file contains no data rows")]
    EmptyFile,
    #[error("drop column {column} is out of range for {columns} columns")]
    BadDropColumn { column: usize, columns: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Libsvm,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "libsvm" | "svmlight" => Ok(Format::Libsvm),
            other => Err(format!("unknown format `{other}` (expected csv or libsvm)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOptions {
    pub format: Format,
    pub skip_header: bool,
    /// Zero-based columns to discard (CSV columns, or LIBSVM feature columns).
    pub drop_columns: Vec<usize>,
    pub delimiter: u8,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            skip_header: false,
            drop_columns: Vec::new(),
            delimiter: b',',
        }
    }
}

/// A loaded `n × d` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub points: Vec<f64>,
    pub n: usize,
    pub d: usize,
    /// Entries not exactly equal to `0.0`.
    pub nnz: usize,
}

impl Matrix {
    fn new(points: Vec<f64>, d: usize) -> Self {
        let n = points.len().checked_div(d).unwrap_or(0);
        let nnz = points.iter().filter(|&&v| v != 0.0).count();
        Self { points, n, d, nnz }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }
}

pub fn load(path: impl AsRef<Path>, opts: &IngestOptions) -> Result<Matrix, IngestError> {
    let file = BufReader::new(File::open(path)?);
    read(file, opts)
}

pub fn read<R: Read>(reader: R, opts: &IngestOptions) -> Result<Matrix, IngestError> {
    match opts.format {
        Format::Csv => read_csv(reader, opts),
        Format::Libsvm => read_libsvm(BufReader::new(reader), opts),
    }
}

fn keep_mask(columns: usize, drop: &[usize]) -> Result<Vec<bool>, IngestError> {
    let mut keep = vec![true; columns];
    for &c in drop {
        if c >= columns {
            return Err(IngestError::BadDropColumn { column: c, columns });
        }
        keep[c] = false;
    }
    Ok(keep)
}

fn read_csv<R: Read>(reader: R, opts: &IngestOptions) -> Result<Matrix, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(opts.skip_header)
        .delimiter(opts.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut points = Vec::new();
    let mut columns: Option<(usize, Vec<bool>)> = None;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            IngestError::Parse {
                line,
                column: 0,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let (width, keep) = match &columns {
            Some(c) => c,
            None => columns.insert((record.len(), keep_mask(record.len(), &opts.drop_columns)?)),
        };
        if record.len() != *width {
            return Err(IngestError::RaggedRows {
                line,
                expected: *width,
                got: record.len(),
            });
        }
        for (col, field) in record.iter().enumerate() {
            if !keep[col] {
                continue;
            }
            let v: f64 = field.parse().map_err(|_| IngestError::Parse {
                line,
                column: col + 1,
                message: format!("`{field}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(IngestError::Parse {
                    line,
                    column: col + 1,
                    message: format!("`{field}` is not finite"),
                });
            }
            points.push(v);
        }
    }
    let Some((_, keep)) = columns else {
        return Err(IngestError::EmptyFile);
    };
    let d = keep.iter().filter(|&&k| k).count();
    if d == 0 || points.is_empty() {
        return Err(IngestError::EmptyFile);
    }
    Ok(Matrix::new(points, d))
}

fn read_libsvm<R: BufRead>(reader: R, opts: &IngestOptions) -> Result<Matrix, IngestError> {
    // (row, feature, value) triplets; the dimension is the largest index seen.
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut width = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if opts.skip_header && idx == 0 {
            continue;
        }
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (tok_idx, token) in body.split_whitespace().enumerate() {
            let column = tok_idx + 1;
            let Some((index, value)) = token.split_once(':') else {
                if tok_idx == 0 {
                    continue; // label
                }
                return Err(IngestError::Parse {
                    line: line_no,
                    column,
                    message: format!("`{token}` is not an index:value pair"),
                });
            };
            let index: usize = index.parse().map_err(|_| IngestError::Parse {
                line: line_no,
                column,
                message: format!("`{index}` is not a feature index"),
            })?;
            if index == 0 {
                return Err(IngestError::Parse {
                    line: line_no,
                    column,
                    message: "feature indices start at 1".into(),
                });
            }
            let value: f64 = value
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| IngestError::Parse {
                    line: line_no,
                    column,
                    message: format!("`{value}` is not a finite number"),
                })?;
            width = width.max(index);
            row.push((index - 1, value));
        }
        rows.push(row);
    }
    if rows.is_empty() || width == 0 {
        return Err(IngestError::EmptyFile);
    }
    let keep = keep_mask(width, &opts.drop_columns)?;
    // Old column -> new column.
    let mut remap = vec![None; width];
    let mut d = 0;
    for (c, &k) in keep.iter().enumerate() {
        if k {
            remap[c] = Some(d);
            d += 1;
        }
    }
    if d == 0 {
        return Err(IngestError::EmptyFile);
    }
    let mut points = vec![0.0; rows.len() * d];
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            if let Some(nc) = remap[c] {
                points[r * d + nc] = v;
            }
        }
    }
    Ok(Matrix::new(points, d))
}

/// Writes `points` as headerless CSV using shortest round-trip float formatting.
pub fn to_csv(points: &[f64], d: usize) -> String {
    let mut out = String::new();
    for row in points.chunks_exact(d) {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Writes `points` as LIBSVM with label `0`, omitting zero entries.
pub fn to_libsvm(points: &[f64], d: usize) -> String {
    let mut out = String::new();
    for row in points.chunks_exact(d) {
        out.push('0');
        for (j, v) in row.iter().enumerate() {
            if *v != 0.0 {
                write!(out, " {}:{v}", j + 1).unwrap();
            }
        }
        out.push('\n');
    }
    out
}
