//! Matrix files: a dimension line, then one row of decimal reals per line.
//!
//! ```text
//! 2
//! 2 0
//! 0 1
//! ```

use nalgebra::{DMatrix, DVector};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct MatrixFormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> MatrixFormatError {
    MatrixFormatError {
        line,
        message: message.into(),
    }
}

fn parse_row(text: &str, line: usize) -> Result<Vec<f64>, MatrixFormatError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(err(line, format!("invalid number {t:?}"))),
        })
        .collect()
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>, MatrixFormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, head) = lines.next().ok_or_else(|| err(1, "empty matrix file"))?;
    let n: usize = head
        .parse()
        .map_err(|_| err(line, format!("expected a dimension, got {head:?}")))?;
    if n == 0 {
        return Err(err(line, "dimension must be positive"));
    }
    let mut entries = Vec::with_capacity(n * n);
    let mut last = line;
    for i in 0..n {
        let (line, l) = lines
            .next()
            .ok_or_else(|| err(last, format!("expected {n} rows, got {i}")))?;
        last = line;
        let row = parse_row(l, line)?;
        if row.len() != n {
            return Err(err(line, format!("row has {} entries, expected {n}", row.len())));
        }
        entries.extend(row);
    }
    if let Some((line, _)) = lines.next() {
        return Err(err(line, "unexpected content after the last row"));
    }
    Ok(DMatrix::from_row_slice(n, n, &entries))
}

/// A vector given on one line, separated by spaces or commas.
pub fn parse_vector(text: &str) -> Result<DVector<f64>, MatrixFormatError> {
    let row = parse_row(text, 1)?;
    if row.is_empty() {
        return Err(err(1, "empty vector"));
    }
    Ok(DVector::from_vec(row))
}

pub fn print_matrix(m: &DMatrix<f64>) -> String {
    let mut out = format!("{}\n", m.nrows());
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(" ")).expect("writing to a String");
    }
    out
}
