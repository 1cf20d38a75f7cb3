//! Text format for finite self-maps.
//!
//! ```text
//! points 3
//! a 0 0 0
//! b 1/2 0 0
//! s 1 0 0
//! map: 1 2 2
//! fixed: 2
//! distances:
//! 1/2
//! 1 1/2
//! ```
//!
//! The distance block is strictly lower triangular: row `i` (for `i >= 1`)
//! lists `d(i, 0) .. d(i, i-1)`. Points may carry any number of coordinates.

use super::{FiniteMapError, FiniteSelfMap, Matrix};
use crate::rational::{parse_rational, Fraction, Rational};
use num_traits::Zero;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] FiniteMapError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_indices(text: &str, line: usize) -> Result<Vec<usize>, FormatError> {
    text.split_whitespace()
        .map(|t| t.parse().map_err(|_| syntax(line, format!("invalid index {t:?}"))))
        .collect()
}

fn parse_values(text: &str, line: usize) -> Result<Vec<Rational>, FormatError> {
    text.split_whitespace()
        .map(|t| parse_rational(t).map_err(|e| syntax(line, e.to_string())))
        .collect()
}

pub fn parse_finite_map(text: &str) -> Result<FiniteSelfMap, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line, header) = lines.next().ok_or_else(|| syntax(1, "empty file"))?;
    let n: usize = header
        .strip_prefix("points")
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| syntax(line, "expected `points N` header"))?;
    if n == 0 {
        return Err(syntax(line, "point count must be positive"));
    }

    let mut labels = Vec::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, l) = lines.next().ok_or_else(|| syntax(line, "missing point lines"))?;
        let (label, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        if label.ends_with(':') {
            return Err(syntax(line, format!("expected {n} point lines before {label}")));
        }
        if labels.iter().any(|x: &String| x == label) {
            return Err(syntax(line, format!("duplicate label {label:?}")));
        }
        labels.push(label.to_string());
        coords.push(parse_values(rest, line)?);
    }

    let (line, l) = lines.next().ok_or_else(|| syntax(line, "missing map line"))?;
    let map = parse_indices(
        l.strip_prefix("map:").ok_or_else(|| syntax(line, "expected `map:` line"))?,
        line,
    )?;
    let (line, l) = lines.next().ok_or_else(|| syntax(line, "missing fixed line"))?;
    let fixed = match parse_indices(
        l.strip_prefix("fixed:").ok_or_else(|| syntax(line, "expected `fixed:` line"))?,
        line,
    )?
    .as_slice()
    {
        [f] => *f,
        _ => return Err(syntax(line, "expected a single fixed point index")),
    };
    let (mut line, l) = lines.next().ok_or_else(|| syntax(line, "missing distances block"))?;
    if l != "distances:" {
        return Err(syntax(line, "expected `distances:`"));
    }

    let mut distance: Matrix = vec![vec![Rational::zero(); n]; n];
    for i in 1..n {
        let (l_no, l) = lines
            .next()
            .ok_or_else(|| syntax(line, format!("distance block needs {} rows", n - 1)))?;
        line = l_no;
        let row = parse_values(l, line)?;
        if row.len() != i {
            return Err(syntax(line, format!("distance row {i} needs {i} entries, got {}", row.len())));
        }
        for (j, v) in row.into_iter().enumerate() {
            distance[j][i] = v.clone();
            distance[i][j] = v;
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(syntax(line, "unexpected content after distance block"));
    }
    Ok(FiniteSelfMap::new(labels, coords, distance, map, fixed)?)
}

pub fn print_finite_map(m: &FiniteSelfMap) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "points {}", m.len()).expect("writing to a String");
    for (label, coords) in m.labels().iter().zip(m.coords()) {
        let cs: Vec<String> = coords.iter().map(|c| Fraction(c).to_string()).collect();
        if cs.is_empty() {
            writeln!(w, "{label}")
        } else {
            writeln!(w, "{label} {}", cs.join(" "))
        }
        .expect("writing to a String");
    }
    let map: Vec<String> = m.map().iter().map(|i| i.to_string()).collect();
    writeln!(w, "map: {}", map.join(" ")).expect("writing to a String");
    writeln!(w, "fixed: {}", m.fixed_point()).expect("writing to a String");
    writeln!(w, "distances:").expect("writing to a String");
    for i in 1..m.len() {
        let row: Vec<String> = m.distance()[i][..i].iter().map(|v| Fraction(v).to_string()).collect();
        writeln!(w, "{}", row.join(" ")).expect("writing to a String");
    }
    out
}
