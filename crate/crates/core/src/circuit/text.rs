//! Line-oriented circuit format.
//!
//! ```text
//! # comment
//! n0: input 0
//! input 1                 # shorthand, takes the next node id (n1)
//! n2: const 1/2
//! n3: mul n0 n2
//! n4: gt n3 n1
//! outputs: n3 n4
//! ```
//!
//! Node ids are dense and appear in order. Gates may only read earlier
//! nodes. `outputs:` is the last line.

use super::{BinOp, Circuit, CircuitError, Gate};
use crate::rational::{parse_rational, Fraction};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based line number, relative to the start of the parsed text.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }

    pub fn offset(mut self, lines: usize) -> Self {
        self.line += lines;
        self
    }
}

enum RawGate {
    Input(usize),
    Const(crate::rational::Rational),
    Op(BinOp, usize, usize),
}

fn parse_ref(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.strip_prefix('n')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| ParseError::new(line, format!("expected node reference like n3, found {tok:?}")))
}

fn parse_index(tok: Option<&str>, line: usize, what: &str) -> Result<usize, ParseError> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| ParseError::new(line, format!("expected {what} index")))
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
    .trim()
}

fn parse_body(body: &str, line: usize) -> Result<RawGate, ParseError> {
    let mut toks = body.split_whitespace();
    let head = toks
        .next()
        .ok_or_else(|| ParseError::new(line, "empty gate definition"))?;
    let rest: Vec<&str> = toks.collect();
    match head {
        "input" => {
            if rest.len() != 1 {
                return Err(ParseError::new(line, "arity mismatch: input takes one index"));
            }
            Ok(RawGate::Input(parse_index(rest.first().copied(), line, "input")?))
        }
        "const" => {
            if rest.len() != 1 {
                return Err(ParseError::new(
                    line,
                    format!("arity mismatch: const takes one value, got {}", rest.len()),
                ));
            }
            let v = parse_rational(rest[0]).map_err(|e| ParseError::new(line, e.to_string()))?;
            Ok(RawGate::Const(v))
        }
        name => {
            let op = BinOp::from_name(name)
                .ok_or_else(|| ParseError::new(line, format!("unknown gate {name:?}")))?;
            if rest.len() != 2 {
                return Err(ParseError::new(
                    line,
                    format!("arity mismatch: {name} takes 2 operands, got {}", rest.len()),
                ));
            }
            Ok(RawGate::Op(op, parse_ref(rest[0], line)?, parse_ref(rest[1], line)?))
        }
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut gates: Vec<(usize, RawGate)> = Vec::new();
    let mut outputs: Option<(usize, Vec<usize>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw);
        if content.is_empty() {
            continue;
        }
        if outputs.is_some() {
            return Err(ParseError::new(line, "content after the outputs line"));
        }
        if let Some(list) = content.strip_prefix("outputs:") {
            let ids = list
                .split_whitespace()
                .map(|t| parse_ref(t, line))
                .collect::<Result<Vec<_>, _>>()?;
            if ids.is_empty() {
                return Err(ParseError::new(line, "outputs line lists no nodes"));
            }
            outputs = Some((line, ids));
            continue;
        }
        let gate = if let Some((label, body)) = content.split_once(':') {
            let id = parse_ref(label.trim(), line)?;
            if id != gates.len() {
                return Err(ParseError::new(
                    line,
                    format!("node id n{id} out of sequence, expected n{}", gates.len()),
                ));
            }
            parse_body(body, line)?
        } else if content.starts_with("input") {
            parse_body(content, line)?
        } else {
            return Err(ParseError::new(line, format!("unrecognised line {content:?}")));
        };
        gates.push((line, gate));
    }

    let (out_line, outputs) =
        outputs.ok_or_else(|| ParseError::new(text.lines().count().max(1), "missing outputs line"))?;
    let total = gates.len();
    let mut nodes = Vec::with_capacity(total);
    for (id, (line, gate)) in gates.into_iter().enumerate() {
        nodes.push(match gate {
            RawGate::Input(k) => Gate::Input(k),
            RawGate::Const(v) => Gate::Const(v),
            RawGate::Op(op, a, b) => {
                for t in [a, b] {
                    if t == id {
                        return Err(ParseError::new(line, format!("cycle detected: n{id} reads itself")));
                    }
                    if t >= total {
                        return Err(ParseError::new(line, format!("dangling node id n{t}")));
                    }
                    if t > id {
                        return Err(ParseError::new(line, format!("forward reference to n{t}")));
                    }
                }
                Gate::Op(op, a, b)
            }
        });
    }
    if let Some(&t) = outputs.iter().find(|&&o| o >= total) {
        return Err(ParseError::new(out_line, format!("dangling node id n{t}")));
    }
    Circuit::new(nodes, outputs).map_err(|e| {
        let line = match e {
            CircuitError::NoOutputs | CircuitError::DanglingNode { .. } => out_line,
            _ => 1,
        };
        ParseError::new(line, e.to_string())
    })
}

pub fn print_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    for (id, gate) in circuit.nodes().iter().enumerate() {
        match gate {
            Gate::Input(k) => writeln!(out, "n{id}: input {k}"),
            Gate::Const(v) => writeln!(out, "n{id}: const {}", Fraction(v)),
            Gate::Op(op, a, b) => writeln!(out, "n{id}: {op} n{a} n{b}"),
        }
        .expect("writing to a String");
    }
    let outs: Vec<String> = circuit.outputs().iter().map(|o| format!("n{o}")).collect();
    writeln!(out, "outputs: {}", outs.join(" ")).expect("writing to a String");
    out
}
