//! Instance and solution files.
//!
//! ```text
//! banach-met
//! eps 1/8
//! lambda 2
//! c 1/2
//! begin f
//! n0: input 0
//! ...
//! outputs: n3 n4 n5
//! end
//! begin d
//! ...
//! end
//! ```
//!
//! Solutions are a kind line followed by one witness triple per line.

use super::{
    BanachInstance, ClsLocalInstance, ContractionMapInstance, Instance, InstanceError, Solution, SolutionKind,
};
use crate::circuit::{parse_circuit, print_circuit, Circuit};
use crate::point::Point;
use crate::rational::{parse_rational, Fraction, Rational};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

fn syntax(line: usize, message: impl Into<String>) -> InstanceFormatError {
    InstanceFormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn shape(tag: &str) -> Option<(&'static [&'static str], &'static [&'static str])> {
    Some(match tag {
        "cls-local" => (&["eps", "lambda"], &["f", "p"]),
        "banach" | "banach-met" => (&["eps", "lambda", "c"], &["f", "d"]),
        "contraction-map" => (&["eps", "lambda", "c"], &["f"]),
        _ => return None,
    })
}

fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_instance(text: &str) -> Result<Instance, InstanceFormatError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    let next_content = |i: &mut usize| -> Option<(usize, &str)> {
        while *i < lines.len() {
            *i += 1;
            let c = content(lines[*i - 1]);
            if !c.is_empty() {
                return Some((*i, c));
            }
        }
        None
    };

    let (line, tag) = next_content(&mut i).ok_or_else(|| syntax(1, "empty instance file"))?;
    let (constant_names, circuit_names) =
        shape(tag).ok_or_else(|| syntax(line, format!("unknown problem tag {tag:?}")))?;

    let mut constants: BTreeMap<&str, Rational> = BTreeMap::new();
    let mut circuits: BTreeMap<&str, Circuit> = BTreeMap::new();
    let mut last_line = line;
    while let Some((line, l)) = next_content(&mut i) {
        last_line = line;
        let mut toks = l.split_whitespace();
        let head = toks.next().expect("non-empty content");
        if head == "begin" {
            let name = toks.next().ok_or_else(|| syntax(line, "begin needs a circuit name"))?;
            let name = *circuit_names
                .iter()
                .find(|n| **n == name)
                .ok_or_else(|| syntax(line, format!("{tag} has no circuit named {name:?}")))?;
            if circuits.contains_key(name) {
                return Err(syntax(line, format!("circuit {name} given twice")));
            }
            let start = i;
            let end = (start..lines.len())
                .find(|&k| content(lines[k]) == "end")
                .ok_or_else(|| syntax(line, format!("circuit {name} has no closing `end`")))?;
            let body = lines[start..end].join("\n");
            let circuit = parse_circuit(&body).map_err(|e| {
                let e = e.offset(start);
                syntax(e.line, format!("circuit {name}: {}", e.message))
            })?;
            circuits.insert(name, circuit);
            i = end + 1;
            continue;
        }
        let name = *constant_names
            .iter()
            .find(|n| **n == head)
            .ok_or_else(|| syntax(line, format!("unexpected {head:?} in {tag} instance")))?;
        let value = toks.next().ok_or_else(|| syntax(line, format!("{name} needs a value")))?;
        if toks.next().is_some() {
            return Err(syntax(line, format!("{name} takes a single value")));
        }
        let value = parse_rational(value).map_err(|e| syntax(line, e.to_string()))?;
        if constants.insert(name, value).is_some() {
            return Err(syntax(line, format!("{name} given twice")));
        }
    }

    for name in constant_names {
        if !constants.contains_key(name) {
            return Err(syntax(last_line, format!("missing constant {name}")));
        }
    }
    for name in circuit_names {
        if !circuits.contains_key(name) {
            return Err(syntax(last_line, format!("missing circuit {name}")));
        }
    }
    let mut k = |n: &str| constants.remove(n).expect("checked above");
    let mut circ = |n: &str| circuits.remove(n).expect("checked above");
    Ok(match tag {
        "cls-local" => Instance::ClsLocal(ClsLocalInstance::new(circ("f"), circ("p"), k("eps"), k("lambda"))?),
        "contraction-map" => Instance::ContractionMap(ContractionMapInstance::new(
            circ("f"),
            k("eps"),
            k("lambda"),
            k("c"),
        )?),
        _ => Instance::Banach(BanachInstance::new(
            circ("f"),
            circ("d"),
            k("eps"),
            k("lambda"),
            k("c"),
            tag == "banach-met",
        )?),
    })
}

pub fn print_instance(instance: &Instance) -> String {
    let mut out = String::new();
    let constant = |out: &mut String, name: &str, v: &Rational| {
        writeln!(out, "{name} {}", Fraction(v)).expect("writing to a String");
    };
    writeln!(out, "{}", instance.tag()).expect("writing to a String");
    let circuits: Vec<(&str, &Circuit)> = match instance {
        Instance::ClsLocal(i) => {
            constant(&mut out, "eps", &i.eps);
            constant(&mut out, "lambda", &i.lambda);
            vec![("f", i.f.circuit()), ("p", i.p.circuit())]
        }
        Instance::Banach(i) => {
            constant(&mut out, "eps", &i.eps);
            constant(&mut out, "lambda", &i.lambda);
            constant(&mut out, "c", &i.c);
            vec![("f", i.f.circuit()), ("d", i.d.circuit())]
        }
        Instance::ContractionMap(i) => {
            constant(&mut out, "eps", &i.eps);
            constant(&mut out, "lambda", &i.lambda);
            constant(&mut out, "c", &i.c);
            vec![("f", i.f.circuit())]
        }
    };
    for (name, circuit) in circuits {
        writeln!(out, "begin {name}").expect("writing to a String");
        out.push_str(&print_circuit(circuit));
        writeln!(out, "end").expect("writing to a String");
    }
    out
}

pub fn parse_solution(text: &str) -> Result<Solution, InstanceFormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, content(l)))
        .filter(|(_, l)| !l.is_empty());
    let (line, head) = lines.next().ok_or_else(|| syntax(1, "empty solution file"))?;
    let name = head.strip_prefix("kind").map(str::trim).unwrap_or(head);
    let kind = SolutionKind::parse(name).ok_or_else(|| syntax(line, format!("unknown solution kind {name:?}")))?;
    let witnesses = lines
        .map(|(line, l)| Point::parse(l).map_err(|e| syntax(line, e)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Solution::new(kind, witnesses))
}

pub fn print_solution(sol: &Solution) -> String {
    let mut out = format!("{}\n", sol.kind);
    for w in &sol.witnesses {
        let cs: Vec<String> = w.0.iter().map(|c| Fraction(c).to_string()).collect();
        writeln!(out, "{}", cs.join(" ")).expect("writing to a String");
    }
    out
}
