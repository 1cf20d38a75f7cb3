//! Arithmetic circuits over the rationals.
//!
//! A [`Circuit`] is a DAG of gates stored in topological order: every gate
//! only reads nodes with a smaller id. Gates are `+ - * max min >` plus
//! rational constants and declared inputs. Evaluation is exact.

mod builder;
mod power;
mod text;

pub use builder::{CircuitBuilder, Wire};
pub use power::{
    build_interpolation_circuit, build_power_circuit, interpolation_reference, InterpolationRule,
    PowerCircuitError,
};
pub use text::{parse_circuit, print_circuit, ParseError};
pub(crate) use power::interpolation_wire;

use crate::rational::Rational;
use num_traits::{One, Zero};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Max,
    Min,
    /// 1 if left > right, else 0.
    Gt,
}

impl BinOp {
    pub fn name(self) -> &'static str {
        match self {
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::Max => "max",
            BinOp::Min => "min",
            BinOp::Gt => "gt",
        }
    }

    pub fn from_name(name: &str) -> Option<BinOp> {
        Some(match name {
            "add" => BinOp::Add,
            "sub" => BinOp::Sub,
            "mul" => BinOp::Mul,
            "max" => BinOp::Max,
            "min" => BinOp::Min,
            "gt" => BinOp::Gt,
            _ => return None,
        })
    }

    pub fn apply(self, a: &Rational, b: &Rational) -> Rational {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Max => a.max(b).clone(),
            BinOp::Min => a.min(b).clone(),
            BinOp::Gt => {
                if a > b {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
        }
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    /// In-degree 0 node carrying circuit input `k`.
    Input(usize),
    Const(Rational),
    Op(BinOp, usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("node n{node} has a forward reference to n{target}")]
    ForwardReference { node: usize, target: usize },
    #[error("node n{node} references itself (cycle detected)")]
    Cycle { node: usize },
    #[error("n{target} referenced by {referrer} does not exist")]
    DanglingNode { referrer: String, target: usize },
    #[error("input {0} declared twice")]
    DuplicateInput(usize),
    #[error("input {0} is never declared (inputs must be numbered 0..k)")]
    MissingInput(usize),
    #[error("circuit has no outputs")]
    NoOutputs,
    #[error("expected {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    nodes: Vec<Gate>,
    outputs: Vec<usize>,
    input_arity: usize,
}

impl Circuit {
    /// Validates topological order, input numbering and output ids.
    pub fn new(nodes: Vec<Gate>, outputs: Vec<usize>) -> Result<Self, CircuitError> {
        let mut seen = Vec::new();
        for (id, gate) in nodes.iter().enumerate() {
            match gate {
                Gate::Input(k) => {
                    if *k >= seen.len() {
                        seen.resize(k + 1, false);
                    }
                    if seen[*k] {
                        return Err(CircuitError::DuplicateInput(*k));
                    }
                    seen[*k] = true;
                }
                Gate::Const(_) => {}
                Gate::Op(_, a, b) => {
                    for &t in [a, b] {
                        if t == id {
                            return Err(CircuitError::Cycle { node: id });
                        }
                        if t >= nodes.len() {
                            return Err(CircuitError::DanglingNode {
                                referrer: format!("n{id}"),
                                target: t,
                            });
                        }
                        if t > id {
                            return Err(CircuitError::ForwardReference { node: id, target: t });
                        }
                    }
                }
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(CircuitError::MissingInput(k));
        }
        if outputs.is_empty() {
            return Err(CircuitError::NoOutputs);
        }
        if let Some(&t) = outputs.iter().find(|&&o| o >= nodes.len()) {
            return Err(CircuitError::DanglingNode {
                referrer: "outputs".into(),
                target: t,
            });
        }
        Ok(Circuit {
            input_arity: seen.len(),
            nodes,
            outputs,
        })
    }

    pub fn nodes(&self) -> &[Gate] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn input_arity(&self) -> usize {
        self.input_arity
    }

    pub fn output_arity(&self) -> usize {
        self.outputs.len()
    }

    pub fn gate_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|g| matches!(g, Gate::Op(..)))
            .count()
    }

    pub fn evaluate(&self, inputs: &[Rational]) -> Result<Vec<Rational>, CircuitError> {
        if inputs.len() != self.input_arity {
            return Err(CircuitError::ArityMismatch {
                expected: self.input_arity,
                got: inputs.len(),
            });
        }
        let mut values: Vec<Rational> = Vec::with_capacity(self.nodes.len());
        for gate in &self.nodes {
            let v = match gate {
                Gate::Input(k) => inputs[*k].clone(),
                Gate::Const(c) => c.clone(),
                Gate::Op(op, a, b) => op.apply(&values[*a], &values[*b]),
            };
            values.push(v);
        }
        Ok(self.outputs.iter().map(|&o| values[o].clone()).collect())
    }

    /// Evaluates a single-output circuit.
    pub fn evaluate_scalar(&self, inputs: &[Rational]) -> Result<Rational, CircuitError> {
        Ok(self.evaluate(inputs)?.swap_remove(0))
    }

    pub fn check_arity(&self, inputs: usize, outputs: usize) -> Result<(), CircuitError> {
        if self.input_arity != inputs {
            return Err(CircuitError::ArityMismatch {
                expected: inputs,
                got: self.input_arity,
            });
        }
        if self.outputs.len() != outputs {
            return Err(CircuitError::ArityMismatch {
                expected: outputs,
                got: self.outputs.len(),
            });
        }
        Ok(())
    }
}
