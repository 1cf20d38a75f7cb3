use super::{BinOp, Circuit, CircuitError, Gate};
use crate::rational::{int, Rational};

/// Handle to a node inside a [`CircuitBuilder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wire(pub(crate) usize);

impl Wire {
    pub fn id(self) -> usize {
        self.0
    }
}

/// Incremental construction of circuits, including composition of existing
/// circuits via [`CircuitBuilder::embed`].
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    nodes: Vec<Gate>,
    inputs: usize,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, gate: Gate) -> Wire {
        self.nodes.push(gate);
        Wire(self.nodes.len() - 1)
    }

    /// Declares the next circuit input.
    pub fn input(&mut self) -> Wire {
        let k = self.inputs;
        self.inputs += 1;
        self.push(Gate::Input(k))
    }

    pub fn inputs(&mut self, n: usize) -> Vec<Wire> {
        (0..n).map(|_| self.input()).collect()
    }

    pub fn constant(&mut self, value: Rational) -> Wire {
        self.push(Gate::Const(value))
    }

    pub fn op(&mut self, op: BinOp, a: Wire, b: Wire) -> Wire {
        self.push(Gate::Op(op, a.0, b.0))
    }

    pub fn add(&mut self, a: Wire, b: Wire) -> Wire {
        self.op(BinOp::Add, a, b)
    }

    pub fn sub(&mut self, a: Wire, b: Wire) -> Wire {
        self.op(BinOp::Sub, a, b)
    }

    pub fn mul(&mut self, a: Wire, b: Wire) -> Wire {
        self.op(BinOp::Mul, a, b)
    }

    pub fn max(&mut self, a: Wire, b: Wire) -> Wire {
        self.op(BinOp::Max, a, b)
    }

    pub fn min(&mut self, a: Wire, b: Wire) -> Wire {
        self.op(BinOp::Min, a, b)
    }

    pub fn gt(&mut self, a: Wire, b: Wire) -> Wire {
        self.op(BinOp::Gt, a, b)
    }

    /// `0 - a`
    pub fn neg(&mut self, a: Wire) -> Wire {
        let zero = self.constant(int(0));
        self.sub(zero, a)
    }

    pub fn abs(&mut self, a: Wire) -> Wire {
        let n = self.neg(a);
        self.max(a, n)
    }

    pub fn scale(&mut self, a: Wire, k: Rational) -> Wire {
        let k = self.constant(k);
        self.mul(k, a)
    }

    /// 1 if `a >= b`, else 0.
    pub fn ge(&mut self, a: Wire, b: Wire) -> Wire {
        let one = self.constant(int(1));
        let lt = self.gt(b, a);
        self.sub(one, lt)
    }

    pub fn clamp(&mut self, a: Wire, lo: Rational, hi: Rational) -> Wire {
        let lo = self.constant(lo);
        let hi = self.constant(hi);
        let m = self.max(a, lo);
        self.min(m, hi)
    }

    /// Copies `circuit` into this builder with its inputs bound to `args`
    /// and returns the wires of its outputs.
    pub fn embed(&mut self, circuit: &Circuit, args: &[Wire]) -> Result<Vec<Wire>, CircuitError> {
        if args.len() != circuit.input_arity() {
            return Err(CircuitError::ArityMismatch {
                expected: circuit.input_arity(),
                got: args.len(),
            });
        }
        let mut map = Vec::with_capacity(circuit.nodes().len());
        for gate in circuit.nodes() {
            let w = match gate {
                Gate::Input(k) => args[*k],
                Gate::Const(c) => self.constant(c.clone()),
                Gate::Op(op, a, b) => self.op(*op, map[*a], map[*b]),
            };
            map.push(w);
        }
        Ok(circuit.outputs().iter().map(|&o| map[o]).collect())
    }

    pub fn finish(self, outputs: &[Wire]) -> Result<Circuit, CircuitError> {
        Circuit::new(self.nodes, outputs.iter().map(|w| w.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn embed_composes() {
        // g(x) = x/2, then h(x) = g(g(x)) + 1
        let mut b = CircuitBuilder::new();
        let x = b.input();
        let half = b.scale(x, rat(1, 2));
        let g = b.finish(&[half]).unwrap();

        let mut b = CircuitBuilder::new();
        let x = b.input();
        let once = b.embed(&g, &[x]).unwrap();
        let twice = b.embed(&g, &once).unwrap();
        let one = b.constant(int(1));
        let out = b.add(twice[0], one);
        let h = b.finish(&[out]).unwrap();
        assert_eq!(h.evaluate(&[int(2)]).unwrap(), vec![rat(3, 2)]);
        assert!(b_embed_arity_error(&g));
    }

    fn b_embed_arity_error(g: &Circuit) -> bool {
        let mut b = CircuitBuilder::new();
        b.embed(g, &[]).is_err()
    }

    #[test]
    fn helpers() {
        let mut b = CircuitBuilder::new();
        let x = b.input();
        let y = b.input();
        let a = b.abs(x);
        let ge = b.ge(x, y);
        let cl = b.clamp(x, int(0), int(1));
        let c = b.finish(&[a, ge, cl]).unwrap();
        assert_eq!(
            c.evaluate(&[rat(-3, 2), rat(-3, 2)]).unwrap(),
            vec![rat(3, 2), int(1), int(0)]
        );
        assert_eq!(
            c.evaluate(&[rat(5, 2), int(3)]).unwrap(),
            vec![rat(5, 2), int(0), int(1)]
        );
    }
}
