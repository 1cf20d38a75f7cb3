//! The total search problems CLS-Local, Banach (syntactic and metric-promised)
//! and ContractionMap, with exact verifiers for every solution clause.
//!
//! Solution kinds are namespaced by problem: `CO1..CO3` belong to CLS-Local,
//! `Oa..Oe` to Banach, and `Oa..Oc` to ContractionMap. A verifier never
//! panics on a well-formed solution; it returns a [`Verdict`] carrying every
//! comparison it replayed.

mod format;
mod solver;

pub use format::{parse_instance, parse_solution, print_instance, print_solution, InstanceFormatError};
pub use solver::{grid_points, solve_grid, GridSolver};

use crate::circuit::{Circuit, CircuitError};
use crate::metrics::{check_metric_axioms, Axiom, CircuitDistance, CircuitFn, Distance, PointMap};
use crate::point::{l1_norm_diff, Point};
use crate::rational::{abs_diff, Rational};
use num_traits::{One, Signed};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("circuit {name}: {source}")]
    Arity {
        name: &'static str,
        source: CircuitError,
    },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: Rational },
    #[error("c must lie strictly between 0 and 1, got {0}")]
    Factor(Rational),
}

fn positive(name: &'static str, value: &Rational) -> Result<(), InstanceError> {
    if value.is_positive() {
        Ok(())
    } else {
        Err(InstanceError::NonPositive {
            name,
            value: value.clone(),
        })
    }
}

fn factor(c: &Rational) -> Result<(), InstanceError> {
    if c.is_positive() && c < &Rational::one() {
        Ok(())
    } else {
        Err(InstanceError::Factor(c.clone()))
    }
}

fn map_circuit(name: &'static str, circuit: Circuit, outputs: usize) -> Result<CircuitFn, InstanceError> {
    CircuitFn::new(circuit, outputs).map_err(|source| InstanceError::Arity { name, source })
}

/// `f: [0,1]³ → [0,1]³`, potential `p: [0,1]³ → [0,1]`.
#[derive(Debug, Clone)]
pub struct ClsLocalInstance {
    pub f: CircuitFn,
    pub p: CircuitFn,
    pub eps: Rational,
    pub lambda: Rational,
}

impl ClsLocalInstance {
    pub fn new(f: Circuit, p: Circuit, eps: Rational, lambda: Rational) -> Result<Self, InstanceError> {
        positive("eps", &eps)?;
        positive("lambda", &lambda)?;
        Ok(ClsLocalInstance {
            f: map_circuit("f", f, 3)?,
            p: map_circuit("p", p, 1)?,
            eps,
            lambda,
        })
    }
}

/// `f` together with a purported metric `d`. With `metric_promised` the
/// metric-violation clause `Oe` is unavailable.
#[derive(Debug, Clone)]
pub struct BanachInstance {
    pub f: CircuitFn,
    pub d: CircuitDistance,
    pub eps: Rational,
    pub lambda: Rational,
    pub c: Rational,
    pub metric_promised: bool,
}

impl BanachInstance {
    pub fn new(
        f: Circuit,
        d: Circuit,
        eps: Rational,
        lambda: Rational,
        c: Rational,
        metric_promised: bool,
    ) -> Result<Self, InstanceError> {
        positive("eps", &eps)?;
        positive("lambda", &lambda)?;
        factor(&c)?;
        Ok(BanachInstance {
            f: map_circuit("f", f, 3)?,
            d: CircuitDistance::new(d).map_err(|source| InstanceError::Arity { name: "d", source })?,
            eps,
            lambda,
            c,
            metric_promised,
        })
    }
}

/// Contraction with respect to the Euclidean distance.
#[derive(Debug, Clone)]
pub struct ContractionMapInstance {
    pub f: CircuitFn,
    pub eps: Rational,
    pub lambda: Rational,
    pub c: Rational,
}

impl ContractionMapInstance {
    pub fn new(f: Circuit, eps: Rational, lambda: Rational, c: Rational) -> Result<Self, InstanceError> {
        positive("eps", &eps)?;
        positive("lambda", &lambda)?;
        factor(&c)?;
        Ok(ContractionMapInstance {
            f: map_circuit("f", f, 3)?,
            eps,
            lambda,
            c,
        })
    }
}

#[derive(Debug, Clone)]
pub enum Instance {
    ClsLocal(ClsLocalInstance),
    Banach(BanachInstance),
    ContractionMap(ContractionMapInstance),
}

impl Instance {
    pub fn tag(&self) -> &'static str {
        match self {
            Instance::ClsLocal(_) => "cls-local",
            Instance::Banach(b) if b.metric_promised => "banach-met",
            Instance::Banach(_) => "banach",
            Instance::ContractionMap(_) => "contraction-map",
        }
    }

    pub fn verify(&self, sol: &Solution) -> Verdict {
        match self {
            Instance::ClsLocal(i) => verify_cls_local(i, sol),
            Instance::Banach(i) => verify_banach(i, sol),
            Instance::ContractionMap(i) => verify_contraction_map(i, sol),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SolutionKind {
    CO1,
    CO2,
    CO3,
    Oa,
    Ob,
    Oc,
    Od,
    Oe,
}

impl SolutionKind {
    pub const ALL: [SolutionKind; 8] = [
        SolutionKind::CO1,
        SolutionKind::CO2,
        SolutionKind::CO3,
        SolutionKind::Oa,
        SolutionKind::Ob,
        SolutionKind::Oc,
        SolutionKind::Od,
        SolutionKind::Oe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolutionKind::CO1 => "CO1",
            SolutionKind::CO2 => "CO2",
            SolutionKind::CO3 => "CO3",
            SolutionKind::Oa => "Oa",
            SolutionKind::Ob => "Ob",
            SolutionKind::Oc => "Oc",
            SolutionKind::Od => "Od",
            SolutionKind::Oe => "Oe",
        }
    }

    pub fn parse(text: &str) -> Option<SolutionKind> {
        SolutionKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(text))
    }

    /// Accepted witness counts, inclusive.
    pub fn witness_range(self) -> (usize, usize) {
        match self {
            SolutionKind::CO1 | SolutionKind::Oa => (1, 1),
            SolutionKind::CO2 | SolutionKind::CO3 | SolutionKind::Ob | SolutionKind::Oc => (2, 2),
            SolutionKind::Od => (4, 4),
            SolutionKind::Oe => (1, 3),
        }
    }
}

impl fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    pub kind: SolutionKind,
    pub witnesses: Vec<Point>,
}

impl Solution {
    pub fn new(kind: SolutionKind, witnesses: Vec<Point>) -> Self {
        Solution { kind, witnesses }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ne => lhs != rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// One exactly evaluated inequality `lhs REL rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub lhs_label: String,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs_label: String,
    pub rhs: Rational,
}

impl Comparison {
    fn new(lhs_label: &str, lhs: Rational, relation: Relation, rhs_label: &str, rhs: Rational) -> Self {
        Comparison {
            lhs_label: lhs_label.to_string(),
            lhs,
            relation,
            rhs_label: rhs_label.to_string(),
            rhs,
        }
    }

    pub fn holds(&self) -> bool {
        self.relation.holds(&self.lhs, &self.rhs)
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {} {} {} = {} ({})",
            self.lhs_label,
            self.lhs,
            self.relation.symbol(),
            self.rhs_label,
            self.rhs,
            if self.holds() { "holds" } else { "fails" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    OutOfDomain { witness: usize },
    WitnessCount { kind: SolutionKind, got: usize },
    InequalityFails,
    PromiseProblem,
    SideCondition(&'static str),
    KindMismatch { kind: SolutionKind, problem: &'static str },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::OutOfDomain { witness } => write!(f, "witness {witness} lies outside [0,1]^3"),
            RejectReason::WitnessCount { kind, got } => {
                let (lo, hi) = kind.witness_range();
                if lo == hi {
                    write!(f, "{kind} needs {lo} witnesses, got {got}")
                } else {
                    write!(f, "{kind} needs {lo} to {hi} witnesses, got {got}")
                }
            }
            RejectReason::InequalityFails => f.write_str("inequality fails"),
            RejectReason::PromiseProblem => {
                f.write_str("promise problem: metric violations are not solutions when d is promised to be a metric")
            }
            RejectReason::SideCondition(what) => write!(f, "side condition fails: {what}"),
            RejectReason::KindMismatch { kind, problem } => write!(f, "{kind} is not a solution kind of {problem}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Accept,
    Reject(RejectReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub kind: SolutionKind,
    pub outcome: Outcome,
    pub comparisons: Vec<Comparison>,
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        self.outcome == Outcome::Accept
    }

    fn reject(kind: SolutionKind, reason: RejectReason) -> Verdict {
        Verdict {
            kind,
            outcome: Outcome::Reject(reason),
            comparisons: Vec::new(),
        }
    }

    fn from_comparisons(kind: SolutionKind, comparisons: Vec<Comparison>) -> Verdict {
        let outcome = if comparisons.iter().all(Comparison::holds) {
            Outcome::Accept
        } else {
            Outcome::Reject(RejectReason::InequalityFails)
        };
        Verdict {
            kind,
            outcome,
            comparisons,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Outcome::Accept => writeln!(f, "ACCEPT {}", self.kind)?,
            Outcome::Reject(r) => writeln!(f, "REJECT {}: {r}", self.kind)?,
        }
        for c in &self.comparisons {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

fn precheck(sol: &Solution, allowed: &[SolutionKind], problem: &'static str) -> Option<Verdict> {
    if !allowed.contains(&sol.kind) {
        return Some(Verdict::reject(
            sol.kind,
            RejectReason::KindMismatch {
                kind: sol.kind,
                problem,
            },
        ));
    }
    let (lo, hi) = sol.kind.witness_range();
    let got = sol.witnesses.len();
    if got < lo || got > hi {
        return Some(Verdict::reject(sol.kind, RejectReason::WitnessCount { kind: sol.kind, got }));
    }
    if let Some(witness) = sol.witnesses.iter().position(|w| !w.in_unit_cube()) {
        return Some(Verdict::reject(sol.kind, RejectReason::OutOfDomain { witness }));
    }
    None
}

fn lipschitz_of_map(f: &dyn PointMap, lambda: &Rational, x: &Point, y: &Point) -> Comparison {
    Comparison::new(
        "|f(x) - f(x')|_1",
        l1_norm_diff(&f.eval(x), &f.eval(y)),
        Relation::Gt,
        "lambda |x - x'|_1",
        lambda * x.l1(y),
    )
}

pub fn verify_cls_local(inst: &ClsLocalInstance, sol: &Solution) -> Verdict {
    use SolutionKind::*;
    if let Some(v) = precheck(sol, &[CO1, CO2, CO3], "cls-local") {
        return v;
    }
    let w = &sol.witnesses;
    let comparisons = match sol.kind {
        CO1 => {
            let fx = inst.f.apply(&w[0]);
            vec![Comparison::new(
                "p(f(x))",
                inst.p.scalar(&fx),
                Relation::Ge,
                "p(x) - eps",
                inst.p.scalar(&w[0]) - &inst.eps,
            )]
        }
        CO2 => vec![lipschitz_of_map(&inst.f, &inst.lambda, &w[0], &w[1])],
        CO3 => vec![Comparison::new(
            "|p(x) - p(x')|",
            abs_diff(&inst.p.scalar(&w[0]), &inst.p.scalar(&w[1])),
            Relation::Gt,
            "lambda |x - x'|_1",
            &inst.lambda * w[0].l1(&w[1]),
        )],
        _ => unreachable!("filtered by precheck"),
    };
    Verdict::from_comparisons(sol.kind, comparisons)
}

fn axiom_relation(axiom: Axiom, distinct: bool) -> (Relation, &'static str, &'static str) {
    match axiom {
        Axiom::NonNeg => (Relation::Lt, "d(x, y)", "0"),
        Axiom::Identity if distinct => (Relation::Eq, "d(x, y) with x != y", "0"),
        Axiom::Identity => (Relation::Ne, "d(x, x)", "0"),
        Axiom::Symmetry => (Relation::Ne, "d(x, y)", "d(y, x)"),
        Axiom::Triangle => (Relation::Gt, "d(x, y)", "d(x, z) + d(z, y)"),
    }
}

pub fn verify_banach(inst: &BanachInstance, sol: &Solution) -> Verdict {
    use SolutionKind::*;
    let problem = if inst.metric_promised { "banach-met" } else { "banach" };
    if inst.metric_promised && sol.kind == Oe {
        return Verdict::reject(Oe, RejectReason::PromiseProblem);
    }
    if let Some(v) = precheck(sol, &[Oa, Ob, Oc, Od, Oe], problem) {
        return v;
    }
    let w = &sol.witnesses;
    let d = &inst.d;
    let comparisons = match sol.kind {
        Oa => vec![Comparison::new(
            "d(x, f(x))",
            d.distance(&w[0], &inst.f.apply(&w[0])),
            Relation::Le,
            "eps",
            inst.eps.clone(),
        )],
        Ob => vec![Comparison::new(
            "d(f(x), f(x'))",
            d.distance(&inst.f.apply(&w[0]), &inst.f.apply(&w[1])),
            Relation::Gt,
            "c d(x, x')",
            &inst.c * d.distance(&w[0], &w[1]),
        )],
        Oc => vec![lipschitz_of_map(&inst.f, &inst.lambda, &w[0], &w[1])],
        Od => {
            if w[0] == w[1] {
                return Verdict::reject(Od, RejectReason::SideCondition("x1 != x2"));
            }
            if w[2] == w[3] {
                return Verdict::reject(Od, RejectReason::SideCondition("y1 != y2"));
            }
            vec![Comparison::new(
                "|d(x1, x2) - d(y1, y2)|",
                abs_diff(&d.distance(&w[0], &w[1]), &d.distance(&w[2], &w[3])),
                Relation::Gt,
                "lambda (|x1 - y1|_1 + |x2 - y2|_1)",
                &inst.lambda * (w[0].l1(&w[2]) + w[1].l1(&w[3])),
            )]
        }
        Oe => match check_metric_axioms(d, w) {
            Some(v) => {
                let distinct = v.witnesses.len() > 1 && v.witnesses[0] != v.witnesses[1];
                let (relation, l, r) = axiom_relation(v.axiom, distinct);
                vec![Comparison::new(l, v.lhs, relation, r, v.rhs)]
            }
            None => Vec::new(),
        },
        _ => unreachable!("filtered by precheck"),
    };
    if comparisons.is_empty() {
        return Verdict::reject(sol.kind, RejectReason::InequalityFails);
    }
    Verdict::from_comparisons(sol.kind, comparisons)
}

pub fn verify_contraction_map(inst: &ContractionMapInstance, sol: &Solution) -> Verdict {
    use SolutionKind::*;
    if let Some(v) = precheck(sol, &[Oa, Ob, Oc], "contraction-map") {
        return v;
    }
    let w = &sol.witnesses;
    let comparisons = match sol.kind {
        Oa => vec![Comparison::new(
            "|x - f(x)|_2^2",
            w[0].squared_euclidean(&inst.f.apply(&w[0])),
            Relation::Le,
            "eps^2",
            &inst.eps * &inst.eps,
        )],
        Ob => vec![Comparison::new(
            "|f(x) - f(x')|_2^2",
            inst.f.apply(&w[0]).squared_euclidean(&inst.f.apply(&w[1])),
            Relation::Gt,
            "c^2 |x - x'|_2^2",
            &inst.c * &inst.c * w[0].squared_euclidean(&w[1]),
        )],
        Oc => vec![lipschitz_of_map(&inst.f, &inst.lambda, &w[0], &w[1])],
        _ => unreachable!("filtered by precheck"),
    };
    Verdict::from_comparisons(sol.kind, comparisons)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::rational::{int, rat};
    use num_traits::Zero;

    fn identity() -> Circuit {
        let mut b = CircuitBuilder::new();
        let x = b.inputs(3);
        b.finish(&x).unwrap()
    }

    fn halving() -> Circuit {
        let mut b = CircuitBuilder::new();
        let x = b.inputs(3);
        let out: Vec<_> = x.iter().map(|&v| b.scale(v, rat(1, 2))).collect();
        b.finish(&out).unwrap()
    }

    fn step_potential() -> Circuit {
        let mut b = CircuitBuilder::new();
        let x = b.inputs(3);
        let half = b.constant(rat(1, 2));
        let g = b.gt(x[0], half);
        b.finish(&[g]).unwrap()
    }

    fn first_coord() -> Circuit {
        let mut b = CircuitBuilder::new();
        let x = b.inputs(3);
        b.finish(&[x[0]]).unwrap()
    }

    fn l1() -> Circuit {
        let mut b = CircuitBuilder::new();
        let v = b.inputs(6);
        let mut acc = b.constant(int(0));
        for i in 0..3 {
            let diff = b.sub(v[i], v[i + 3]);
            let a = b.abs(diff);
            acc = b.add(acc, a);
        }
        b.finish(&[acc]).unwrap()
    }

    fn squared_l2() -> Circuit {
        let mut b = CircuitBuilder::new();
        let v = b.inputs(6);
        let mut acc = b.constant(int(0));
        for i in 0..3 {
            let diff = b.sub(v[i], v[i + 3]);
            let sq = b.mul(diff, diff);
            acc = b.add(acc, sq);
        }
        b.finish(&[acc]).unwrap()
    }

    fn p(a: Rational, b: Rational, c: Rational) -> Point {
        Point::new(a, b, c)
    }

    fn ex(a: Rational) -> Point {
        p(a, int(0), int(0))
    }

    #[test]
    fn cls_local_examples() {
        let inst = ClsLocalInstance::new(identity(), step_potential(), rat(1, 10), int(1)).unwrap();
        let v = verify_cls_local(&inst, &Solution::new(SolutionKind::CO1, vec![ex(rat(1, 3))]));
        assert!(v.accepted(), "{v}");

        let co3 = Solution::new(SolutionKind::CO3, vec![ex(rat(49, 100)), ex(rat(51, 100))]);
        let v = verify_cls_local(&inst, &co3);
        assert!(v.accepted(), "{v}");
        assert_eq!((v.comparisons[0].lhs.clone(), v.comparisons[0].rhs.clone()), (int(1), rat(1, 50)));

        // p(x) = x1 with f(x) = x/2: at x = (2/5,0,0) p drops by 1/5 = 2 eps
        let inst = ClsLocalInstance::new(halving(), first_coord(), rat(1, 10), int(1)).unwrap();
        let v = verify_cls_local(&inst, &Solution::new(SolutionKind::CO1, vec![ex(rat(2, 5))]));
        assert_eq!(v.outcome, Outcome::Reject(RejectReason::InequalityFails));
        assert_eq!(v.comparisons[0].lhs, rat(1, 5));
        assert_eq!(v.comparisons[0].rhs, rat(3, 10));
    }

    #[test]
    fn banach_examples() {
        let inst = BanachInstance::new(halving(), l1(), rat(1, 100), int(1), rat(1, 4), true).unwrap();
        let v = verify_banach(&inst, &Solution::new(SolutionKind::Oa, vec![Point::origin()]));
        assert!(v.accepted() && v.comparisons[0].lhs.is_zero());
        let v = verify_banach(&inst, &Solution::new(SolutionKind::Ob, vec![Point::origin(), ex(int(1))]));
        assert!(v.accepted());
        assert_eq!((v.comparisons[0].lhs.clone(), v.comparisons[0].rhs.clone()), (rat(1, 2), rat(1, 4)));

        let syntactic = BanachInstance::new(halving(), squared_l2(), rat(1, 100), int(1), rat(1, 2), false).unwrap();
        let oe = Solution::new(SolutionKind::Oe, vec![Point::origin(), ex(int(1)), ex(rat(1, 2))]);
        let v = verify_banach(&syntactic, &oe);
        assert!(v.accepted(), "{v}");
        assert_eq!(v.comparisons[0].lhs, int(1));
        assert_eq!(v.comparisons[0].rhs, rat(1, 2));

        let promised = BanachInstance::new(halving(), squared_l2(), rat(1, 100), int(1), rat(1, 2), true).unwrap();
        assert_eq!(verify_banach(&promised, &oe).outcome, Outcome::Reject(RejectReason::PromiseProblem));

        let l1_syntactic = BanachInstance::new(halving(), l1(), rat(1, 100), int(1), rat(1, 2), false).unwrap();
        assert_eq!(verify_banach(&l1_syntactic, &oe).outcome, Outcome::Reject(RejectReason::InequalityFails));
    }

    #[test]
    fn od_side_conditions_and_inequality() {
        let inst = BanachInstance::new(halving(), squared_l2(), rat(1, 100), rat(1, 10), rat(1, 2), true).unwrap();
        let same = Solution::new(SolutionKind::Od, vec![Point::origin(), Point::origin(), ex(int(1)), Point::origin()]);
        assert_eq!(verify_banach(&inst, &same).outcome, Outcome::Reject(RejectReason::SideCondition("x1 != x2")));
        // |d(0, e) - d(0, e/2)| = 3/4 > 1/10 · (0 + 1/2)
        let od = Solution::new(SolutionKind::Od, vec![Point::origin(), ex(int(1)), Point::origin(), ex(rat(1, 2))]);
        let v = verify_banach(&inst, &od);
        assert!(v.accepted(), "{v}");
        assert_eq!(v.comparisons[0].lhs, rat(3, 4));
        assert_eq!(v.comparisons[0].rhs, rat(1, 20));
    }

    #[test]
    fn contraction_map_examples() {
        let inst = ContractionMapInstance::new(identity(), rat(1, 100), int(1), rat(1, 2)).unwrap();
        assert!(verify_contraction_map(&inst, &Solution::new(SolutionKind::Oa, vec![ex(rat(1, 7))])).accepted());
        let oc = Solution::new(SolutionKind::Oc, vec![Point::origin(), ex(int(1))]);
        assert!(!verify_contraction_map(&inst, &oc).accepted());

        let inst = ContractionMapInstance::new(halving(), rat(1, 100), int(1), rat(1, 4)).unwrap();
        let v = verify_contraction_map(&inst, &Solution::new(SolutionKind::Ob, vec![Point::origin(), ex(int(1))]));
        assert!(v.accepted());
        assert_eq!((v.comparisons[0].lhs.clone(), v.comparisons[0].rhs.clone()), (rat(1, 4), rat(1, 16)));
    }

    #[test]
    fn structural_rejections() {
        let inst = ContractionMapInstance::new(identity(), rat(1, 100), int(1), rat(1, 2)).unwrap();
        let v = verify_contraction_map(&inst, &Solution::new(SolutionKind::Oa, vec![ex(rat(3, 2))]));
        assert_eq!(v.outcome, Outcome::Reject(RejectReason::OutOfDomain { witness: 0 }));
        let v = verify_contraction_map(&inst, &Solution::new(SolutionKind::Ob, vec![Point::origin()]));
        assert!(matches!(v.outcome, Outcome::Reject(RejectReason::WitnessCount { got: 1, .. })));
        let v = verify_contraction_map(&inst, &Solution::new(SolutionKind::Od, vec![Point::origin(); 4]));
        assert!(matches!(v.outcome, Outcome::Reject(RejectReason::KindMismatch { .. })));
        let cls = ClsLocalInstance::new(identity(), first_coord(), int(1), int(1)).unwrap();
        let v = verify_cls_local(&cls, &Solution::new(SolutionKind::Oa, vec![Point::origin()]));
        assert!(matches!(v.outcome, Outcome::Reject(RejectReason::KindMismatch { .. })));
    }

    #[test]
    fn instance_validation() {
        assert!(matches!(
            ClsLocalInstance::new(identity(), identity(), int(1), int(1)),
            Err(InstanceError::Arity { name: "p", .. })
        ));
        assert!(matches!(
            BanachInstance::new(identity(), l1(), int(1), int(1), int(1), true),
            Err(InstanceError::Factor(_))
        ));
        assert!(matches!(
            ContractionMapInstance::new(identity(), int(0), int(1), rat(1, 2)),
            Err(InstanceError::NonPositive { name: "eps", .. })
        ));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in SolutionKind::ALL {
            assert_eq!(SolutionKind::parse(k.name()), Some(k));
        }
        assert_eq!(SolutionKind::parse("co2"), Some(SolutionKind::CO2));
        assert_eq!(SolutionKind::parse("Of"), None);
    }
}
