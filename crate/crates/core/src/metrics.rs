//! Metric axioms, Lipschitz continuity and contraction, decided exactly over
//! caller-supplied finite point sets.
//!
//! Every search returns the *first* witness in a fixed order (lexicographic
//! over indices), so results are reproducible even when pair lists are
//! scanned in parallel.

use crate::circuit::{Circuit, CircuitError};
use crate::point::{l1_norm_diff, Point};
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::fmt;

/// A distance-like function on the cube. Not necessarily a metric.
pub trait Distance: Sync {
    fn distance(&self, x: &Point, y: &Point) -> Rational;
}

impl<F> Distance for F
where
    F: Fn(&Point, &Point) -> Rational + Sync,
{
    fn distance(&self, x: &Point, y: &Point) -> Rational {
        self(x, y)
    }
}

/// A map from the cube to `Q^k`.
pub trait PointFn: Sync {
    fn eval(&self, x: &Point) -> Vec<Rational>;
}

/// Self-map of the cube (three outputs).
pub trait PointMap: PointFn {
    fn apply(&self, x: &Point) -> Point {
        Point::from_slice(&self.eval(x)).expect("point map has three outputs")
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct L1;

impl Distance for L1 {
    fn distance(&self, x: &Point, y: &Point) -> Rational {
        x.l1(y)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LInf;

impl Distance for LInf {
    fn distance(&self, x: &Point, y: &Point) -> Rational {
        x.0.iter()
            .zip(&y.0)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// 0 on the diagonal, 1 elsewhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct Discrete;

impl Distance for Discrete {
    fn distance(&self, x: &Point, y: &Point) -> Rational {
        if x == y {
            Rational::zero()
        } else {
            Rational::one()
        }
    }
}

/// `‖x − y‖₂²`, a standard example of a non-metric.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredEuclidean;

impl Distance for SquaredEuclidean {
    fn distance(&self, x: &Point, y: &Point) -> Rational {
        x.squared_euclidean(y)
    }
}

/// A 6 → 1 circuit read as `d(x, y)` with `x` on inputs 0..3.
#[derive(Debug, Clone)]
pub struct CircuitDistance(Circuit);

impl CircuitDistance {
    pub fn new(circuit: Circuit) -> Result<Self, CircuitError> {
        circuit.check_arity(6, 1)?;
        Ok(CircuitDistance(circuit))
    }

    pub fn circuit(&self) -> &Circuit {
        &self.0
    }
}

impl Distance for CircuitDistance {
    fn distance(&self, x: &Point, y: &Point) -> Rational {
        self.0
            .evaluate_scalar(&Point::pair_inputs(x, y))
            .expect("arity checked at construction")
    }
}

/// A 3 → k circuit.
#[derive(Debug, Clone)]
pub struct CircuitFn(Circuit);

impl CircuitFn {
    pub fn new(circuit: Circuit, outputs: usize) -> Result<Self, CircuitError> {
        circuit.check_arity(3, outputs)?;
        Ok(CircuitFn(circuit))
    }

    pub fn circuit(&self) -> &Circuit {
        &self.0
    }

    pub fn scalar(&self, x: &Point) -> Rational {
        self.eval(x).swap_remove(0)
    }
}

impl PointFn for CircuitFn {
    fn eval(&self, x: &Point) -> Vec<Rational> {
        self.0
            .evaluate(x.coords())
            .expect("arity checked at construction")
    }
}

impl PointMap for CircuitFn {}

impl<F> PointFn for F
where
    F: Fn(&Point) -> Point + Sync,
{
    fn eval(&self, x: &Point) -> Vec<Rational> {
        self(x).0.to_vec()
    }
}

impl<F> PointMap for F where F: Fn(&Point) -> Point + Sync {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Axiom {
    NonNeg,
    Identity,
    Symmetry,
    Triangle,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::NonNeg => "NONNEG",
            Axiom::Identity => "IDENTITY",
            Axiom::Symmetry => "SYMMETRY",
            Axiom::Triangle => "TRIANGLE",
        })
    }
}

/// A concrete failure of one metric axiom.
///
/// * `NonNeg`: `lhs = d(w0, w1) < 0 = rhs`
/// * `Identity`: `w0 = w1` with `lhs = d(w0, w1) != 0`, or `w0 != w1` with `lhs = d(w0, w1) = 0`
/// * `Symmetry`: `lhs = d(w0, w1) != d(w1, w0) = rhs`
/// * `Triangle`: `lhs = d(w0, w1) > d(w0, w2) + d(w2, w1) = rhs`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricViolation {
    pub axiom: Axiom,
    pub witnesses: Vec<Point>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl MetricViolation {
    /// Re-evaluates `d` at the witnesses and confirms the stored failure.
    pub fn replay(&self, d: &dyn Distance) -> bool {
        let w = &self.witnesses;
        match self.axiom {
            Axiom::NonNeg => {
                let v = d.distance(&w[0], &w[1]);
                v == self.lhs && v.is_negative()
            }
            Axiom::Identity => {
                let v = d.distance(&w[0], &w[1]);
                v == self.lhs && ((w[0] == w[1]) != v.is_zero())
            }
            Axiom::Symmetry => {
                let a = d.distance(&w[0], &w[1]);
                let b = d.distance(&w[1], &w[0]);
                a == self.lhs && b == self.rhs && a != b
            }
            Axiom::Triangle => {
                let direct = d.distance(&w[0], &w[1]);
                let via = d.distance(&w[0], &w[2]) + d.distance(&w[2], &w[1]);
                direct == self.lhs && via == self.rhs && direct > via
            }
        }
    }
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.witnesses.iter().map(|p| p.to_string()).collect();
        write!(f, "{} at [{}]: lhs {} rhs {}", self.axiom, pts.join(", "), self.lhs, self.rhs)
    }
}

/// A failed axiom on a distance table, by row/column index. Witness order
/// follows [`MetricViolation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexViolation {
    pub axiom: Axiom,
    pub indices: Vec<usize>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl fmt::Display for IndexViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}: lhs {} rhs {}", self.axiom, self.indices, self.lhs, self.rhs)
    }
}

/// Axiom check on a square table `d[i][j]`; `same(i, j)` says whether rows
/// `i` and `j` denote the same point. Scans singletons, then pairs `i < j`,
/// then ordered triples `(i, j, via k)`.
pub fn check_table_axioms(
    table: &[Vec<Rational>],
    same: impl Fn(usize, usize) -> bool,
) -> Option<IndexViolation> {
    let n = table.len();
    let violation = |axiom, indices: &[usize], lhs: &Rational, rhs: Rational| IndexViolation {
        axiom,
        indices: indices.to_vec(),
        lhs: lhs.clone(),
        rhs,
    };
    let zero = Rational::zero();

    for i in 0..n {
        let v = &table[i][i];
        if v.is_negative() {
            return Some(violation(Axiom::NonNeg, &[i, i], v, zero));
        }
        if !v.is_zero() {
            return Some(violation(Axiom::Identity, &[i, i], v, zero));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for (a, b) in [(i, j), (j, i)] {
                if table[a][b].is_negative() {
                    return Some(violation(Axiom::NonNeg, &[a, b], &table[a][b], zero));
                }
            }
            let coincide = same(i, j);
            for (a, b) in [(i, j), (j, i)] {
                if coincide != table[a][b].is_zero() {
                    return Some(violation(Axiom::Identity, &[a, b], &table[a][b], zero));
                }
            }
            if table[i][j] != table[j][i] {
                return Some(violation(Axiom::Symmetry, &[i, j], &table[i][j], table[j][i].clone()));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let via = &table[i][k] + &table[k][j];
                if table[i][j] > via {
                    return Some(violation(Axiom::Triangle, &[i, j, k], &table[i][j], via));
                }
            }
        }
    }
    None
}

/// Checks all four axioms over every singleton, pair and triple of `points`.
pub fn check_metric_axioms(d: &dyn Distance, points: &[Point]) -> Option<MetricViolation> {
    let n = points.len();
    let table: Vec<Vec<Rational>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| d.distance(&points[i], &points[j])).collect())
        .collect();
    check_table_axioms(&table, |i, j| points[i] == points[j]).map(|v| MetricViolation {
        axiom: v.axiom,
        witnesses: v.indices.iter().map(|&i| points[i].clone()).collect(),
        lhs: v.lhs,
        rhs: v.rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointPair {
    pub x: Point,
    pub y: Point,
}

impl PointPair {
    pub fn new(x: Point, y: Point) -> Self {
        PointPair { x, y }
    }
}

/// A violated inequality `lhs > rhs` at `pairs[index]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairViolation {
    pub index: usize,
    pub pair: PointPair,
    pub lhs: Rational,
    pub rhs: Rational,
}

/// First pair with `|g(x) − g(x')|₁ > λ |x − x'|₁`.
pub fn find_lipschitz_violation(
    g: &dyn PointFn,
    lambda: &Rational,
    pairs: &[PointPair],
) -> Option<PairViolation> {
    pairs.par_iter().enumerate().find_map_first(|(index, pair)| {
        let lhs = l1_norm_diff(&g.eval(&pair.x), &g.eval(&pair.y));
        let rhs = lambda * pair.x.l1(&pair.y);
        (lhs > rhs).then(|| PairViolation {
            index,
            pair: pair.clone(),
            lhs,
            rhs,
        })
    })
}

/// First pair with `d(f(x), f(y)) > c · d(x, y)`. Any `c > 0` is accepted.
pub fn find_contraction_violation(
    f: &dyn PointMap,
    d: &dyn Distance,
    c: &Rational,
    pairs: &[PointPair],
) -> Option<PairViolation> {
    pairs.par_iter().enumerate().find_map_first(|(index, pair)| {
        let lhs = d.distance(&f.apply(&pair.x), &f.apply(&pair.y));
        let rhs = c * d.distance(&pair.x, &pair.y);
        (lhs > rhs).then(|| PairViolation {
            index,
            pair: pair.clone(),
            lhs,
            rhs,
        })
    })
}
