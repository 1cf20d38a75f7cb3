//! Reductions between Banach and CLS-Local, with solution back-mapping.
//!
//! *Membership* (Banach to CLS-Local) keeps `f` and uses the residual
//! `p(x) = d(x, f(x))` as potential with `ε' = (1 − c)·ε`.
//!
//! *Hardness* (CLS-Local to Banach) keeps `f` and builds the metric
//! `d(x, y) = B(κ(x, y))·d_S(x, y)` with `κ = min(−p(x)/ε, −p(y)/ε)`, the
//! discrete metric `d_S` and the power interpolation `B`, at contraction
//! factor `c' = 1 − ε/10` and accuracy `ε' = 1/c'`.
//!
//! Back-maps replay every candidate against the source verifier and fail
//! loudly with the full replay if none is accepted.

use crate::bounds::{certified_ceil, exp_interval, ln_enclosure};
use crate::circuit::{interpolation_wire, Circuit, CircuitBuilder, InterpolationRule, Wire};
use crate::cls::{
    verify_banach, verify_cls_local, BanachInstance, ClsLocalInstance, Instance, Solution, SolutionKind, Verdict,
};
use crate::metrics::{check_metric_axioms, Distance, MetricViolation, PointMap};
use crate::point::Point;
use crate::rational::{int, rat, Fraction, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    BanachToClsLocal,
    ClsLocalToBanach,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::BanachToClsLocal => "BANACH_TO_CLSLOCAL",
            Direction::ClsLocalToBanach => "CLSLOCAL_TO_BANACH",
        })
    }
}

/// Constants of the metric built by the hardness direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardnessParams {
    /// Accuracy used inside `κ`; `ε/2` when pre-scaling is on.
    pub eps_used: Rational,
    pub c_prime: Rational,
    pub eps_prime: Rational,
    pub lambda_prime: Rational,
    pub rule: InterpolationRule,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Provenance {
    pub direction: Direction,
    pub source_problem: String,
    pub target_problem: String,
    /// Every substituted constant as an exact `a/b` rational.
    pub constants: BTreeMap<String, String>,
    pub options: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct ReductionArtifacts {
    pub direction: Direction,
    pub produced: Instance,
    pub provenance: Provenance,
    pub hardness: Option<HardnessParams>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error("eps = {0} is too large: c' = 1 - eps/10 must stay positive (need eps < 10)")]
    EpsTooLarge(Rational),
    #[error("reduction produced an invalid instance: {0}")]
    Produced(String),
    #[error("artifacts come from the other reduction direction")]
    WrongDirection,
}

/// No candidate back-mapped solution survived the source verifier.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("reduction bug: no back-mapped candidate for {kind} is accepted by the source ({} replayed)", attempts.len())]
pub struct BackMapError {
    pub kind: SolutionKind,
    pub attempts: Vec<Verdict>,
}

impl BackMapError {
    /// Every replayed candidate verdict, for bug reports.
    pub fn trace(&self) -> String {
        self.attempts.iter().map(|v| v.to_string()).collect()
    }
}

fn constants(entries: &[(&str, &Rational)]) -> BTreeMap<String, String> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), Fraction(v).to_string()))
        .collect()
}

/// `p(x) = d(x, f(x))` as one 3 → 1 circuit.
pub fn residual_potential(f: &Circuit, d: &Circuit) -> Circuit {
    let mut b = CircuitBuilder::new();
    let x = b.inputs(3);
    let fx = b.embed(f, &x).expect("f has three inputs");
    let args: Vec<Wire> = x.iter().chain(&fx).copied().collect();
    let out = b.embed(d, &args).expect("d has six inputs");
    b.finish(&out).expect("well formed")
}

/// Membership direction: `f' = f`, `p(x) = d(x, f(x))`, `ε' = (1 − c)ε`,
/// `λ' = λ(1 + λ)`.
///
/// `λ'` is larger than `λ` so that a potential-Lipschitz violation always
/// maps back: at `λ' = λ(1 + λ)` either `f` itself breaks `λ`-Lipschitz
/// continuity on the pair, or the residual quadruple breaks that of `d`.
pub fn reduce_banach_to_cls_local(inst: &BanachInstance) -> Result<ReductionArtifacts, ReduceError> {
    let p = residual_potential(inst.f.circuit(), inst.d.circuit());
    let eps_prime = (Rational::one() - &inst.c) * &inst.eps;
    let lambda_prime = &inst.lambda * (Rational::one() + &inst.lambda);
    let produced = ClsLocalInstance::new(inst.f.circuit().clone(), p, eps_prime.clone(), lambda_prime.clone())
        .map_err(|e| ReduceError::Produced(e.to_string()))?;
    Ok(ReductionArtifacts {
        direction: Direction::BanachToClsLocal,
        produced: Instance::ClsLocal(produced),
        provenance: Provenance {
            direction: Direction::BanachToClsLocal,
            source_problem: if inst.metric_promised { "banach-met" } else { "banach" }.into(),
            target_problem: "cls-local".into(),
            constants: constants(&[
                ("eps", &inst.eps),
                ("lambda", &inst.lambda),
                ("c", &inst.c),
                ("eps_prime", &eps_prime),
                ("lambda_prime", &lambda_prime),
            ]),
            options: BTreeMap::new(),
        },
        hardness: None,
    })
}

fn accept_first(kind: SolutionKind, candidates: Vec<Solution>, verify: impl Fn(&Solution) -> Verdict) -> Result<Solution, BackMapError> {
    let mut attempts = Vec::new();
    for cand in candidates {
        let v = verify(&cand);
        if v.accepted() {
            return Ok(cand);
        }
        attempts.push(v);
    }
    Err(BackMapError { kind, attempts })
}

/// Maps a CLS-Local solution of the membership-reduced instance to a
/// solution of the source Banach instance.
pub fn map_cls_local_solution_to_banach(src: &BanachInstance, sol: &Solution) -> Result<Solution, BackMapError> {
    use SolutionKind::*;
    let f = &src.f;
    let d = &src.d;
    let w = &sol.witnesses;
    let candidates = match sol.kind {
        CO1 if w.len() == 1 => {
            let x = &w[0];
            let fx = f.apply(x);
            let ffx = f.apply(&fx);
            if d.distance(&fx, &ffx) > &src.c * d.distance(x, &fx) {
                vec![Solution::new(Ob, vec![x.clone(), fx])]
            } else {
                vec![Solution::new(Oa, vec![x.clone()])]
            }
        }
        CO2 => vec![Solution::new(Oc, w.clone())],
        CO3 if w.len() == 2 => {
            let (mut x, mut y) = (w[0].clone(), w[1].clone());
            let (fx, fy) = (f.apply(&x), f.apply(&y));
            if crate::point::l1_norm_diff(fx.coords(), fy.coords()) > &src.lambda * x.l1(&y) {
                vec![Solution::new(Oc, vec![x, y])]
            } else {
                let (mut fx, mut fy) = (fx, fy);
                if x.l1(&fx) > y.l1(&fy) {
                    std::mem::swap(&mut x, &mut y);
                    std::mem::swap(&mut fx, &mut fy);
                }
                if x == fx {
                    if d.distance(&x, &x).is_zero() {
                        vec![Solution::new(Oa, vec![x])]
                    } else {
                        vec![Solution::new(Oe, vec![x])]
                    }
                } else {
                    vec![Solution::new(Od, vec![x, fx, y, fy])]
                }
            }
        }
        _ => Vec::new(),
    };
    accept_first(sol.kind, candidates, |s| verify_banach(src, s))
}

/// 6 → 1 circuit `κ(x, y) = min(−p(x)/ε, −p(y)/ε)`.
pub fn build_kappa_circuit(p: &Circuit, eps: &Rational) -> Circuit {
    let mut b = CircuitBuilder::new();
    let v = b.inputs(6);
    let k = kappa_wire(&mut b, p, eps, &v);
    b.finish(&[k]).expect("well formed")
}

fn kappa_wire(b: &mut CircuitBuilder, p: &Circuit, eps: &Rational, v: &[Wire]) -> Wire {
    let px = b.embed(p, &v[..3]).expect("p has three inputs")[0];
    let py = b.embed(p, &v[3..]).expect("p has three inputs")[0];
    let mut scaled = |w: Wire| {
        let s = b.scale(w, eps.recip());
        b.neg(s)
    };
    let kx = scaled(px);
    let ky = scaled(py);
    b.min(kx, ky)
}

/// `d_S(x, y)`: `min(1, Σ_i [x_i > y_i] + [y_i > x_i])`.
fn discrete_wire(b: &mut CircuitBuilder, v: &[Wire]) -> Wire {
    let mut acc = b.constant(Rational::zero());
    for i in 0..3 {
        let gt = b.gt(v[i], v[i + 3]);
        let lt = b.gt(v[i + 3], v[i]);
        acc = b.add(acc, gt);
        acc = b.add(acc, lt);
    }
    let one = b.constant(Rational::one());
    b.min(acc, one)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricCircuitError {
    #[error("eps must be positive, got {0}")]
    Eps(Rational),
    #[error("c must lie strictly between 0 and 1, got {0}")]
    Factor(Rational),
}

/// 6 → 1 circuit `d(x, y) = B(κ(x, y))·d_S(x, y)`. `κ` is clamped into
/// `[−1/ε, 0]`, which is its range whenever `p` maps into `[0, 1]`.
pub fn build_interpolated_metric_circuit(
    p: &Circuit,
    eps: &Rational,
    c: &Rational,
    rule: InterpolationRule,
) -> Result<Circuit, MetricCircuitError> {
    if !eps.is_positive() {
        return Err(MetricCircuitError::Eps(eps.clone()));
    }
    if !c.is_positive() || c >= &Rational::one() {
        return Err(MetricCircuitError::Factor(c.clone()));
    }
    let mut b = CircuitBuilder::new();
    let v = b.inputs(6);
    let k = kappa_wire(&mut b, p, eps, &v);
    let interp = interpolation_wire(&mut b, k, c, &eps.recip(), rule);
    let ds = discrete_wire(&mut b, &v);
    let out = b.mul(interp, ds);
    Ok(b.finish(&[out]).expect("well formed"))
}

/// `⌈c^(−1/ε)·λ·ln(1/c)/ε⌉`, certified through rational enclosures.
pub fn lipschitz_bound(c: &Rational, lambda: &Rational, eps: &Rational) -> Rational {
    let inv_c = c.recip();
    let scale = lambda / eps;
    let ceil = certified_ceil(|terms| {
        let ln = ln_enclosure(&inv_c, terms);
        let growth = exp_interval(&ln.scale_nonneg(&eps.recip()), terms);
        growth.mul_nonneg(&ln).scale_nonneg(&scale)
    });
    Rational::from_integer(ceil)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HardnessOptions {
    /// Build the metric for `ε/2` so back-mapped CO1 solutions meet `ε`
    /// exactly instead of `2ε`.
    pub halve_eps: bool,
    pub rule: InterpolationRule,
}

/// Hardness direction. The produced instance is tagged metric-promised
/// when the constructed `d` is provably a metric: always for the chord
/// rule, and for the printed rule when `c' >= 1/2`.
pub fn reduce_cls_local_to_banach(
    inst: &ClsLocalInstance,
    opts: HardnessOptions,
) -> Result<ReductionArtifacts, ReduceError> {
    let eps_used = if opts.halve_eps {
        &inst.eps / int(2)
    } else {
        inst.eps.clone()
    };
    let c_prime = Rational::one() - &eps_used / int(10);
    if !c_prime.is_positive() {
        return Err(ReduceError::EpsTooLarge(eps_used));
    }
    let eps_prime = c_prime.recip();
    let lambda_prime = inst.lambda.clone().max(lipschitz_bound(&c_prime, &inst.lambda, &eps_used));
    let d = build_interpolated_metric_circuit(inst.p.circuit(), &eps_used, &c_prime, opts.rule)
        .expect("eps_used > 0 and c' in (0, 1)");
    let promised = opts.rule == InterpolationRule::Chord || c_prime >= rat(1, 2);
    let produced = BanachInstance::new(
        inst.f.circuit().clone(),
        d,
        eps_prime.clone(),
        lambda_prime.clone(),
        c_prime.clone(),
        promised,
    )
    .map_err(|e| ReduceError::Produced(e.to_string()))?;
    let mut options = BTreeMap::new();
    options.insert("halve_eps".into(), opts.halve_eps.to_string());
    options.insert("interpolation".into(), format!("{:?}", opts.rule).to_lowercase());
    Ok(ReductionArtifacts {
        direction: Direction::ClsLocalToBanach,
        produced: Instance::Banach(produced),
        provenance: Provenance {
            direction: Direction::ClsLocalToBanach,
            source_problem: "cls-local".into(),
            target_problem: if promised { "banach-met" } else { "banach" }.into(),
            constants: constants(&[
                ("eps", &inst.eps),
                ("lambda", &inst.lambda),
                ("eps_used", &eps_used),
                ("c_prime", &c_prime),
                ("eps_prime", &eps_prime),
                ("lambda_prime", &lambda_prime),
            ]),
            options,
        },
        hardness: Some(HardnessParams {
            eps_used,
            c_prime,
            eps_prime,
            lambda_prime,
            rule: opts.rule,
        }),
    })
}

/// Maps a Banach solution of the hardness-reduced instance back to the
/// source CLS-Local instance.
pub fn map_banach_solution_to_cls_local(
    src: &ClsLocalInstance,
    artifacts: &ReductionArtifacts,
    sol: &Solution,
) -> Result<Solution, BackMapError> {
    use SolutionKind::*;
    let w = &sol.witnesses;
    let candidates = if artifacts.direction != Direction::ClsLocalToBanach {
        Vec::new()
    } else {
        match sol.kind {
            Oa if w.len() == 1 => vec![Solution::new(CO1, w.clone())],
            Ob if w.len() == 2 => {
                // the proof's case split puts the higher potential first
                let (x, y) = if src.p.scalar(&w[0]) >= src.p.scalar(&w[1]) {
                    (&w[0], &w[1])
                } else {
                    (&w[1], &w[0])
                };
                vec![
                    Solution::new(CO1, vec![x.clone()]),
                    Solution::new(CO1, vec![y.clone()]),
                ]
            }
            Oc => vec![Solution::new(CO2, w.clone())],
            Od if w.len() == 4 => vec![
                Solution::new(CO3, vec![w[0].clone(), w[2].clone()]),
                Solution::new(CO3, vec![w[1].clone(), w[3].clone()]),
            ],
            _ => Vec::new(),
        }
    };
    accept_first(sol.kind, candidates, |s| verify_cls_local(src, s))
}

/// Result of checking the constructed metric on sampled triples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MetricReport {
    pub triples_checked: usize,
    pub axiom_violation: Option<MetricViolation>,
    /// `(x, y, d(x, y))` with `x != y` and `d(x, y) < c'`.
    pub lower_bound_violation: Option<(Point, Point, Rational)>,
    /// Triangle `d(x, z) <= d(x, y) + d(y, z)` split by `p(x) >= p(z)` and `p(x) <= p(z)`.
    pub case_p_x_ge_p_z: CaseTally,
    pub case_p_x_le_p_z: CaseTally,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CaseTally {
    pub held: usize,
    pub failed: usize,
}

impl MetricReport {
    pub fn passed(&self) -> bool {
        self.axiom_violation.is_none()
            && self.lower_bound_violation.is_none()
            && self.case_p_x_ge_p_z.failed == 0
            && self.case_p_x_le_p_z.failed == 0
    }
}

/// Checks the hardness-direction metric on `triples`: all four axioms on
/// every triple, `d >= c'` off the diagonal, and the triangle inequality
/// case by case.
pub fn certify_constructed_metric(
    src: &ClsLocalInstance,
    artifacts: &ReductionArtifacts,
    triples: &[[Point; 3]],
) -> Result<MetricReport, ReduceError> {
    let (Instance::Banach(target), Some(params)) = (&artifacts.produced, &artifacts.hardness) else {
        return Err(ReduceError::WrongDirection);
    };
    let d = &target.d;
    let mut report = MetricReport {
        triples_checked: triples.len(),
        ..MetricReport::default()
    };
    for t in triples {
        if report.axiom_violation.is_none() {
            report.axiom_violation = check_metric_axioms(d, t);
        }
        if report.lower_bound_violation.is_none() {
            for (a, b) in [(0, 1), (1, 2), (0, 2)] {
                if t[a] != t[b] {
                    let v = d.distance(&t[a], &t[b]);
                    if v < params.c_prime {
                        report.lower_bound_violation = Some((t[a].clone(), t[b].clone(), v));
                        break;
                    }
                }
            }
        }
        let [x, y, z] = t;
        let holds = d.distance(x, z) <= d.distance(x, y) + d.distance(y, z);
        let (px, pz) = (src.p.scalar(x), src.p.scalar(z));
        let tally = |case: &mut CaseTally| {
            if holds {
                case.held += 1;
            } else {
                case.failed += 1;
            }
        };
        if px >= pz {
            tally(&mut report.case_p_x_ge_p_z);
        }
        if px <= pz {
            tally(&mut report.case_p_x_le_p_z);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_interpolation_circuit, interpolation_reference};
    use crate::cls::Outcome;
    use crate::metrics::CircuitFn;

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

    fn linear_potential(coef: Rational) -> Circuit {
        let mut b = CircuitBuilder::new();
        let x = b.inputs(3);
        let out = b.scale(x[0], coef);
        b.finish(&[out]).unwrap()
    }

    fn zero_potential() -> Circuit {
        let mut b = CircuitBuilder::new();
        let _ = b.inputs(3);
        let z = b.constant(int(0));
        b.finish(&[z]).unwrap()
    }

    fn ex(a: Rational) -> Point {
        Point::new(a, int(0), int(0))
    }

    #[test]
    fn membership_constants_and_potential() {
        let src = BanachInstance::new(halving(), l1(), rat(1, 4), int(1), rat(1, 2), true).unwrap();
        let art = reduce_banach_to_cls_local(&src).unwrap();
        let Instance::ClsLocal(t) = &art.produced else { panic!() };
        assert_eq!(t.eps, rat(1, 8));
        assert!(t.eps < src.eps);
        let x = Point::new(int(1), rat(1, 2), int(0));
        assert_eq!(t.p.scalar(&x), rat(3, 4));
        assert_eq!(art.provenance.constants["eps_prime"], "1/8");
    }

    #[test]
    fn identity_has_zero_potential() {
        let src = BanachInstance::new(identity(), l1(), rat(1, 4), int(1), rat(1, 2), true).unwrap();
        let art = reduce_banach_to_cls_local(&src).unwrap();
        let Instance::ClsLocal(t) = &art.produced else { panic!() };
        let x = Point::new(rat(1, 3), rat(2, 7), int(1));
        assert!(t.p.scalar(&x).is_zero());
        let sol = Solution::new(SolutionKind::CO1, vec![x.clone()]);
        assert!(verify_cls_local(t, &sol).accepted());
        let back = map_cls_local_solution_to_banach(&src, &sol).unwrap();
        assert_eq!(back, Solution::new(SolutionKind::Oa, vec![x]));
    }

    #[test]
    fn co1_maps_to_contraction_violation() {
        // f = identity moves nothing, so use an expanding map: f(x) = min(1, 2x)
        let mut b = CircuitBuilder::new();
        let x = b.inputs(3);
        let out: Vec<_> = x
            .iter()
            .map(|&v| {
                let two = b.scale(v, int(2));
                let one = b.constant(int(1));
                b.min(two, one)
            })
            .collect();
        let f = b.finish(&out).unwrap();
        let src = BanachInstance::new(f, l1(), rat(1, 100), int(2), rat(1, 2), true).unwrap();
        let x = ex(rat(1, 8));
        let back = map_cls_local_solution_to_banach(&src, &Solution::new(SolutionKind::CO1, vec![x.clone()])).unwrap();
        assert_eq!(back.kind, SolutionKind::Ob);
        assert_eq!(back.witnesses, vec![x, ex(rat(1, 4))]);
    }

    #[test]
    fn co3_degenerate_branch_gives_metric_violation() {
        // d(x, y) = |x - y|_1 + 1 breaks identity everywhere
        let mut b = CircuitBuilder::new();
        let v = b.inputs(6);
        let d = b.embed(&l1(), &v).unwrap()[0];
        let one = b.constant(int(1));
        let out = b.add(d, one);
        let shifted = b.finish(&[out]).unwrap();
        let src = BanachInstance::new(identity(), shifted, rat(1, 100), int(1), rat(1, 2), false).unwrap();
        let sol = Solution::new(SolutionKind::CO3, vec![ex(int(0)), ex(int(1))]);
        let back = map_cls_local_solution_to_banach(&src, &sol).unwrap();
        assert_eq!(back.kind, SolutionKind::Oe);
        assert_eq!(back.witnesses.len(), 1);
    }

    #[test]
    fn kappa_examples() {
        let k = build_kappa_circuit(&zero_potential(), &rat(1, 3));
        assert!(k.evaluate_scalar(&Point::pair_inputs(&ex(int(1)), &Point::origin())).unwrap().is_zero());
        let k = build_kappa_circuit(&linear_potential(int(1)), &rat(1, 2));
        let xy = Point::pair_inputs(&ex(int(1)), &ex(rat(1, 2)));
        let yx = Point::pair_inputs(&ex(rat(1, 2)), &ex(int(1)));
        assert_eq!(k.evaluate_scalar(&xy).unwrap(), int(-2));
        assert_eq!(k.evaluate_scalar(&yx).unwrap(), int(-2));
    }

    #[test]
    fn metric_circuit_examples() {
        let c = rat(9, 10);
        let d = build_interpolated_metric_circuit(&zero_potential(), &rat(1, 4), &c, InterpolationRule::Printed).unwrap();
        let dist = CircuitFn::new(d.clone(), 1).is_err();
        assert!(dist, "metric circuits take six inputs");
        let x = Point::new(rat(1, 3), int(0), int(1));
        assert!(d.evaluate_scalar(&Point::pair_inputs(&x, &x)).unwrap().is_zero());
        assert_eq!(d.evaluate_scalar(&Point::pair_inputs(&x, &Point::origin())).unwrap(), int(1));

        // p(x) = 3ε/2, p(y) = 2ε with ε = 1/4: κ = −2 and B(−2) = c^(−2)
        let eps = rat(1, 4);
        let p = linear_potential(int(1));
        let d = build_interpolated_metric_circuit(&p, &eps, &c, InterpolationRule::Printed).unwrap();
        let (x, y) = (ex(rat(3, 8)), ex(rat(1, 2)));
        assert_eq!(d.evaluate_scalar(&Point::pair_inputs(&x, &y)).unwrap(), rat(100, 81));

        assert!(build_interpolated_metric_circuit(&p, &int(0), &c, InterpolationRule::Printed).is_err());
        assert!(build_interpolated_metric_circuit(&p, &eps, &int(1), InterpolationRule::Printed).is_err());
    }

    #[test]
    fn metric_circuit_agrees_with_formula() {
        let eps = rat(1, 4);
        let c = rat(39, 40);
        let p = linear_potential(int(1));
        for rule in [InterpolationRule::Printed, InterpolationRule::Chord] {
            let d = build_interpolated_metric_circuit(&p, &eps, &c, rule).unwrap();
            for i in 0..=16 {
                for j in 0..=16 {
                    let (x, y) = (ex(rat(i, 16)), ex(rat(j, 16)));
                    let expected = if i == j {
                        int(0)
                    } else {
                        let kappa = -(rat(i.max(j), 16)) / &eps;
                        interpolation_reference(&kappa, &c, rule)
                    };
                    assert_eq!(d.evaluate_scalar(&Point::pair_inputs(&x, &y)).unwrap(), expected);
                }
            }
        }
        let single = build_interpolation_circuit(&c, &eps.recip(), InterpolationRule::Printed).unwrap();
        assert_eq!(single.input_arity(), 1);
    }

    #[test]
    fn hardness_constants() {
        let src = ClsLocalInstance::new(identity(), zero_potential(), int(1), int(1)).unwrap();
        let art = reduce_cls_local_to_banach(&src, HardnessOptions::default()).unwrap();
        let params = art.hardness.as_ref().unwrap();
        assert_eq!(params.c_prime, rat(9, 10));
        assert_eq!(params.eps_prime, rat(10, 9));
        assert_eq!(params.lambda_prime, int(1));
        assert_eq!(art.produced.tag(), "banach-met");
        assert_eq!(art.provenance.constants["c_prime"], "9/10");

        let big = ClsLocalInstance::new(identity(), zero_potential(), int(10), int(1)).unwrap();
        assert!(matches!(
            reduce_cls_local_to_banach(&big, HardnessOptions::default()),
            Err(ReduceError::EpsTooLarge(_))
        ));
        let seven = ClsLocalInstance::new(identity(), zero_potential(), int(7), int(1)).unwrap();
        let art = reduce_cls_local_to_banach(&seven, HardnessOptions::default()).unwrap();
        assert_eq!(art.produced.tag(), "banach");
        let halved = reduce_cls_local_to_banach(
            &seven,
            HardnessOptions {
                halve_eps: true,
                rule: InterpolationRule::Printed,
            },
        )
        .unwrap();
        assert_eq!(halved.hardness.unwrap().eps_used, rat(7, 2));
        assert_eq!(halved.produced.tag(), "banach-met");
    }

    #[test]
    fn lipschitz_bound_matches_float() {
        for (c, lambda, eps) in [(rat(9, 10), int(1), int(1)), (rat(159, 160), int(3), rat(1, 16)), (rat(19, 20), rat(1, 2), rat(1, 2))] {
            let got = lipschitz_bound(&c, &lambda, &eps);
            let (cf, lf, ef) = (
                crate::rational::to_f64(&c),
                crate::rational::to_f64(&lambda),
                crate::rational::to_f64(&eps),
            );
            let expected = (cf.powf(-1.0 / ef) * lf * (1.0 / cf).ln() / ef).ceil();
            assert_eq!(crate::rational::to_f64(&got), expected);
        }
    }

    #[test]
    fn hardness_back_map_oa() {
        // f = identity is a fixed point everywhere, so d(x, f(x)) = 0
        let src = ClsLocalInstance::new(identity(), linear_potential(int(1)), rat(1, 4), int(1)).unwrap();
        let art = reduce_cls_local_to_banach(&src, HardnessOptions::default()).unwrap();
        let Instance::Banach(t) = &art.produced else { panic!() };
        let x = ex(rat(3, 4));
        let oa = Solution::new(SolutionKind::Oa, vec![x.clone()]);
        assert!(verify_banach(t, &oa).accepted());
        let back = map_banach_solution_to_cls_local(&src, &art, &oa).unwrap();
        assert_eq!(back, Solution::new(SolutionKind::CO1, vec![x]));
    }

    #[test]
    fn back_map_failures_carry_the_replay() {
        let src = ClsLocalInstance::new(halving(), linear_potential(int(1)), rat(1, 100), int(1)).unwrap();
        let art = reduce_cls_local_to_banach(&src, HardnessOptions::default()).unwrap();
        // not a real Oa of the target, so CO1 at x fails at the source
        let bogus = Solution::new(SolutionKind::Oa, vec![ex(int(1))]);
        let err = map_banach_solution_to_cls_local(&src, &art, &bogus).unwrap_err();
        assert_eq!(err.attempts.len(), 1);
        assert_eq!(err.attempts[0].outcome, Outcome::Reject(crate::cls::RejectReason::InequalityFails));
        assert!(err.trace().contains("REJECT CO1"));
    }

    #[test]
    fn constant_potential_gives_scaled_discrete_metric() {
        let mut b = CircuitBuilder::new();
        let _ = b.inputs(3);
        let k = b.constant(rat(1, 3));
        let p = b.finish(&[k]).unwrap();
        let src = ClsLocalInstance::new(halving(), p, rat(1, 4), int(1)).unwrap();
        let art = reduce_cls_local_to_banach(&src, HardnessOptions::default()).unwrap();
        let pts = crate::cls::grid_points(2);
        let triples: Vec<[Point; 3]> = pts
            .iter()
            .zip(pts.iter().skip(1))
            .zip(pts.iter().skip(5))
            .map(|((a, b), c)| [a.clone(), b.clone(), c.clone()])
            .collect();
        let report = certify_constructed_metric(&src, &art, &triples).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.triples_checked, triples.len());
    }
}
