//! The basic iterative procedure `x_{t+1} = f(x_t)` and a-priori iteration
//! budgets for synthesized contraction metrics.
//!
//! Budgets use base-2 logarithms. The local-contraction budget contains an
//! additive `+ 1` inside the numerator, which is `log 2` and therefore only
//! consistent with base 2; the global budget is base-agnostic.

use crate::metrics::{Distance, PointMap};
use crate::point::Point;
use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use std::collections::HashSet;
use std::fmt::{self, Display, Write as _};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StopReason {
    ResidualBelowEps,
    MaxIters,
    CycleDetected,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::ResidualBelowEps => "RESIDUAL_BELOW_EPS",
            StopReason::MaxIters => "MAX_ITERS",
            StopReason::CycleDetected => "CYCLE_DETECTED",
        })
    }
}

/// `points = x_0 .. x_{t+1}`, `residuals[s] = d(x_s, x_{s+1})` for `s <= t`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<P, R> {
    pub points: Vec<P>,
    pub residuals: Vec<R>,
    pub stop_reason: StopReason,
}

pub type ExactTrace = IterationTrace<Point, Rational>;
pub type FloatTrace = IterationTrace<Vec<f64>, f64>;

impl<P, R> IterationTrace<P, R> {
    /// Index `t` of the last residual evaluated.
    pub fn stop_index(&self) -> usize {
        self.residuals.len() - 1
    }

    pub fn final_residual(&self) -> &R {
        self.residuals.last().expect("at least one step")
    }

    /// The point whose residual triggered the stop.
    pub fn stop_point(&self) -> &P {
        &self.points[self.stop_index()]
    }
}

/// CSV row formatting for trace points.
pub trait CsvCoords {
    fn csv_fields(&self) -> Vec<String>;
}

impl CsvCoords for Point {
    fn csv_fields(&self) -> Vec<String> {
        self.0.iter().map(|c| c.to_string()).collect()
    }
}

impl CsvCoords for Vec<f64> {
    fn csv_fields(&self) -> Vec<String> {
        self.iter().map(|c| format!("{c:e}")).collect()
    }
}

impl<P: CsvCoords, R: Display> IterationTrace<P, R> {
    /// `step,x1,..,xk,residual`, one row per evaluated residual.
    pub fn to_csv(&self) -> String {
        let dim = self.points.first().map_or(0, |p| p.csv_fields().len());
        let mut out = String::from("step");
        for i in 1..=dim {
            write!(out, ",x{i}").expect("writing to a String");
        }
        out.push_str(",residual\n");
        for (t, r) in self.residuals.iter().enumerate() {
            let fields = self.points[t].csv_fields().join(",");
            writeln!(out, "{t},{fields},{r}").expect("writing to a String");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IterationError {
    #[error("epsilon must be positive")]
    NonPositiveEps,
    #[error("max_iters must be at least 1")]
    ZeroBudget,
    #[error("non-finite value at step {step}")]
    NonFinite { step: usize },
}

/// Exact iteration. A revisited point with residual above `eps` can never
/// converge and stops with [`StopReason::CycleDetected`].
pub fn run_bip(
    f: &dyn PointMap,
    x0: Point,
    d: &dyn Distance,
    eps: &Rational,
    max_iters: usize,
) -> Result<ExactTrace, IterationError> {
    if !eps.is_positive() {
        return Err(IterationError::NonPositiveEps);
    }
    if max_iters == 0 {
        return Err(IterationError::ZeroBudget);
    }
    let mut seen = HashSet::new();
    let mut points = vec![x0];
    let mut residuals = Vec::new();
    let stop_reason = loop {
        let x = points.last().expect("nonempty").clone();
        let next = f.apply(&x);
        let r = d.distance(&x, &next);
        let done = &r <= eps;
        residuals.push(r);
        seen.insert(x);
        let revisit = seen.contains(&next);
        points.push(next);
        if done {
            break StopReason::ResidualBelowEps;
        }
        if revisit {
            break StopReason::CycleDetected;
        }
        if residuals.len() >= max_iters {
            break StopReason::MaxIters;
        }
    };
    Ok(IterationTrace {
        points,
        residuals,
        stop_reason,
    })
}

/// Steps without a new minimum residual before float iteration gives up.
pub const STAGNATION_WINDOW: usize = 50;

/// Floating-point iteration, stopping on stagnation of the residual.
pub fn run_bip_f64<F, D>(
    f: F,
    x0: Vec<f64>,
    d: D,
    eps: f64,
    max_iters: usize,
) -> Result<FloatTrace, IterationError>
where
    F: Fn(&[f64]) -> Vec<f64>,
    D: Fn(&[f64], &[f64]) -> f64,
{
    if !(eps > 0.0) {
        return Err(IterationError::NonPositiveEps);
    }
    if max_iters == 0 {
        return Err(IterationError::ZeroBudget);
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(IterationError::NonFinite { step: 0 });
    }
    let mut points = vec![x0];
    let mut residuals: Vec<f64> = Vec::new();
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    let stop_reason = loop {
        let t = residuals.len();
        let x = points.last().expect("nonempty");
        let next = f(x);
        let r = d(x, &next);
        if !r.is_finite() || next.iter().any(|v| !v.is_finite()) {
            return Err(IterationError::NonFinite { step: t + 1 });
        }
        residuals.push(r);
        points.push(next);
        if r <= eps {
            break StopReason::ResidualBelowEps;
        }
        if r < best {
            best = r;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= STAGNATION_WINDOW {
                break StopReason::CycleDetected;
            }
        }
        if residuals.len() >= max_iters {
            break StopReason::MaxIters;
        }
    };
    Ok(IterationTrace {
        points,
        residuals,
        stop_reason,
    })
}

/// Number of applications of `f` until `target` holds, if within `max_steps`.
pub fn steps_until<P: Clone>(
    f: impl Fn(&P) -> P,
    x0: &P,
    target: impl Fn(&P) -> bool,
    max_steps: usize,
) -> Option<usize> {
    let mut x = x0.clone();
    for t in 0..=max_steps {
        if target(&x) {
            return Some(t);
        }
        if t < max_steps {
            x = f(&x);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationBudget {
    /// Formula value before rounding, possibly negative.
    pub predicted_steps: f64,
    /// `max(0, ⌈predicted_steps⌉)`, tolerant to float noise just above an integer.
    pub steps: u64,
    pub d0: Rational,
    pub c: Rational,
    pub eps: Rational,
    pub delta: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BudgetError {
    #[error("contraction factor {0} must lie strictly between 0 and 1")]
    Factor(Rational),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: Rational },
}

const CEIL_SLACK: f64 = 1e-9;

fn bigint_log2(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().expect("finite").log2() + shift as f64
}

/// `log₂ r` for positive rationals of any size.
pub fn log2_rational(r: &Rational) -> f64 {
    bigint_log2(r.numer()) - bigint_log2(r.denom())
}

fn positive(name: &'static str, value: &Rational) -> Result<(), BudgetError> {
    if value.is_positive() {
        Ok(())
    } else {
        Err(BudgetError::NonPositive {
            name,
            value: value.clone(),
        })
    }
}

fn check_factor(c: &Rational) -> Result<(), BudgetError> {
    if c.is_positive() && c < &Rational::one() {
        Ok(())
    } else {
        Err(BudgetError::Factor(c.clone()))
    }
}

fn ceil_steps(x: f64) -> u64 {
    let s = (x - CEIL_SLACK).ceil();
    if s <= 0.0 {
        0
    } else {
        s as u64
    }
}

/// Global budget `(log d₀ + log((2 − 2c)/ε)) / log(1/c)`, where `d₀` is
/// measured in the metric synthesized for radius `ε/2`.
pub fn predict_global_budget(
    d0: &Rational,
    c: &Rational,
    eps: &Rational,
) -> Result<IterationBudget, BudgetError> {
    check_factor(c)?;
    positive("d0", d0)?;
    positive("eps", eps)?;
    let two = Rational::from_integer(2.into());
    let slack = (&two - &two * c) / eps;
    let predicted = (log2_rational(d0) + log2_rational(&slack)) / log2_rational(&c.recip());
    Ok(IterationBudget {
        predicted_steps: predicted,
        steps: ceil_steps(predicted),
        d0: d0.clone(),
        c: c.clone(),
        eps: eps.clone(),
        delta: None,
    })
}

/// Local budget `(log d₀ + log(1/ε) + log(1 − c) + 1) / log(1/c) + 1`, with
/// `d₀` measured in the metric synthesized for radius `δ/2`.
pub fn predict_local_budget(
    d0: &Rational,
    c: &Rational,
    eps: &Rational,
    delta: &Rational,
) -> Result<IterationBudget, BudgetError> {
    check_factor(c)?;
    positive("d0", d0)?;
    positive("eps", eps)?;
    positive("delta", delta)?;
    let numerator = log2_rational(d0) + log2_rational(&eps.recip())
        + log2_rational(&(Rational::one() - c))
        + 1.0;
    let predicted = numerator / log2_rational(&c.recip()) + 1.0;
    Ok(IterationBudget {
        predicted_steps: predicted,
        steps: ceil_steps(predicted),
        d0: d0.clone(),
        c: c.clone(),
        eps: eps.clone(),
        delta: Some(delta.clone()),
    })
}
