//! Certified rational enclosures for `ln` and `exp`.
//!
//! Used where an exact constant must be derived from a transcendental
//! expression, e.g. the Lipschitz constant of the reduction metric. Every
//! enclosure `[lo, hi]` provably contains the true value.

use crate::rational::{ceil_int, int, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(v: Rational) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Product of two intervals with non-negative endpoints.
    pub fn mul_nonneg(&self, other: &Interval) -> Interval {
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Interval {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
        }
    }

    pub fn scale_nonneg(&self, k: &Rational) -> Interval {
        debug_assert!(!k.is_negative());
        Interval {
            lo: &self.lo * k,
            hi: &self.hi * k,
        }
    }
}

/// Enclosure of `ln(z)` for `z >= 1` using `terms` terms of the atanh series
/// `ln z = 2 Σ s^(2k+1)/(2k+1)`, `s = (z-1)/(z+1)`.
pub fn ln_enclosure(z: &Rational, terms: usize) -> Interval {
    assert!(z >= &Rational::one(), "ln_enclosure needs z >= 1");
    let s = (z - Rational::one()) / (z + Rational::one());
    if s.is_zero() {
        return Interval::point(Rational::zero());
    }
    let s2 = &s * &s;
    let mut power = s.clone();
    let mut sum = Rational::zero();
    for k in 0..terms {
        sum += &power / int(2 * k as i64 + 1);
        power *= &s2;
    }
    // The remaining terms are bounded by a geometric series in s².
    let tail = &power / (int(2 * terms as i64 + 1) * (Rational::one() - &s2));
    let two = int(2);
    Interval {
        lo: &sum * &two,
        hi: (sum + tail) * two,
    }
}

/// Enclosure of `exp(a)` for `a >= 0` from the Taylor series with `terms`
/// terms and a geometric tail bound. `terms` is raised as needed so that the
/// tail ratio `a/(terms+1)` stays below one.
pub fn exp_enclosure(a: &Rational, terms: usize) -> Interval {
    assert!(!a.is_negative(), "exp_enclosure needs a >= 0");
    let min_terms = ceil_int(a).to_usize().expect("exponent argument too large") + 2;
    let terms = terms.max(min_terms);
    let mut term = Rational::one();
    let mut sum = Rational::zero();
    for k in 0..terms {
        sum += &term;
        term = term * a / int(k as i64 + 1);
    }
    // term == a^terms / terms!; later terms shrink by at least a/(terms+1).
    let ratio = a / int(terms as i64 + 1);
    let tail = &term / (Rational::one() - ratio);
    Interval {
        lo: sum.clone(),
        hi: sum + tail,
    }
}

/// `exp` over an interval argument with non-negative endpoints.
pub fn exp_interval(arg: &Interval, terms: usize) -> Interval {
    Interval {
        lo: exp_enclosure(&arg.lo, terms).lo,
        hi: exp_enclosure(&arg.hi, terms).hi,
    }
}

/// Certified ceiling of a quantity known only through enclosures.
///
/// `enclose(terms)` must return an interval containing the true value for
/// every `terms`. Precision doubles until both endpoints share a ceiling;
/// if that never happens (the value sits on an integer) the ceiling of the
/// upper endpoint is returned, which is still a valid upper bound.
pub fn certified_ceil(mut enclose: impl FnMut(usize) -> Interval) -> BigInt {
    let mut terms = 8;
    let mut last = enclose(terms);
    while terms <= 512 {
        if ceil_int(&last.lo) == ceil_int(&last.hi) {
            return ceil_int(&last.hi);
        }
        terms *= 2;
        last = enclose(terms);
    }
    ceil_int(&last.hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, to_f64};

    #[test]
    fn ln_enclosure_brackets_float_value() {
        for (n, d) in [(10, 9), (2, 1), (40, 39), (7, 3), (3, 1)] {
            let z = rat(n, d);
            let iv = ln_enclosure(&z, 30);
            let expected = (n as f64 / d as f64).ln();
            assert!(to_f64(&iv.lo) <= expected + 1e-15, "{n}/{d}");
            assert!(to_f64(&iv.hi) >= expected - 1e-15, "{n}/{d}");
            assert!(to_f64(&iv.width()) < 1e-6, "{n}/{d}");
        }
        assert_eq!(ln_enclosure(&int(1), 5), Interval::point(int(0)));
    }

    #[test]
    fn exp_enclosure_brackets_float_value() {
        for (n, d) in [(0, 1), (1, 1), (1, 9), (21, 2), (10, 1)] {
            let a = rat(n, d);
            let iv = exp_enclosure(&a, 40);
            let expected = (n as f64 / d as f64).exp();
            assert!(to_f64(&iv.lo) <= expected * (1.0 + 1e-14));
            assert!(to_f64(&iv.hi) >= expected * (1.0 - 1e-14));
            assert!(to_f64(&iv.width()) / expected < 1e-8);
        }
    }

    #[test]
    fn enclosures_tighten_with_terms() {
        let z = rat(10, 9);
        assert!(ln_enclosure(&z, 4).width() > ln_enclosure(&z, 8).width());
        let a = rat(3, 1);
        assert!(exp_enclosure(&a, 8).width() > exp_enclosure(&a, 16).width());
    }

    #[test]
    fn ceiling_of_ln_ten_ninths() {
        // (10/9) * ln(10/9) ≈ 0.1171
        let c = certified_ceil(|t| ln_enclosure(&rat(10, 9), t).scale_nonneg(&rat(10, 9)));
        assert_eq!(c, BigInt::from(1));
        // 100 * ln 2 ≈ 69.3147
        let c = certified_ceil(|t| ln_enclosure(&int(2), t).scale_nonneg(&int(100)));
        assert_eq!(c, BigInt::from(70));
    }
}
