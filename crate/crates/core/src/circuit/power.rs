//! Powers with a circuit-computed exponent, and the piecewise-linear power
//! interpolation `B(w)` used by the CLS-hardness metric.
//!
//! Gates cannot branch, so an integer exponent `e` is decomposed into binary
//! digits with `gt`/`sub` gates, the squarings `base^(2^i)` are built by
//! repeated `mul`, and each digit selects its squaring via
//! `1 + digit·(base^(2^i) − 1)`.

use super::{Circuit, CircuitBuilder, Wire};
use crate::rational::{bit_length, ceil_int, int, pow, Rational};
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PowerCircuitError {
    #[error("base {0} must lie strictly between 0 and 1")]
    BaseOutOfRange(Rational),
    #[error("max exponent must be at least 1")]
    ExponentBound,
    #[error("magnitude bound {0} must be positive")]
    MagnitudeBound(Rational),
}

/// Binary digits of `value ∈ [0, 2^bits)`, least significant first, plus the
/// remainder `value − ⌊value⌋`.
pub(crate) fn extract_bits(b: &mut CircuitBuilder, value: Wire, bits: u32) -> (Vec<Wire>, Wire) {
    let mut rest = value;
    let mut digits = vec![None; bits as usize];
    for i in (0..bits).rev() {
        let weight = b.constant(pow(&int(2), i as i64));
        let digit = b.ge(rest, weight);
        let taken = b.mul(digit, weight);
        rest = b.sub(rest, taken);
        digits[i as usize] = Some(digit);
    }
    (digits.into_iter().map(|d| d.expect("every digit set")).collect(), rest)
}

/// `base^(Σ digit_i 2^i)` from 0/1 digit wires.
pub(crate) fn power_from_bits(b: &mut CircuitBuilder, base: &Rational, digits: &[Wire]) -> Wire {
    let one = b.constant(Rational::one());
    let mut square = b.constant(base.clone());
    let mut acc = one;
    for (i, &digit) in digits.iter().enumerate() {
        if i > 0 {
            square = b.mul(square, square);
        }
        let delta = b.sub(square, one);
        let picked = b.mul(digit, delta);
        let factor = b.add(one, picked);
        acc = b.mul(acc, factor);
    }
    acc
}

/// One-input circuit computing `c^e` for integer `0 <= e <= max_exponent`.
pub fn build_power_circuit(c: &Rational, max_exponent: u64) -> Result<Circuit, PowerCircuitError> {
    if !c.is_positive() || c >= &Rational::one() {
        return Err(PowerCircuitError::BaseOutOfRange(c.clone()));
    }
    if max_exponent < 1 {
        return Err(PowerCircuitError::ExponentBound);
    }
    let mut b = CircuitBuilder::new();
    let e = b.input();
    let (digits, _) = extract_bits(&mut b, e, bit_length(max_exponent));
    let out = power_from_bits(&mut b, c, &digits);
    Ok(b.finish(&[out]).expect("builder output is well formed"))
}

/// Which pair of neighbouring powers `B(w)` interpolates between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum InterpolationRule {
    /// `(1 − (⌈w⌉ − w))·c^⌈w⌉ + (⌈w⌉ − w)·c^(⌈w⌉+1)`, so
    /// `c^(⌈w⌉+1) <= B(w) <= c^⌈w⌉`. Jumps at integers.
    #[default]
    Printed,
    /// `(1 − (⌈w⌉ − w))·c^⌈w⌉ + (⌈w⌉ − w)·c^(⌈w⌉−1)`: the chord of `c^w`,
    /// continuous and non-increasing, with `c^w <= B(w)`.
    Chord,
}

impl InterpolationRule {
    fn neighbour_factor(self, c: &Rational) -> Rational {
        match self {
            InterpolationRule::Printed => c.clone(),
            InterpolationRule::Chord => c.recip(),
        }
    }
}

/// Direct evaluation of `B(w)` for `w <= 0` straight from the formula.
pub fn interpolation_reference(w: &Rational, c: &Rational, rule: InterpolationRule) -> Rational {
    let k = ceil_int(w).to_i64().expect("exponent fits in i64");
    let frac = Rational::from_integer(k.into()) - w;
    let base = pow(c, k);
    let other = &base * rule.neighbour_factor(c);
    (Rational::one() - &frac) * base + frac * other
}

/// Emits `B(w)` for `w ∈ [−magnitude, 0]`; `w` is clamped into that range.
pub(crate) fn interpolation_wire(
    b: &mut CircuitBuilder,
    w: Wire,
    c: &Rational,
    magnitude: &Rational,
    rule: InterpolationRule,
) -> Wire {
    let u = b.neg(w);
    let u = b.clamp(u, Rational::zero(), magnitude.clone());
    let bits = bit_length(ceil_int(magnitude).to_u64().expect("magnitude fits in u64"));
    // digits encode ⌊u⌋ = −⌈w⌉, the remainder is ⌈w⌉ − w
    let (digits, frac) = extract_bits(b, u, bits);
    let base = power_from_bits(b, &c.recip(), &digits);
    let other = b.scale(base, rule.neighbour_factor(c));
    let one = b.constant(Rational::one());
    let keep = b.sub(one, frac);
    let lhs = b.mul(keep, base);
    let rhs = b.mul(frac, other);
    b.add(lhs, rhs)
}

/// One-input circuit for `B(w)` on `[−magnitude, 0]`.
pub fn build_interpolation_circuit(
    c: &Rational,
    magnitude: &Rational,
    rule: InterpolationRule,
) -> Result<Circuit, PowerCircuitError> {
    if !c.is_positive() || c >= &Rational::one() {
        return Err(PowerCircuitError::BaseOutOfRange(c.clone()));
    }
    if !magnitude.is_positive() {
        return Err(PowerCircuitError::MagnitudeBound(magnitude.clone()));
    }
    let mut b = CircuitBuilder::new();
    let w = b.input();
    let out = interpolation_wire(&mut b, w, c, magnitude, rule);
    Ok(b.finish(&[out]).expect("builder output is well formed"))
}
