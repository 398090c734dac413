//! Exact and floating-point helpers shared across modules.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// A fraction `numerator / 2^exponent`; every normalized Hamming quantity on
/// `{0,1}^n` has this form with `exponent = n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicFraction {
    numerator: BigUint,
    exponent: u32,
}

impl DyadicFraction {
    pub fn new(numerator: impl Into<BigUint>, exponent: u32) -> Self {
        Self { numerator: numerator.into(), exponent }
    }

    pub fn zero(exponent: u32) -> Self {
        Self::new(BigUint::zero(), exponent)
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.numerator.bits();
        if bits == 0 {
            return 0.0;
        }
        // keep 64 significant bits before converting
        let shift = bits.saturating_sub(64);
        let mantissa = (&self.numerator >> shift).to_f64().unwrap_or(f64::INFINITY);
        let e = shift as i64 - self.exponent as i64;
        mantissa * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }
}

impl Ord for DyadicFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &other.numerator << (e - other.exponent);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl Serialize for DyadicFraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("DyadicFraction", 3)?;
        s.serialize_field("numerator", &self.numerator.to_string())?;
        s.serialize_field("log2_denominator", &self.exponent)?;
        s.serialize_field("value", &self.to_f64())?;
        s.end()
    }
}

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for i in 0..n {
        let next = &row[i] * BigUint::from(n - i) / BigUint::from(i + 1);
        row.push(next);
    }
    row
}

/// Exact binomial coefficient, `None` on overflow.
pub fn binom_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `Pr[|x| = i]` for uniform `x` in `{0,1}^n`, for every level `i`.
///
/// Ratios of consecutive binomials relative to the central level, then
/// normalized; far tails underflow to 0.
pub fn level_probabilities(n: usize) -> Vec<f64> {
    let mid = n / 2;
    let mut w = vec![0.0f64; n + 1];
    w[mid] = 1.0;
    for i in mid..n {
        w[i + 1] = w[i] * (n - i) as f64 / (i + 1) as f64;
    }
    for i in (1..=mid).rev() {
        w[i - 1] = w[i] * i as f64 / (n - i + 1) as f64;
    }
    // sum from the tails in
    let total: f64 = w[..mid].iter().sum::<f64>() + w[mid..].iter().rev().sum::<f64>();
    w.iter().map(|x| x / total).collect()
}

/// Nearest integer, ties toward negative infinity.
pub fn round_half_down(x: f64) -> i64 {
    (x - 0.5).ceil() as i64
}

/// Nearest integer, ties toward positive infinity.
pub fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}
