//! Exact rational rates and their decadic orders of magnitude.
//!
//! Every rate and time in the abstraction is kept as an exact rational so
//! that magnitude comparisons never depend on binary rounding. The magnitude
//! of a rate is `floor(log10(rate))`; the magnitude of a time is the negated
//! magnitude of the corresponding rate, so a waiting time of `1/0.05 = 20`
//! has magnitude 2 ("roughly 100").

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact non-negative rational used for rates, times and probabilities.
pub type Exact = BigRational;

/// `10^k` as an exact rational, for any sign of `k`.
pub fn pow10(k: i32) -> Exact {
    let p = num::pow(BigInt::from(10u32), k.unsigned_abs() as usize);
    if k >= 0 {
        Exact::from_integer(p)
    } else {
        Exact::new(BigInt::one(), p)
    }
}

/// Decadic order of magnitude `floor(log10(value))` of a positive rational.
///
/// The ratio need not be in lowest terms.
pub fn magnitude(value: &Exact) -> Result<i32> {
    if !value.is_positive() {
        return Err(Error::NonPositive(format_exact(value)));
    }
    let (n, d) = (value.numer().abs(), value.denom().abs());
    // n / d >= 10^k
    let at_least = |k: i32| {
        let p = num::pow(BigInt::from(10u32), k.unsigned_abs() as usize);
        if k >= 0 {
            n >= &d * p
        } else {
            &n * p >= d
        }
    };
    let bits = n.bits() as i64 - d.bits() as i64;
    let mut k = (bits as f64 * std::f64::consts::LOG10_2).floor() as i32;
    while !at_least(k) {
        k -= 1;
    }
    while at_least(k + 1) {
        k += 1;
    }
    Ok(k)
}

/// Magnitude of a time span: `-magnitude(1/time)`.
///
/// A zero time (e.g. an empty transient path) has no magnitude.
pub fn time_magnitude(time: &Exact) -> Option<i32> {
    if !time.is_positive() {
        return None;
    }
    magnitude(&time.recip()).ok().map(|m| -m)
}

/// Parses a decimal literal such as `0.0015`, `7e-6` or `1.99` exactly.
pub fn parse_decimal(text: &str) -> Option<Exact> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Exact::from_integer(digits.parse::<BigInt>().ok()?);
    value *= pow10(exponent - frac_part.len() as i32);
    if negative {
        value = -value;
    }
    Some(value)
}

/// Exact rational from a finite float (binary expansion, no rounding).
pub fn from_f64(value: f64) -> Option<Exact> {
    Exact::from_float(value)
}

pub fn to_f64(value: &Exact) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let shift = value.numer().bits().max(value.denom().bits()) as i64 - 900;
        if shift <= 0 {
            return f64::NAN;
        }
        let n = value.numer() >> shift as usize;
        let d = value.denom() >> shift as usize;
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    })
}

/// `p/q` (or `p` for integers) rendering used in reports.
pub fn format_exact(value: &Exact) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses the `p/q` rendering back.
pub fn parse_exact(text: &str) -> Option<Exact> {
    match text.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Exact::new(n.trim().parse().ok()?, d))
        }
        None => Some(Exact::from_integer(text.trim().parse().ok()?)),
    }
}

/// A quantity reported both exactly and at magnitude resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quantity {
    pub exact: Exact,
    pub magnitude: Option<i32>,
}

impl Quantity {
    /// A rate or probability: magnitude is `floor(log10)`.
    pub fn rate(exact: Exact) -> Self {
        let magnitude = magnitude(&exact).ok();
        Quantity { exact, magnitude }
    }

    /// A time span: magnitude is `-floor(log10(1/t))`.
    pub fn time(exact: Exact) -> Self {
        let magnitude = time_magnitude(&exact);
        Quantity { exact, magnitude }
    }

    pub fn zero_time() -> Self {
        Quantity { exact: Exact::zero(), magnitude: None }
    }

    pub fn value(&self) -> f64 {
        to_f64(&self.exact)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.magnitude {
            Some(m) => write!(f, "10^{m} ({})", format_exact(&self.exact)),
            None => write!(f, "0"),
        }
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Quantity", 3)?;
        s.serialize_field("exact", &format_exact(&self.exact))?;
        s.serialize_field("magnitude", &self.magnitude)?;
        s.serialize_field("approx", &self.value())?;
        s.end()
    }
}
