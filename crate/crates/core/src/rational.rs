//! Exact non-negative rational values.
//!
//! Trust levels, thresholds, probabilities, and metric rates are all ratios
//! of event counters. They are kept as exact `u64` numerator/denominator
//! pairs so that threshold comparisons and tie-breaks never depend on
//! floating-point rounding.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RationalError {
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("value does not fit in 64-bit rational: {0:?}")]
    Overflow(String),
}

/// A non-negative rational number with exact comparison semantics.
///
/// Always stored in reduced form. Accepted textual forms are `"n/d"`,
/// a bare integer `"n"`, and a decimal string such as `"0.5"` (converted
/// exactly, e.g. `0.5 -> 1/2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<u64>);

impl Rational {
    pub fn new(numer: u64, denom: u64) -> Result<Self, RationalError> {
        if denom == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Rational(Ratio::new(numer, denom)))
    }

    pub const fn zero() -> Self {
        Rational(Ratio::new_raw(0, 1))
    }

    pub const fn one() -> Self {
        Rational(Ratio::new_raw(1, 1))
    }

    pub fn from_integer(n: u64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    /// Renders the value as a decimal with exactly six fractional digits,
    /// rounding half away from zero. Used by the CSV exports.
    pub fn to_decimal_6(&self) -> String {
        let scaled = self.numer() as u128 * 1_000_000;
        let d = self.denom() as u128;
        let mut q = scaled / d;
        let r = scaled % d;
        if r * 2 >= d {
            q += 1;
        }
        format!("{}.{:06}", q / 1_000_000, q % 1_000_000)
    }
}

impl fmt::Display for Rational {
    /// Always prints an explicit denominator, e.g. `1/1`, `3/1`, `1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(RationalError::Parse(s.to_string()));
        }
        if let Some((n, d)) = s.split_once('/') {
            let numer = parse_u64(n.trim(), s)?;
            let denom = parse_u64(d.trim(), s)?;
            return Rational::new(numer, denom);
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let int_part = if int_part.is_empty() { "0" } else { int_part };
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(RationalError::Parse(s.to_string()));
            }
            let int = parse_u64(int_part, s)?;
            let frac = parse_u64(frac_part, s)?;
            let denom = 10u64
                .checked_pow(frac_part.len() as u32)
                .ok_or_else(|| RationalError::Overflow(s.to_string()))?;
            let numer = int
                .checked_mul(denom)
                .and_then(|v| v.checked_add(frac))
                .ok_or_else(|| RationalError::Overflow(s.to_string()))?;
            return Rational::new(numer, denom);
        }
        Ok(Rational::from_integer(parse_u64(s, s)?))
    }
}

fn parse_u64(digits: &str, whole: &str) -> Result<u64, RationalError> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(RationalError::Parse(whole.to_string()));
    }
    digits
        .parse::<u64>()
        .map_err(|_| RationalError::Overflow(whole.to_string()))
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

struct RationalVisitor;

impl Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a rational as \"n/d\", a decimal string, or a non-negative number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
        v.parse().map_err(de::Error::custom)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        Ok(Rational::from_integer(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        u64::try_from(v)
            .map(Rational::from_integer)
            .map_err(|_| de::Error::custom("rational must be non-negative"))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
        if !v.is_finite() || v < 0.0 {
            return Err(de::Error::custom(
                "rational must be a finite non-negative number",
            ));
        }
        // Rust's shortest round-trip formatting recovers the decimal literal
        // that produced the float, so e.g. 0.4 parses exactly as 2/5.
        format!("{v}").parse().map_err(de::Error::custom)
    }
}
