//! Exact rational arithmetic helpers.
//!
//! All costs, profits and limits are arbitrary-precision rationals so that
//! feasibility checks and power-of-two rounding are exact. Hot loops (dynamic
//! programs, the exact oracle) work on integer views obtained by scaling a set
//! of rationals to a common denominator.

use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{QkpError, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `2^e` for any integer exponent.
pub fn pow2(e: i64) -> Rational {
    let mag = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

/// Largest `e` with `2^e <= x`. `x` must be positive.
pub fn floor_log2(x: &Rational) -> i64 {
    assert!(x.is_positive(), "floor_log2 of non-positive value");
    let e0 = x.numer().bits() as i64 - x.denom().bits() as i64;
    if *x >= pow2(e0) {
        e0
    } else {
        e0 - 1
    }
}

/// Smallest `e` with `2^e >= x`. `x` must be positive.
pub fn ceil_log2(x: &Rational) -> i64 {
    let f = floor_log2(x);
    if *x == pow2(f) {
        f
    } else {
        f + 1
    }
}

/// `floor(log2(n))` for a positive integer.
pub fn floor_log2_u64(n: u64) -> i64 {
    assert!(n > 0);
    63 - n.leading_zeros() as i64
}

/// Floor of a rational as a `u64`, saturating at zero and `u64::MAX`.
pub fn floor_u64(x: &Rational) -> u64 {
    if !x.is_positive() {
        return 0;
    }
    x.floor().to_integer().to_u64().unwrap_or(u64::MAX)
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Scale `values` by the least common multiple of their denominators and
/// return the numerators as `i128`. `None` if any scaled value overflows.
pub fn integer_view<'a, I>(values: I) -> Option<Vec<i128>>
where
    I: IntoIterator<Item = &'a Rational>,
    I::IntoIter: Clone,
{
    let it = values.into_iter();
    let mut lcm = BigInt::one();
    for v in it.clone() {
        lcm = lcm.lcm(v.denom());
    }
    it.map(|v| (v.numer() * (&lcm / v.denom())).to_i128())
        .collect()
}

/// Same as [`integer_view`] but also returns the common scale factor.
pub fn integer_view_with_scale(values: &[Rational]) -> Option<(Vec<i128>, BigInt)> {
    let mut lcm = BigInt::one();
    for v in values {
        lcm = lcm.lcm(v.denom());
    }
    let ints = values
        .iter()
        .map(|v| (v.numer() * (&lcm / v.denom())).to_i128())
        .collect::<Option<Vec<_>>>()?;
    Some((ints, lcm))
}

/// Parse `"p/q"`, an integer, or a decimal literal (with optional exponent)
/// into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || QkpError::Input(format!("cannot parse rational {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(QkpError::Input(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: BigInt = format!("0{whole}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(all * num::pow(ten, scale as usize))
    } else {
        Rational::new(all, num::pow(ten, scale.unsigned_abs() as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Canonical text form: an integer, or `"p/q"` in lowest terms.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Canonical JSON form: integers that fit in `i64` as numbers, everything
/// else as a `"p/q"` string.
pub fn rational_to_json(x: &Rational) -> serde_json::Value {
    if x.is_integer() {
        if let Some(v) = x.numer().to_i64() {
            return serde_json::Value::from(v);
        }
    }
    serde_json::Value::String(format_rational(x))
}

/// A rational as it appears in JSON documents: a number or a string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JsonRational(pub Rational);

impl fmt::Display for JsonRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl Serialize for JsonRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_to_json(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for JsonRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JsonRational;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a rational string like \"3/4\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<JsonRational, E> {
                Ok(JsonRational(int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<JsonRational, E> {
                Ok(JsonRational(Rational::from_integer(BigInt::from(v))))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<JsonRational, E> {
                if !v.is_finite() {
                    return Err(E::custom("non-finite number"));
                }
                // shortest round-trip decimal, parsed exactly
                parse_rational(&format!("{v:e}"))
                    .map(JsonRational)
                    .map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<JsonRational, E> {
                parse_rational(v).map(JsonRational).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

pub fn is_negative(x: &Rational) -> bool {
    x.numer().sign() == Sign::Minus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_bounds() {
        assert_eq!(floor_log2(&int(10)), 3);
        assert_eq!(ceil_log2(&int(10)), 4);
        assert_eq!(floor_log2(&int(8)), 3);
        assert_eq!(ceil_log2(&int(8)), 3);
        assert_eq!(floor_log2(&ratio(1, 5)), -3);
        assert_eq!(ceil_log2(&ratio(1, 2)), -1);
        assert_eq!(floor_log2(&ratio(3, 4)), -1);
        assert_eq!(floor_log2_u64(1), 0);
        assert_eq!(floor_log2_u64(16), 4);
        assert_eq!(floor_log2_u64(17), 4);
    }

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("6/8").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational("0.2").unwrap(), ratio(1, 5));
        assert_eq!(parse_rational("1.5e2").unwrap(), int(150));
        assert_eq!(parse_rational("2.5e-1").unwrap(), ratio(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn json_forms() {
        let q: JsonRational = serde_json::from_str("0.1").unwrap();
        assert_eq!(q.0, ratio(1, 10));
        let q: JsonRational = serde_json::from_str("\"7/3\"").unwrap();
        assert_eq!(serde_json::to_string(&q).unwrap(), "\"7/3\"");
        let q: JsonRational = serde_json::from_str("12").unwrap();
        assert_eq!(serde_json::to_string(&q).unwrap(), "12");
    }

    #[test]
    fn common_denominator_view() {
        let v = [ratio(1, 2), ratio(1, 3), int(2)];
        assert_eq!(integer_view(v.iter()).unwrap(), vec![3, 2, 12]);
    }
}
