//! Exact time values on the extended rational line.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid time value `{0}`")]
pub struct ParseTimeError(pub String);

/// A point on the extended rational time line.
///
/// Variant order gives the natural total order: `NegInf < At(_) < PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Time {
    NegInf,
    At(Rational64),
    PosInf,
}

impl Time {
    pub fn int(v: i64) -> Self {
        Time::At(Rational64::from_integer(v))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Time::At(_))
    }

    pub fn finite(&self) -> Option<Rational64> {
        match self {
            Time::At(r) => Some(*r),
            _ => None,
        }
    }

    /// Shifts by a finite amount; infinities absorb the shift.
    pub fn shift(self, delta: Rational64) -> Self {
        match self {
            Time::At(r) => Time::At(r + delta),
            other => other,
        }
    }

    /// `self - other`, or `None` when both are the same infinity.
    pub fn minus(self, other: Time) -> Option<Time> {
        match (self, other) {
            (Time::At(a), Time::At(b)) => Some(Time::At(a - b)),
            (Time::PosInf, Time::PosInf) | (Time::NegInf, Time::NegInf) => None,
            (Time::PosInf, _) | (_, Time::NegInf) => Some(Time::PosInf),
            (Time::NegInf, _) | (_, Time::PosInf) => Some(Time::NegInf),
        }
    }
}

impl From<Rational64> for Time {
    fn from(r: Rational64) -> Self {
        Time::At(r)
    }
}

impl From<i64> for Time {
    fn from(v: i64) -> Self {
        Time::int(v)
    }
}

/// Formats a rational as a terminating decimal when possible, `n/d` otherwise.
pub fn format_rational(r: &Rational64) -> String {
    if r.is_integer() {
        return r.to_integer().to_string();
    }
    let mut den = *r.denom();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scale = 10i64.checked_pow(digits);
    match scale.and_then(|s| r.numer().checked_mul(s / r.denom())) {
        Some(scaled) => {
            let neg = scaled < 0;
            let abs = scaled.unsigned_abs();
            let s = 10u64.pow(digits);
            let frac = format!("{:0width$}", abs % s, width = digits as usize);
            format!("{}{}.{}", if neg { "-" } else { "" }, abs / s, frac)
        }
        None => format!("{}/{}", r.numer(), r.denom()),
    }
}

/// Parses `-3`, `2.5`, `7/3`, `-inf`, `inf`, `+inf` and the `∞` spellings.
pub fn parse_rational(s: &str) -> Result<Rational64, ParseTimeError> {
    let err = || ParseTimeError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| err())?;
        let d: i64 = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational64::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(err());
    }
    let int: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| err())? };
    let scale = 10i64.checked_pow(frac_part.len() as u32).ok_or_else(err)?;
    let frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| err())? };
    let numer = int
        .checked_mul(scale)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(err)?;
    let r = Rational64::new(numer, scale);
    Ok(if neg { -r } else { r })
}

impl FromStr for Time {
    type Err = ParseTimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "-inf" | "-∞" | "−∞" => Ok(Time::NegInf),
            "inf" | "+inf" | "∞" | "+∞" => Ok(Time::PosInf),
            other => parse_rational(other).map(Time::At),
        }
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::NegInf => f.write_str("-inf"),
            Time::PosInf => f.write_str("+inf"),
            Time::At(r) => f.write_str(&format_rational(r)),
        }
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde helper for plain rational timestamps.
pub mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational64, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational64, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Absolute distance between two rationals.
pub fn distance(a: Rational64, b: Rational64) -> Rational64 {
    (a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("2.5").unwrap(), Rational64::new(5, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational64::new(-1, 4));
        assert_eq!(parse_rational("7/3").unwrap(), Rational64::new(7, 3));
        assert_eq!(parse_rational("+4").unwrap(), Rational64::from_integer(4));
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn infinities_order_around_finite_values() {
        let lo: Time = "-inf".parse().unwrap();
        let hi: Time = "inf".parse().unwrap();
        assert!(lo < Time::int(-1000) && Time::int(1000) < hi);
        assert_eq!(Time::NegInf.shift(Rational64::from_integer(3)), Time::NegInf);
        assert_eq!(Time::int(2).minus(Time::NegInf), Some(Time::PosInf));
        assert_eq!(Time::PosInf.minus(Time::PosInf), None);
    }

    #[test]
    fn display_round_trips() {
        for s in ["2", "-1", "2.5", "0.125", "1/3", "-inf", "+inf"] {
            let t: Time = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
    }
}
