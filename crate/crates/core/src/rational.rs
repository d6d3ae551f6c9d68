//! Exact rationals and their `"p/q"` string form.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HdxError, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn from_u128(num: u128, den: u128) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || HdxError::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = w.abs() * &scale + f;
        let num = if neg { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Always `"p/q"`, including integers (`"3/1"`).
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerators or denominators: divide in floating point after scaling
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Floats in reports are rendered with 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.*e}", 11, x);
    // normalize "1.50000000000e0" -> "1.5"
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..15).contains(&exp) {
        let digits_after = (11 - exp).max(0) as usize;
        let plain = format!("{:.*}", digits_after, x);
        trim_zeros(&plain)
    } else {
        format!("{}e{}", trim_zeros(mant), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0');
        t.trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// A rational extended by `+∞`, used for expansion constants over empty sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtRational {
    Finite(Rational),
    Infinity,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn recip(&self) -> ExtRational {
        match self {
            ExtRational::Infinity => ExtRational::Finite(Rational::zero()),
            ExtRational::Finite(r) if r.is_zero() => ExtRational::Infinity,
            ExtRational::Finite(r) => ExtRational::Finite(r.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRational::Finite(r) => to_f64(r),
            ExtRational::Infinity => f64::INFINITY,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.trim() == "inf" {
            Ok(ExtRational::Infinity)
        } else {
            parse_rational(s).map(ExtRational::Finite)
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
            (ExtRational::Infinity, _) => Ordering::Greater,
            (_, ExtRational::Infinity) => Ordering::Less,
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(r) => f.write_str(&fmt_rational(r)),
            ExtRational::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ExtRational::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "rational::serde_str")]` for `Rational` fields.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Same as [`serde_str`] for `Option<Rational>`.
pub mod serde_opt_str {
    use super::*;

    pub fn serialize<S: Serializer>(
        r: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&fmt_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Same as [`serde_str`] for `Vec<Rational>`.
pub mod serde_vec_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(fmt_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let strs: Vec<String> = Vec::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// `#[serde(with = "rational::serde_float")]`: floats as 12-significant-digit strings.
pub mod serde_float {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_float(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            _ => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A nonnegative rational `p/q` for exact comparisons against scaled
/// integer norms, with a `u128` fast path.
#[derive(Clone, Debug)]
pub(crate) struct Frac {
    p: BigInt,
    q: BigInt,
    small: Option<(u128, u128)>,
}

impl Frac {
    pub fn new(r: &Rational) -> Self {
        debug_assert!(!r.is_negative());
        let small = r.numer().to_u128().zip(r.denom().to_u128());
        Frac { p: r.numer().clone(), q: r.denom().clone(), small }
    }

    /// `a ≤ b + (p/q)·m`.
    pub fn le_plus(&self, a: u128, b: u128, m: u128) -> bool {
        if let Some((p, q)) = self.small {
            if let (Some(l), Some(r1), Some(r2)) = (a.checked_mul(q), b.checked_mul(q), p.checked_mul(m)) {
                if let Some(r) = r1.checked_add(r2) {
                    return l <= r;
                }
            }
        }
        BigInt::from(a) * &self.q <= BigInt::from(b) * &self.q + &self.p * BigInt::from(m)
    }

    /// `a ≤ (p/q)·m`.
    pub fn le_times(&self, a: u128, m: u128) -> bool {
        self.le_plus(a, 0, m)
    }
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product::<u128>().max(1)
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn format_is_always_fraction() {
        assert_eq!(fmt_rational(&int(3)), "3/1");
        assert_eq!(fmt_rational(&rat(2, 8)), "1/4");
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(1.5), "1.5");
        assert_eq!(fmt_float(4.0 / 3.0), "1.33333333333");
        assert_eq!(fmt_float(1.0 - 2f64.sqrt() / 3.0), "0.528595479209");
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
    }

    #[test]
    fn ext_order() {
        assert!(ExtRational::Infinity > ExtRational::Finite(int(1_000_000)));
        assert_eq!(ExtRational::Finite(rat(1, 3)).recip(), ExtRational::Finite(int(3)));
        assert_eq!(ExtRational::Infinity.to_string(), "inf");
    }

    #[test]
    fn frac_comparisons() {
        let f = Frac::new(&rat(1, 10));
        assert!(f.le_plus(4, 2, 20));
        assert!(!f.le_plus(5, 2, 20));
        let big = Frac::new(&Rational::new(BigInt::from(1) << 100u32, BigInt::from(3)));
        assert!(big.le_plus(u128::MAX, 0, 1 << 30));
        assert!(!big.le_plus(u128::MAX, 0, 1));
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(4), 24);
        assert_eq!(binomial(4, 3), 4);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(2, 3), 0);
    }
}
