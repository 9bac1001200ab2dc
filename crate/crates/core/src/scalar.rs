//! Scalars for the two arithmetic paths: exact rationals and `f64`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// An exponent `p >= 1`.
///
/// Integral exponents are kept as integers so that rational inputs can be raised to
/// the `p`-th power exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Integer(u32),
    Real(f64),
}

impl Exponent {
    /// Largest exponent still stored as an integer by [`Exponent::new`].
    pub const MAX_INTEGER: u32 = 64;

    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::Parameter(format!("exponent must be a finite real >= 1, got {p}")));
        }
        if p.fract() == 0.0 && p <= f64::from(Self::MAX_INTEGER) {
            Ok(Exponent::Integer(p as u32))
        } else {
            Ok(Exponent::Real(p))
        }
    }

    pub fn integer(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::Parameter("exponent must be >= 1".into()));
        }
        Ok(Exponent::Integer(p))
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Integer(k) => f64::from(k),
            Exponent::Real(r) => r,
        }
    }

    pub fn as_integer(self) -> Option<u32> {
        match self {
            Exponent::Integer(k) => Some(k),
            Exponent::Real(_) => None,
        }
    }

    /// `p >= 2`, the regime in which the convexity results apply.
    pub fn is_convex_regime(self) -> bool {
        self.value() >= 2.0
    }

    pub fn require_convex_regime(self) -> Result<Self> {
        if self.is_convex_regime() {
            Ok(self)
        } else {
            Err(Error::Parameter(format!("p >= 2 required, got {}", self.value())))
        }
    }

    /// `|t|^p` in floating point.
    pub fn powf(self, t: f64) -> f64 {
        match self {
            Exponent::Integer(k) => t.abs().powi(k as i32),
            Exponent::Real(r) => t.abs().powf(r),
        }
    }

    /// `t^(1/p)` for `t >= 0`.
    pub fn root(self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Exponent::Integer(1) => t,
            Exponent::Integer(2) => t.sqrt(),
            Exponent::Integer(3) => t.cbrt(),
            _ => t.powf(1.0 / self.value()),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Integer(k) => write!(f, "{k}"),
            Exponent::Real(r) => write!(f, "{r}"),
        }
    }
}

/// Arithmetic needed by the measure-space and approximation code.
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Signed + Send + Sync + 'static
{
    /// Whether comparisons in this scalar type are exact.
    const EXACT: bool;

    fn from_ratio(r: &BigRational) -> Self;
    fn from_frac(num: i64, den: u64) -> Self;
    fn to_f64(&self) -> f64;

    /// `|self|^p`. Fails for rationals raised to a non-integer power.
    fn pow_p(&self, p: Exponent) -> Result<Self>;

    /// Ceiling of a non-negative value, saturating at `u64::MAX`.
    fn ceil_u64(&self) -> u64;

    /// A factor `t > 0` with `t^p * norm_pow <= 1`, as close to `norm_pow^(-1/p)` as
    /// the representation allows. `norm_pow` must be positive.
    fn inverse_root_below(norm_pow: &Self, p: Exponent) -> Result<Self>;

    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_frac(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn pow_p(&self, p: Exponent) -> Result<Self> {
        Ok(p.powf(*self))
    }

    fn ceil_u64(&self) -> u64 {
        let c = self.ceil();
        if c <= 0.0 {
            0
        } else if c >= u64::MAX as f64 {
            u64::MAX
        } else {
            c as u64
        }
    }

    fn inverse_root_below(norm_pow: &Self, p: Exponent) -> Result<Self> {
        if *norm_pow <= 0.0 {
            return Err(Error::Parameter("norm must be positive".into()));
        }
        Ok(1.0 / p.root(*norm_pow))
    }

    fn to_json(&self) -> Value {
        json!(*self)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Schema(format!("not a number: {n}"))),
            other => BigRational::from_json(other).map(|r| f64::from_ratio(&r)),
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_frac(num: i64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn pow_p(&self, p: Exponent) -> Result<Self> {
        match p {
            Exponent::Integer(k) => Ok(num_traits::pow(self.abs(), k as usize)),
            Exponent::Real(r) => Err(Error::InexactExponent(r)),
        }
    }

    fn ceil_u64(&self) -> u64 {
        if !self.is_positive() {
            return 0;
        }
        self.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
    }

    fn inverse_root_below(norm_pow: &Self, p: Exponent) -> Result<Self> {
        let k = p.as_integer().ok_or(Error::InexactExponent(p.value()))?;
        if !norm_pow.is_positive() {
            return Err(Error::Parameter("norm must be positive".into()));
        }
        if let (Some(n), Some(d)) = (exact_root(norm_pow.numer(), k), exact_root(norm_pow.denom(), k)) {
            return Ok(BigRational::new(d, n));
        }
        // Dyadic approximation from below, tightened until the exact check passes.
        let guess = 1.0 / p.root(ToPrimitive::to_f64(norm_pow).unwrap_or(f64::NAN));
        let scale = BigInt::one() << 48u32;
        let mut numer = BigInt::from((guess * (1u64 << 48) as f64).floor() as u64);
        let one = BigRational::one();
        loop {
            let t = BigRational::new(numer.clone(), scale.clone());
            if !t.is_positive() {
                return Err(Error::Parameter("norm too large to rescale exactly".into()));
            }
            if num_traits::pow(t.clone(), k as usize) * norm_pow <= one {
                return Ok(t);
            }
            let step = (&numer >> 20u32).max(BigInt::one());
            numer -= step;
        }
    }

    fn to_json(&self) -> Value {
        fn int(i: &BigInt) -> Value {
            match i.to_i64() {
                Some(v) => json!(v),
                None => json!(i.to_string()),
            }
        }
        json!({ "num": int(self.numer()), "den": int(self.denom()) })
    }

    fn from_json(v: &Value) -> Result<Self> {
        fn int(v: &Value) -> Result<BigInt> {
            match v {
                Value::Number(n) if n.is_i64() || n.is_u64() => n
                    .to_string()
                    .parse()
                    .map_err(|_| Error::Schema(format!("bad integer {n}"))),
                Value::String(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| Error::Schema(format!("bad integer {s:?}"))),
                other => Err(Error::Schema(format!("expected integer, got {other}"))),
            }
        }
        match v {
            Value::Object(map) => {
                let num = int(map.get("num").ok_or_else(|| Error::Schema("missing num".into()))?)?;
                let den = int(map.get("den").ok_or_else(|| Error::Schema("missing den".into()))?)?;
                if den.is_zero() {
                    return Err(Error::Schema("zero denominator".into()));
                }
                Ok(BigRational::new(num, den))
            }
            Value::Number(n) => parse_rational(&n.to_string()),
            Value::String(s) => parse_rational(s),
            other => Err(Error::Schema(format!("expected a rational, got {other}"))),
        }
    }
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *n).then_some(r)
}

/// Parses `"a"`, `"a/b"`, or a decimal literal such as `"-0.125"` or `"3e-2"` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::Schema(format!("not a rational number: {text:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().map_err(|_| bad())?;
        let den: BigInt = b.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['-', '+']);
    if int_digits.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_digits}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exp - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Ok(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exponent_classification() {
        assert_eq!(Exponent::new(2.0).unwrap(), Exponent::Integer(2));
        assert_eq!(Exponent::new(2.5).unwrap(), Exponent::Real(2.5));
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(!Exponent::new(1.5).unwrap().is_convex_regime());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/5").unwrap(), q(3, 5));
        assert_eq!(parse_rational("-0.125").unwrap(), q(-1, 8));
        assert_eq!(parse_rational("3e-2").unwrap(), q(3, 100));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("-").is_err());
    }

    #[test]
    fn rational_json_round_trip() {
        let big = BigRational::new(BigInt::from(u64::MAX) * 7, BigInt::from(3));
        for r in [q(-3, 10), q(0, 1), big] {
            assert_eq!(BigRational::from_json(&r.to_json()).unwrap(), r);
        }
        assert_eq!(BigRational::from_json(&json!(0.5)).unwrap(), q(1, 2));
    }

    #[test]
    fn inverse_root_exact_and_approximate() {
        let t = BigRational::inverse_root_below(&q(4, 9), Exponent::Integer(2)).unwrap();
        assert_eq!(t, q(3, 2));
        let two = q(2, 1);
        let t = BigRational::inverse_root_below(&two, Exponent::Integer(2)).unwrap();
        assert!(num_traits::pow(t.clone(), 2) * &two <= BigRational::one());
        assert!((Scalar::to_f64(&t) - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
