use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::types::FiniteType;
use crate::error::{Error, Result};

/// `j(x, y) = (x + y)(x + y + 1)/2 + y`.
pub fn cantor_pair(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    (&s * (&s + 1u32)) / 2u32 + y
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair(z: &BigUint) -> (BigUint, BigUint) {
    // w = floor((sqrt(8z + 1) - 1) / 2)
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let y = z - t;
    let x = &w - &y;
    (x, y)
}

fn pow2(e: u32) -> BigUint {
    BigUint::one() << e
}

/// `M(b)(n) = j(b·2^{n+2}, 2^{n+1} - 1)`.
pub fn majorant_m(b: &BigUint, n: u32) -> BigUint {
    cantor_pair(&(b * pow2(n + 2)), &(pow2(n + 1) - 1u32))
}

/// Code of a real `r` at precision `n`: `j(s, 2^{n+1} - 1)` where `m = round(r·2^{n+1})`
/// and `s` folds the sign of `m` (`2m` for `m ≥ 0`, `2|m| - 1` otherwise).
pub fn code_real(r: &BigRational, n: u32) -> BigUint {
    let scaled = r * BigRational::from_integer(BigInt::from(pow2(n + 1)));
    let m = scaled.round().to_integer();
    let folded = if m.is_negative() {
        (m.abs() * 2u32 - 1u32).to_biguint().expect("positive")
    } else {
        (m * 2u32).to_biguint().expect("non-negative")
    };
    cantor_pair(&folded, &(pow2(n + 1) - 1u32))
}

/// Concrete values for the ground-type relation checks.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundValue<P> {
    Nat(BigUint),
    Point(P),
    NatSeq(Vec<BigUint>),
    PointSeq(Vec<P>),
}

fn supported(ty: &FiniteType) -> Result<()> {
    let ok = match ty {
        FiniteType::Nat | FiniteType::Space => true,
        FiniteType::Fun { arg, res } => **arg == FiniteType::Nat && res.is_base(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedType(ty.to_string()))
    }
}

fn mismatch<P>(v: &GroundValue<P>, ty: &FiniteType) -> Error {
    let kind = match v {
        GroundValue::Nat(_) => "natural",
        GroundValue::Point(_) => "point",
        GroundValue::NatSeq(_) => "natural sequence",
        GroundValue::PointSeq(_) => "point sequence",
    };
    Error::Parameter(format!("a {kind} is not a value of type {ty}"))
}

fn nat_ge_real(n: &BigUint, r: f64) -> bool {
    n.to_f64().unwrap_or(f64::INFINITY) >= r
}

/// `x ⪯_τ y` at `τ ∈ {0, X, 0(0), X(0)}`; function types compare pointwise over the
/// supplied prefix, which must have equal lengths.
pub fn check_preceq<P>(
    x: &GroundValue<P>,
    y: &GroundValue<P>,
    ty: &FiniteType,
    norm: impl Fn(&P) -> f64,
) -> Result<bool> {
    supported(ty)?;
    match (ty, x, y) {
        (FiniteType::Nat, GroundValue::Nat(a), GroundValue::Nat(b)) => Ok(a <= b),
        (FiniteType::Space, GroundValue::Point(a), GroundValue::Point(b)) => Ok(norm(a) <= norm(b)),
        (FiniteType::Fun { res, .. }, GroundValue::NatSeq(a), GroundValue::NatSeq(b)) if **res == FiniteType::Nat => {
            if a.len() != b.len() {
                return Err(Error::Parameter("sequence prefixes differ in length".into()));
            }
            Ok(a.iter().zip(b).all(|(u, v)| u <= v))
        }
        (FiniteType::Fun { res, .. }, GroundValue::PointSeq(a), GroundValue::PointSeq(b))
            if **res == FiniteType::Space =>
        {
            if a.len() != b.len() {
                return Err(Error::Parameter("sequence prefixes differ in length".into()));
            }
            Ok(a.iter().zip(b).all(|(u, v)| norm(u) <= norm(v)))
        }
        _ => Err(Error::Parameter(format!("values do not match type {ty}"))),
    }
}

/// `x* ≳_τ x` at `τ ∈ {0, X, 0(0), X(0)}`. The candidate lives at the type with `X`
/// replaced by `0`, so it is a natural or a natural sequence. At function types both
/// clauses are checked for all `y ≤ y* ≤ horizon`: `x*(y*) ≳ x(y)` and
/// `x*(y*) ≥ x*(y)`. This is a finite-prefix check: a pass does not establish the
/// relation beyond the horizon.
pub fn check_majorizes<P>(
    candidate: &GroundValue<P>,
    value: &GroundValue<P>,
    ty: &FiniteType,
    horizon: usize,
    norm: impl Fn(&P) -> f64,
) -> Result<bool> {
    supported(ty)?;
    let prefix = |len: usize| -> Result<usize> {
        if len <= horizon {
            Err(Error::Parameter(format!("need {} sequence entries, got {len}", horizon + 1)))
        } else {
            Ok(horizon + 1)
        }
    };
    match (ty, candidate, value) {
        (FiniteType::Nat, GroundValue::Nat(s), GroundValue::Nat(x)) => Ok(s >= x),
        (FiniteType::Space, GroundValue::Nat(s), GroundValue::Point(x)) => Ok(nat_ge_real(s, norm(x))),
        (FiniteType::Fun { res, .. }, GroundValue::NatSeq(s), v) => {
            let len = prefix(s.len())?;
            let dominates: Box<dyn Fn(usize, usize) -> bool + '_> = match (&**res, v) {
                (FiniteType::Nat, GroundValue::NatSeq(x)) => {
                    prefix(x.len())?;
                    Box::new(move |ys, y| s[ys] >= x[y])
                }
                (FiniteType::Space, GroundValue::PointSeq(x)) => {
                    prefix(x.len())?;
                    let norms: Vec<f64> = x[..len].iter().map(&norm).collect();
                    Box::new(move |ys, y| nat_ge_real(&s[ys], norms[y]))
                }
                _ => return Err(mismatch(v, ty)),
            };
            for ys in 0..len {
                for y in 0..=ys {
                    if !dominates(ys, y) || s[ys] < s[y] {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        (FiniteType::Nat | FiniteType::Space, GroundValue::Nat(_), v) => Err(mismatch(v, ty)),
        (_, c, _) => Err(mismatch(c, ty)),
    }
}
