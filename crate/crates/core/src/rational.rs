//! Exact rationals used for every state-space computation.

use alloc::format;
use alloc::string::String;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Arbitrary precision rational number.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Formats as `p/q`, always with an explicit denominator.
pub fn to_pq(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        Some(Rational::new(p, q))
    } else {
        BigInt::from_str(s).ok().map(Rational::from_integer)
    }
}
