//! Arbitrary-precision exact rationals.
//!
//! Every breakpoint, value, slope and tolerance in this crate is a
//! [`Rational`]. The canonical text form is `"p/q"` with `q > 1` and
//! `gcd(|p|, q) = 1`, or just `"p"` when the denominator is one.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::InvalidRational {
                input: format!("{numer}/{denom}"),
                reason: "zero denominator".into(),
            });
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn floor(&self) -> Self {
        Rational(self.0.floor())
    }

    /// Representative of `self` modulo 1 in `[0, 1)`.
    pub fn mod_one(&self) -> Self {
        if !self.0.is_integer() && self.0 >= BigRational::zero() && self.0 < BigRational::one() {
            return self.clone();
        }
        Rational(&self.0 - self.0.floor())
    }

    /// `2^exp` for any signed exponent.
    pub fn pow2(exp: i32) -> Self {
        let p = BigInt::one() << exp.unsigned_abs();
        if exp >= 0 {
            Rational(BigRational::from_integer(p))
        } else {
            Rational(BigRational::new(BigInt::one(), p))
        }
    }

    pub fn pow(&self, exp: i32) -> Self {
        Rational(self.0.pow(exp))
    }

    pub fn min_of<'a>(a: &'a Self, b: &'a Self) -> &'a Self {
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn max_of<'a>(a: &'a Self, b: &'a Self) -> &'a Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    pub fn midpoint(a: &Self, b: &Self) -> Self {
        (a + b) / Rational::from_integer(2)
    }

    /// Lossy conversion, used only at output boundaries and in benches.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big(self) -> BigRational {
        self.0
    }

    /// Decimal rendering rounded half away from zero to `digits` places.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10u32), digits);
        let scaled = self.0.abs() * BigRational::from_integer(scale.clone());
        let rounded = (scaled + BigRational::new(BigInt::one(), BigInt::from(2u32))).floor();
        let int = rounded.to_integer();
        let (whole, frac) = int.div_rem(&scale);
        let negative = self.0.is_negative() && !int.is_zero();
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&whole.to_string());
        if digits > 0 {
            let frac = frac.to_string();
            out.push('.');
            for _ in frac.len()..digits {
                out.push('0');
            }
            out.push_str(&frac);
        }
        out
    }

    /// Strict parser: accepts only the canonical `"p"` / `"p/q"` form.
    pub fn parse_canonical(s: &str) -> Result<Self> {
        let parsed: Rational = s.parse()?;
        if parsed.to_string() != s {
            return Err(Error::InvalidRational {
                input: s.to_string(),
                reason: format!("not in canonical form (expected \"{parsed}\")"),
            });
        }
        Ok(parsed)
    }
}

fn parse_int(s: &str, full: &str) -> Result<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::InvalidRational {
            input: full.to_string(),
            reason: "expected an integer or \"p/q\"".into(),
        });
    }
    BigInt::from_str(s).map_err(|e| Error::InvalidRational {
        input: full.to_string(),
        reason: e.to_string(),
    })
}

/// Lenient parser: `"p"` or `"p/q"` with any nonzero `q`; the result is
/// reduced. No whitespace, no decimal points.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            None => Ok(Rational(BigRational::from_integer(parse_int(s, s)?))),
            Some((p, q)) => {
                let p = parse_int(p, s)?;
                let q = parse_int(q, s)?;
                Rational::from_bigints(p, q).map_err(|_| Error::InvalidRational {
                    input: s.to_string(),
                    reason: "zero denominator".into(),
                })
            }
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Rational::parse_canonical(&s).map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Sign of a rational as an `Ordering` against zero.
pub fn signum(r: &Rational) -> Ordering {
    match r.0.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// Shorthand for building rationals from small integers.
pub fn q(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_text_form() {
        assert_eq!(q(2, 4).to_string(), "1/2");
        assert_eq!(q(-3, 6).to_string(), "-1/2");
        assert_eq!(q(4, 2).to_string(), "2");
        assert_eq!(Rational::zero().to_string(), "0");
        assert_eq!(q(3, -4), q(-3, 4));
    }

    #[test]
    fn strict_parser_rejects_non_canonical() {
        assert_eq!(Rational::parse_canonical("5/8").unwrap(), q(5, 8));
        assert_eq!(Rational::parse_canonical("-7").unwrap(), q(-7, 1));
        for bad in ["2/4", "1/1", "3/-4", "-0", "+1", " 1/2", "01/2", "1/0", "0.5", "", "1/", "/2"] {
            assert!(Rational::parse_canonical(bad).is_err(), "{bad} accepted");
        }
    }

    #[test]
    fn lenient_parser_reduces() {
        assert_eq!("6/8".parse::<Rational>().unwrap(), q(3, 4));
        assert_eq!("3/-4".parse::<Rational>().unwrap(), q(-3, 4));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
    }

    #[test]
    fn mod_one_representative() {
        assert_eq!(q(7, 4).mod_one(), q(3, 4));
        assert_eq!(q(-1, 4).mod_one(), q(3, 4));
        assert_eq!(q(1, 1).mod_one(), Rational::zero());
        assert_eq!(q(-3, 1).mod_one(), Rational::zero());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(q(1, 3).to_decimal_string(4), "0.3333");
        assert_eq!(q(2, 3).to_decimal_string(4), "0.6667");
        assert_eq!(q(-5, 8).to_decimal_string(2), "-0.63");
        assert_eq!(q(-1, 1000).to_decimal_string(2), "0.00");
        assert_eq!(q(3, 1).to_decimal_string(0), "3");
        assert_eq!(q(1, 2).to_decimal_string(3), "0.500");
    }

    #[test]
    fn pow2_both_directions() {
        assert_eq!(Rational::pow2(3), q(8, 1));
        assert_eq!(Rational::pow2(-3), q(1, 8));
        assert_eq!(Rational::pow2(0), Rational::one());
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(p in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
            let r = q(p, d);
            prop_assert_eq!(Rational::parse_canonical(&r.to_string()).unwrap(), r.clone());
            let m = r.mod_one();
            prop_assert!(m >= Rational::zero() && m < Rational::one());
            prop_assert!((r - m).is_integer());
        }
    }
}
