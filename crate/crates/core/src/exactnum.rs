//! Exact rational scalars and rational parametrisations of surds.
//!
//! Every value handled by the library is a [`Scalar`], an arbitrary-precision
//! rational kept in lowest terms.  Formulas that need `√(x² − 1)` or `√x` are
//! evaluated at points where the surd is itself rational, produced by
//! [`SurdParam`].

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors raised by scalar arithmetic and surd construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("surd seed must be nonzero")]
    ZeroSeed,
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
}

/// An exact rational number in canonical form (lowest terms, positive
/// denominator).
///
/// The arithmetic operators panic on division by zero, like the integer
/// types; use [`Scalar::checked_div`] or [`Scalar::recip`] when the divisor
/// is not known to be nonzero.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q` reduced to lowest terms.
    pub fn ratio(p: i64, q: i64) -> Result<Self, NumError> {
        if q == 0 {
            return Err(NumError::DivisionByZero);
        }
        Ok(Scalar(BigRational::new(BigInt::from(p), BigInt::from(q))))
    }

    /// One half, which appears in several δ-regimes.
    pub fn half() -> Self {
        Scalar(BigRational::new(BigInt::from(1), BigInt::from(2)))
    }

    pub fn from_big(r: BigRational) -> Self {
        Scalar(r)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
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

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn recip(&self) -> Result<Self, NumError> {
        if self.is_zero() {
            Err(NumError::DivisionByZero)
        } else {
            Ok(Scalar(self.0.recip()))
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Self, NumError> {
        if rhs.is_zero() {
            Err(NumError::DivisionByZero)
        } else {
            Ok(Scalar(&self.0 / &rhs.0))
        }
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, exp: i32) -> Result<Self, NumError> {
        if exp < 0 && self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Scalar(num_traits::Pow::pow(&self.0, exp)))
    }

    /// Returns the integer value if the scalar is an integer that fits in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            i64::try_from(self.0.numer()).ok()
        } else {
            None
        }
    }

    /// Total number of bits in numerator and denominator; a cheap measure of
    /// height used for diagnostics.
    pub fn bits(&self) -> u64 {
        self.0.numer().bits() + self.0.denom().bits()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<i32> for Scalar {
    fn from(n: i32) -> Self {
        Scalar::from_int(n as i64)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = NumError;

    /// Parses `p` or `p/q` with an optional sign on either part.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || NumError::Parse(s.to_string());
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), Some(q.trim())),
            None => (t, None),
        };
        let p: BigInt = p.parse().map_err(|_| err())?;
        let q: BigInt = match q {
            Some(q) => q.parse().map_err(|_| err())?,
            None => BigInt::one(),
        };
        if q.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Scalar(BigRational::new(p, q)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(&self.0 $op rhs.0)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(self.0 $op &rhs.0)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0 $op rhs.0)
            }
        }
        impl $tr<i64> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: i64) -> Scalar {
                self $op Scalar::from_int(rhs)
            }
        }
        impl $tr<i64> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: i64) -> Scalar {
                self $op Scalar::from_int(rhs)
            }
        }
        impl $tr<Scalar> for i64 {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar::from_int(self) $op rhs
            }
        }
        impl $tr<&Scalar> for i64 {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar::from_int(self) $op rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign<Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        self.0 -= rhs.0;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.0 *= &rhs.0;
    }
}

impl MulAssign<Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        self.0 *= rhs.0;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}

/// Which surd a [`SurdParam`] rationalises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurdKind {
    /// `value = (t + 1/t)/2`, `root = (t − 1/t)/2 = √(value² − 1)`.
    Hyperbolic,
    /// `value = s²`, `root = s = √value`.
    Square,
}

/// A rational point on a surd curve: a value together with an exact rational
/// square root of the associated radicand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurdParam {
    pub kind: SurdKind,
    pub seed: Scalar,
    pub value: Scalar,
    pub root: Scalar,
}

/// Builds the surd record generated by `seed`.
pub fn make_surd(kind: SurdKind, seed: Scalar) -> Result<SurdParam, NumError> {
    if seed.is_zero() {
        return Err(NumError::ZeroSeed);
    }
    let (value, root) = match kind {
        SurdKind::Hyperbolic => {
            let inv = seed.recip()?;
            let half = Scalar::half();
            ((&seed + &inv) * &half, (&seed - &inv) * &half)
        }
        SurdKind::Square => (seed.square(), seed.clone()),
    };
    Ok(SurdParam {
        kind,
        seed,
        value,
        root,
    })
}

impl SurdParam {
    /// The same value with the opposite choice of square root.
    pub fn flip_branch(&self) -> SurdParam {
        let seed = match self.kind {
            SurdKind::Hyperbolic => self.seed.recip().expect("surd seeds are nonzero"),
            SurdKind::Square => -&self.seed,
        };
        make_surd(self.kind, seed).expect("surd seeds are nonzero")
    }

    /// `x̄ = x + √(x² − 1)` for hyperbolic surds; `x + √x` for square surds.
    pub fn bar(&self) -> Scalar {
        &self.value + &self.root
    }

    /// `x − √(x² − 1)`, the conjugate branch of [`SurdParam::bar`].
    pub fn bar_conjugate(&self) -> Scalar {
        &self.value - &self.root
    }

    /// Radicand whose square root is `root`.
    pub fn radicand(&self) -> Scalar {
        match self.kind {
            SurdKind::Hyperbolic => self.value.square() - 1,
            SurdKind::Square => self.value.clone(),
        }
    }
}

/// Shorthand for building a scalar from a small integer.
pub fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d).unwrap()
    }

    #[test]
    fn fraction_arithmetic_is_exact() {
        assert_eq!(q(1, 2) + q(1, 3), q(5, 6));
        assert_eq!(q(2, 5) * q(5, 2), s(1));
        assert_eq!(s(7) - s(7), s(0));
        assert_eq!(q(3, 4) / q(3, 8), s(2));
    }

    #[test]
    fn canonical_text_form() {
        assert_eq!(q(6, -4).to_string(), "-3/2");
        assert_eq!(s(5).to_string(), "5");
        assert_eq!("10/4".parse::<Scalar>().unwrap().to_string(), "5/2");
        assert_eq!(" -7 ".parse::<Scalar>().unwrap(), s(-7));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(s(1).checked_div(&s(0)), Err(NumError::DivisionByZero));
        assert_eq!(s(0).recip(), Err(NumError::DivisionByZero));
        assert_eq!(s(0).pow(-1), Err(NumError::DivisionByZero));
        assert_eq!(q(2, 3).pow(-2).unwrap(), q(9, 4));
    }

    #[test]
    fn hyperbolic_surd_examples() {
        let p = make_surd(SurdKind::Hyperbolic, s(2)).unwrap();
        assert_eq!(p.value, q(5, 4));
        assert_eq!(p.root, q(3, 4));
        assert_eq!(p.bar(), s(2));
        let one = make_surd(SurdKind::Hyperbolic, s(1)).unwrap();
        assert_eq!(one.value, s(1));
        assert_eq!(one.root, s(0));
    }

    #[test]
    fn square_surd_example() {
        let p = make_surd(SurdKind::Square, s(3)).unwrap();
        assert_eq!(p.value, s(9));
        assert_eq!(p.root, s(3));
    }

    #[test]
    fn zero_seed_rejected() {
        assert_eq!(
            make_surd(SurdKind::Square, s(0)),
            Err(NumError::ZeroSeed)
        );
    }

    #[test]
    fn flip_negates_root() {
        let p = make_surd(SurdKind::Hyperbolic, q(3, 7)).unwrap();
        let f = p.flip_branch();
        assert_eq!(f.value, p.value);
        assert_eq!(f.root, -&p.root);
        assert_eq!(f.flip_branch(), p);
    }

    #[test]
    fn serde_round_trip() {
        let v = q(-22, 7);
        let j = serde_json::to_string(&v).unwrap();
        assert_eq!(j, "\"-22/7\"");
        let back: Scalar = serde_json::from_str(&j).unwrap();
        assert_eq!(back, v);
    }
}
