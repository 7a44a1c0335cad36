//! Exact exponents for Puiseux monomials and vertex-operator mode indices.
//!
//! An [`Exponent`] is a small reduced fraction.  The index sets that occur in
//! practice are cosets `r/T + Z`, so every exponent also belongs to `(1/D)Z`
//! for a session denominator `D`; [`Exponent::in_lattice`] checks that
//! membership where an operation requires it.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use crate::error::ParseError;
use crate::rational::Rational;

/// A reduced fraction `p/q` with `q > 0`, used as an exponent or mode index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Exponent(Ratio<i64>);

impl Exponent {
    /// The fraction `n/d`.
    ///
    /// # Panics
    ///
    /// Panics when `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        Exponent(Ratio::new(n, d))
    }

    /// The integer `n`.
    pub const fn int(n: i64) -> Self {
        Exponent(Ratio::new_raw(n, 1))
    }

    /// Zero.
    pub const fn zero() -> Self {
        Exponent::int(0)
    }

    /// Numerator of the reduced fraction.
    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    /// Denominator of the reduced fraction.
    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    /// True when the exponent is an integer.
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// True when `d * self` is an integer.
    pub fn in_lattice(&self, d: i64) -> bool {
        d % self.denom() == 0
    }

    /// Greatest integer not exceeding the exponent.
    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    /// Least integer not below the exponent.
    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    /// Fractional part in `[0, 1)`.
    pub fn frac(&self) -> Exponent {
        *self - Exponent::int(self.floor())
    }

    /// The integer value, if the exponent is integral.
    pub fn to_int(&self) -> Option<i64> {
        self.is_integer().then(|| self.numer())
    }

    /// Exact conversion to an arbitrary-precision rational.
    pub fn to_rational(&self) -> Rational {
        Rational::new(self.numer().into(), self.denom().into())
    }

    /// Conversion from a rational, failing when it does not fit in `i64`.
    pub fn from_rational(x: &Rational) -> Option<Exponent> {
        Some(Exponent::new(x.numer().to_i64()?, x.denom().to_i64()?))
    }

    /// Absolute value.
    pub fn abs(&self) -> Exponent {
        Exponent(self.0.abs())
    }

    /// True when negative.
    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// True when strictly positive.
    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// True when zero.
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Least common multiple of the denominators of a family of exponents.
    pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Exponent>) -> i64 {
        xs.into_iter().fold(1, |acc, x| acc.lcm(&x.denom()))
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::int(n)
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, o: Exponent) -> Exponent {
        Exponent(self.0 + o.0)
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, o: Exponent) -> Exponent {
        Exponent(self.0 - o.0)
    }
}

impl Mul for Exponent {
    type Output = Exponent;
    fn mul(self, o: Exponent) -> Exponent {
        Exponent(self.0 * o.0)
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(-self.0)
    }
}

impl AddAssign for Exponent {
    fn add_assign(&mut self, o: Exponent) {
        self.0 += o.0;
    }
}

impl SubAssign for Exponent {
    fn sub_assign(&mut self, o: Exponent) {
        self.0 -= o.0;
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Exponent {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let bad = || ParseError::Exponent(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            None => Ok(Exponent::int(t.parse().map_err(|_| bad())?)),
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Exponent::new(n, d))
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_and_fraction() {
        let e = Exponent::new(-3, 2);
        assert_eq!(e.floor(), -2);
        assert_eq!(e.ceil(), -1);
        assert_eq!(e.frac(), Exponent::new(1, 2));
        assert!(e.in_lattice(2));
        assert!(!e.in_lattice(3));
    }

    #[test]
    fn parse_and_print() {
        let e: Exponent = "-6/4".parse().unwrap();
        assert_eq!(e.to_string(), "-3/2");
        assert_eq!("7".parse::<Exponent>().unwrap(), Exponent::int(7));
        assert!("1/0".parse::<Exponent>().is_err());
    }
}
