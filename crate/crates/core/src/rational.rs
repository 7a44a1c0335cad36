//! Exact rational scalars and the generalized binomial symbol.
//!
//! Every coefficient in the library is a [`Rational`], an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator.  Rationals print
//! and parse as decimal-free `"a/b"` strings (`"3"` when the denominator is 1).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::str::FromStr;

use crate::error::ParseError;

/// Arbitrary-precision rational number in lowest terms.
pub type Rational = BigRational;

/// Builds the rational `n/d`.
///
/// # Panics
///
/// Panics when `d == 0`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `"a/b"`, or `"a"` for integers.
pub fn fmt_q(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"a"` or `"a/b"` into a rational.
pub fn parse_q(s: &str) -> Result<Rational, ParseError> {
    let s = s.trim();
    let bad = || ParseError::Rational(s.to_string());
    match s.split_once('/') {
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Generalized binomial coefficient `alpha (alpha-1) ... (alpha-j+1) / j!`.
///
/// ```
/// use voatwist::rational::{binomial_coeff, q};
/// assert_eq!(binomial_coeff(&q(-1, 2), 2), q(3, 8));
/// assert_eq!(binomial_coeff(&q(2, 1), 3), q(0, 1));
/// ```
pub fn binomial_coeff(alpha: &Rational, j: u32) -> Rational {
    let mut acc = Rational::one();
    for k in 0..j {
        acc *= alpha - qi(k as i64);
        acc /= qi(k as i64 + 1);
    }
    acc
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * qi(k))
}

/// Integer power of a rational; negative exponents invert.
pub fn qpow(x: &Rational, e: i64) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= x;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Returns the value as an `i64` when it is an integer that fits.
pub fn to_i64(x: &Rational) -> Option<i64> {
    if !x.is_integer() {
        return None;
    }
    i64::try_from(x.numer()).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_matches_direct_products() {
        assert_eq!(binomial_coeff(&q(1, 2), 1), q(1, 2));
        assert_eq!(binomial_coeff(&q(1, 2), 0), qi(1));
        assert_eq!(binomial_coeff(&q(-1, 2), 2), q(-1, 2) * q(-3, 2) / qi(2));
        for n in 0..5 {
            for j in (n + 1)..8 {
                assert!(binomial_coeff(&qi(n), j as u32).is_zero());
            }
        }
        assert_eq!(binomial_coeff(&qi(-1), 5), qi(-1));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "3", "-7/4", "12/5"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("6/4").unwrap(), q(3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }
}
