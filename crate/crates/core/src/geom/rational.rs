//! Exact arbitrary-precision rationals.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// An exact fraction in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`; panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Option<Self> {
        if denom.is_zero() {
            None
        } else {
            Some(Rational(BigRational::new(numer, denom)))
        }
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

    /// -1, 0 or +1.
    pub fn signum(&self) -> i8 {
        if self.0.is_zero() {
            0
        } else if self.0.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Lossy conversion, for display only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Always `p/q`, including `q = 1`.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }

    pub fn midpoint(&self, other: &Rational) -> Rational {
        (self + other) / Rational::from_integer(2)
    }

    pub fn min_ref<'a>(&'a self, other: &'a Rational) -> &'a Rational {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max_ref<'a>(&'a self, other: &'a Rational) -> &'a Rational {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// Parses `7`, `-12.5` or `p/q`.
pub fn rational_parse(text: &str) -> Result<Rational, RationalParseError> {
    text.parse()
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for Rational {
    type Err = RationalParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let malformed = || RationalParseError::Malformed(text.to_string());
        let s = text.trim();
        if let Some((p, q)) = s.split_once('/') {
            let numer = parse_integer(p).ok_or_else(malformed)?;
            if q.starts_with(['+', '-']) {
                return Err(malformed());
            }
            let denom = parse_integer(q).ok_or_else(malformed)?;
            return Rational::from_bigints(numer, denom)
                .ok_or_else(|| RationalParseError::ZeroDenominator(text.to_string()));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let (negative, int_digits) = match int_part.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
            };
            let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
            if (int_digits.is_empty() && frac_part.is_empty())
                || !all_digits(int_digits)
                || !all_digits(frac_part)
            {
                return Err(malformed());
            }
            let joined = format!("{int_digits}{frac_part}");
            let mut numer: BigInt = if joined.is_empty() {
                BigInt::zero()
            } else {
                joined.parse().map_err(|_| malformed())?
            };
            if negative {
                numer = -numer;
            }
            let denom = num_traits::pow(BigInt::from(10), frac_part.len());
            return Ok(Rational(BigRational::new(numer, denom)));
        }
        let numer = parse_integer(s).ok_or_else(malformed)?;
        Ok(Rational(BigRational::from_integer(numer)))
    }
}

/// `p` for integers, `p/q` otherwise.
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

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
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
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

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

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_decimal_exactly() {
        assert_eq!(r("0.5"), Rational::new(1, 2));
        assert_eq!(r("-12.5"), Rational::new(-25, 2));
        assert_eq!(r("0.1"), Rational::new(1, 10));
        assert_eq!(r(".25"), Rational::new(1, 4));
        assert_eq!(r("3."), Rational::from_integer(3));
    }

    #[test]
    fn parses_integer_and_fraction() {
        assert_eq!(r("-3"), Rational::from_integer(-3));
        assert_eq!(r("6/4"), Rational::new(3, 2));
        assert_eq!(r("-6/4").to_fraction_string(), "-3/2");
        assert_eq!(r("7").to_fraction_string(), "7/1");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            "1/0".parse::<Rational>(),
            Err(RationalParseError::ZeroDenominator(_))
        ));
        for bad in [
            "", "abc", "1/-2", "1.2.3", "--1", ".", "1e5", "1/", "/2", "- 1",
        ] {
            assert!(
                matches!(
                    bad.parse::<Rational>(),
                    Err(RationalParseError::Malformed(_))
                ),
                "{bad:?} should be malformed"
            );
        }
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "0",
            "-7",
            "1/3",
            "-22/7",
            "123456789012345678901234567891/7",
        ] {
            assert_eq!(r(s).to_string(), s);
        }
    }
}
