//! Exact rational numbers used for every distance and radius.
//!
//! Values are stored reduced with a positive denominator. Parsed input is
//! limited to components that fit in an `i64`, which leaves the `i128`
//! backing store enough headroom for the sums, halvings and products that
//! the covering algorithms perform on radii.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational(Ratio<i128>);

/// Error produced when a string is not a canonical `p` or `p/q` rational.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational")]
    Empty,
    #[error("floating point value {0:?} is not accepted; write it as p/q")]
    Float(String),
    #[error("invalid rational {0:?}; expected p or p/q with decimal integers")]
    Syntax(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("component of {0:?} does not fit in 64 bits")]
    Overflow(String),
}

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Builds `num/den`, reducing. Panics when `den == 0`.
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(Ratio::new(num, den))
    }

    pub fn from_integer(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn checked_add(&self, rhs: &Self) -> Option<Self> {
        self.0.checked_add(&rhs.0).map(Rational)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Option<Self> {
        self.0.checked_sub(&rhs.0).map(Rational)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        self.0.checked_mul(&rhs.0).map(Rational)
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        self.0.checked_div(&rhs.0).map(Rational)
    }

    /// Value strictly between `self` and `other` (their average).
    pub fn midpoint(&self, other: &Self) -> Self {
        (*self + *other) / Rational::from_integer(2)
    }

    /// `2^k` for `k >= 0`, `1/2^-k` otherwise.
    pub fn pow2(k: i32) -> Self {
        let e = k.unsigned_abs();
        assert!(e < 126, "power of two out of range");
        let p = 1i128 << e;
        if k >= 0 {
            Rational::from_integer(p)
        } else {
            Rational::new(1, p)
        }
    }

    /// Smallest integer `k` with `2^k >= self`. Requires `self > 0`.
    pub fn ceil_log2(&self) -> i32 {
        assert!(self.is_positive(), "ceil_log2 of a non-positive value");
        let (n, d) = (self.numer(), self.denom());
        if n >= d {
            // smallest k >= 0 with d * 2^k >= n
            let mut k = 0;
            let mut v = d;
            while v < n {
                v <<= 1;
                k += 1;
            }
            k
        } else {
            // k = -j for the largest j with n * 2^j <= d
            let mut j = 0;
            let mut v = n;
            while v < d {
                v <<= 1;
                j += 1;
            }
            if v == d {
                -j
            } else {
                -(j - 1)
            }
        }
    }

    /// `⌈-log₂ self⌉`, the smallest `k` with `self * 2^k >= 1`.
    pub fn ceil_neg_log2(&self) -> i32 {
        self.recip().ceil_log2()
    }

    /// Fast exact comparison; falls back to the overflow-safe generic path.
    fn compare(&self, other: &Self) -> Ordering {
        let (a, b) = (self.0.numer(), self.0.denom());
        let (c, d) = (other.0.numer(), other.0.denom());
        if b == d {
            return a.cmp(c);
        }
        match (i128::checked_mul(*a, *d), i128::checked_mul(*c, *b)) {
            (Some(x), Some(y)) => x.cmp(&y),
            _ => self.0.cmp(&other.0),
        }
    }
}

fn overflow<T>(v: Option<T>) -> T {
    v.expect("rational arithmetic overflow")
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Self) -> Self {
        overflow(self.checked_add(&rhs))
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Self) -> Self {
        overflow(self.checked_sub(&rhs))
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Self) -> Self {
        overflow(self.checked_mul(&rhs))
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero");
        overflow(self.checked_div(&rhs))
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Self {
        Rational(-self.0)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
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

fn parse_component(s: &str, whole: &str, allow_sign: bool) -> Result<i128, ParseRationalError> {
    let digits = match s.strip_prefix('-') {
        Some(rest) if allow_sign => rest,
        _ => s,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Syntax(whole.to_string()));
    }
    s.parse::<i64>()
        .map(i128::from)
        .map_err(|_| ParseRationalError::Overflow(whole.to_string()))
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        if s.contains(['.', 'e', 'E']) && !s.contains('/') {
            return Err(ParseRationalError::Float(s.to_string()));
        }
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (parse_component(n, s, true)?, parse_component(d, s, false)?),
            None => (parse_component(s, s, true)?, 1),
        };
        if den == 0 {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        let g = num.gcd(&den);
        Ok(Rational(Ratio::new_raw(num / g, den / g)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl de::Visitor<'_> for Visitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string \"p\" or \"p/q\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
                Err(E::custom(ParseRationalError::Float(v.to_string())))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Err(E::custom(format!(
                    "bare number {v}; rationals must be quoted strings"
                )))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Err(E::custom(format!(
                    "bare number {v}; rationals must be quoted strings"
                )))
            }
        }

        deserializer.deserialize_any(Visitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(r("2/4"), Rational::new(1, 2));
        assert_eq!(r("-3/6").to_string(), "-1/2");
        assert_eq!(r("7").to_string(), "7");
        assert_eq!(r("0/5").to_string(), "0");
    }

    #[test]
    fn parse_rejects_floats_and_garbage() {
        assert!(matches!("0.5".parse::<Rational>(), Err(ParseRationalError::Float(_))));
        assert!(matches!("1e3".parse::<Rational>(), Err(ParseRationalError::Float(_))));
        assert!(matches!("1/0".parse::<Rational>(), Err(ParseRationalError::ZeroDenominator(_))));
        assert!(matches!("1/-2".parse::<Rational>(), Err(ParseRationalError::Syntax(_))));
        assert!(matches!("+1".parse::<Rational>(), Err(ParseRationalError::Syntax(_))));
        assert!(matches!(" 1".parse::<Rational>(), Err(ParseRationalError::Syntax(_))));
        assert!(matches!("".parse::<Rational>(), Err(ParseRationalError::Empty)));
        assert!(matches!(
            "99999999999999999999".parse::<Rational>(),
            Err(ParseRationalError::Overflow(_))
        ));
    }

    #[test]
    fn ordering_is_exact() {
        assert!(r("1/3") < r("334/1000"));
        assert!(r("-1/2") < r("0"));
        assert_eq!(r("2/3").cmp(&r("4/6")), Ordering::Equal);
    }

    #[test]
    fn log2_ceilings() {
        assert_eq!(r("1").ceil_neg_log2(), 0);
        assert_eq!(r("1/2").ceil_neg_log2(), 1);
        assert_eq!(r("1/3").ceil_neg_log2(), 2);
        assert_eq!(r("1/4").ceil_neg_log2(), 2);
        assert_eq!(r("1/5").ceil_neg_log2(), 3);
        assert_eq!(r("3/4").ceil_neg_log2(), 1);
        assert_eq!(r("1").ceil_log2(), 0);
        assert_eq!(r("2").ceil_log2(), 1);
        assert_eq!(r("3").ceil_log2(), 2);
        assert_eq!(r("4").ceil_log2(), 2);
        assert_eq!(r("5/2").ceil_log2(), 2);
        assert_eq!(r("3/4").ceil_log2(), 0);
        assert_eq!(r("1/2").ceil_log2(), -1);
        assert_eq!(r("1/3").ceil_log2(), -1);
    }

    #[test]
    fn serde_uses_strings() {
        let v: Rational = serde_json::from_str("\"3/9\"").unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), "\"1/3\"");
        assert!(serde_json::from_str::<Rational>("0.5").is_err());
        assert!(serde_json::from_str::<Rational>("1").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn display_parse_roundtrip(n in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
                let x = Rational::new(n as i128, d as i128);
                prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
            }

            #[test]
            fn ceil_neg_log2_brackets(n in 1i64..10_000, d in 1i64..10_000) {
                prop_assume!(n <= d);
                let t = Rational::new(n as i128, d as i128);
                let k = t.ceil_neg_log2();
                prop_assert!(k >= 0);
                prop_assert!(t >= Rational::pow2(-k));
                if k > 0 {
                    prop_assert!(t < Rational::pow2(-(k - 1)));
                }
            }

            #[test]
            fn cmp_matches_cross_multiplication(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
                let x = Rational::new(a as i128, b as i128);
                let y = Rational::new(c as i128, d as i128);
                prop_assert_eq!(x.cmp(&y), (a * d).cmp(&(c * b)));
            }
        }
    }
}
