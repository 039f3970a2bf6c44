use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::ratio_to_f64;

/// A point of the extended real line `ℝ ∪ {∞}` with exact rational coordinates.
///
/// Stored as a reduced fraction `num/den` with `den ≥ 0`. The point at infinity
/// is the single fraction `1/0`; it compares greater than every finite value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtendedRational {
    num: BigInt,
    den: BigInt,
}

impl ExtendedRational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            if num.is_zero() {
                return Err(Error::Degenerate("0/0".into()));
            }
            return Ok(Self::infinity());
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Ok(Self { num, den })
    }

    /// Builds `num/den` from parts already known to be coprime with `den ≥ 0`.
    pub(crate) fn from_reduced(num: BigInt, den: BigInt) -> Self {
        debug_assert!(!den.is_negative());
        debug_assert!(num.gcd(&den).is_one());
        if den.is_zero() {
            Self::infinity()
        } else {
            Self { num, den }
        }
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self {
            num: n.into(),
            den: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn infinity() -> Self {
        Self {
            num: BigInt::one(),
            den: BigInt::zero(),
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.is_finite() && self.num.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.is_finite() && self.num.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// Image under `x ↦ (a x + b)/(c x + d)` for an integer matrix of
    /// determinant ±1. Such maps send reduced fractions to reduced fractions,
    /// so no gcd is taken; `∞ = 1/0` needs no special case.
    pub fn unimodular_map(&self, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Self {
        debug_assert!({
            let det = a * d - b * c;
            det.is_one() || (-det).is_one()
        });
        let mut num = a * &self.num + b * &self.den;
        let mut den = c * &self.num + d * &self.den;
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Self::from_reduced(num, den)
    }

    /// Small-coefficient variant of [`unimodular_map`](Self::unimodular_map).
    pub fn unimodular_map_i64(&self, a: i64, b: i64, c: i64, d: i64) -> Self {
        debug_assert!((a * d - b * c).abs() == 1);
        let mut num = &self.num * a + &self.den * b;
        let mut den = &self.num * c + &self.den * d;
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Self::from_reduced(num, den)
    }

    /// `-x`; `∞` is its own negative.
    pub fn neg(&self) -> Self {
        if self.is_infinite() {
            return self.clone();
        }
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    /// `1/x` with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(&self) -> Self {
        self.unimodular_map_i64(0, 1, 1, 0)
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_finite()
            .then(|| BigRational::new_raw(self.num.clone(), self.den.clone()))
    }

    /// Exact value of a finite float.
    pub fn from_f64(x: f64) -> Option<Self> {
        if x.is_infinite() {
            return Some(Self::infinity());
        }
        BigRational::from_float(x).map(Self::from)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_infinite() {
            return f64::INFINITY;
        }
        ratio_to_f64(&self.num, &self.den)
    }

    /// `⌊x⌋` for finite `x`.
    pub fn floor(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.num.div_floor(&self.den))
    }

    pub(crate) fn check_unit_interval(&self, what: &'static str) -> Result<()> {
        if self.is_negative() || self.is_infinite() || self.num > self.den {
            return Err(Error::domain(what, self));
        }
        Ok(())
    }
}

impl From<BigRational> for ExtendedRational {
    fn from(r: BigRational) -> Self {
        let (num, den) = r.into_raw();
        Self::from_reduced(num, den)
    }
}

impl From<i64> for ExtendedRational {
    fn from(n: i64) -> Self {
        Self::integer(n)
    }
}

impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (&self.num * &other.den).cmp(&(&other.num * &self.den)),
        }
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;

    /// Accepts `p/q`, a bare integer, or `inf` / `∞`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t, "inf" | "Inf" | "infinity" | "∞" | "1/0") {
            return Ok(Self::infinity());
        }
        let parse = |part: &str| part.trim().parse::<BigInt>().map_err(|_| Error::Parse(s.into()));
        match t.split_once('/') {
            Some((p, q)) => {
                let (p, q) = (parse(p)?, parse(q)?);
                if q.is_zero() {
                    return Err(Error::Parse(s.into()));
                }
                Self::new(p, q)
            }
            None => Ok(Self::integer(parse(t)?)),
        }
    }
}

impl Serialize for ExtendedRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtendedRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExtendedRational {
        s.parse().unwrap()
    }

    #[test]
    fn reduces_and_normalizes_sign() {
        let x = ExtendedRational::ratio(4, -6).unwrap();
        assert_eq!(x.numer(), &BigInt::from(-2));
        assert_eq!(x.denom(), &BigInt::from(3));
        assert_eq!(ExtendedRational::ratio(-5, 0).unwrap(), ExtendedRational::infinity());
        assert!(ExtendedRational::ratio(0, 0).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(q("10/4").to_string(), "5/2");
        assert_eq!(q("-3").to_string(), "-3/1");
        assert_eq!(q("inf"), ExtendedRational::infinity());
        assert!("1/x".parse::<ExtendedRational>().is_err());
        assert!("2/0".parse::<ExtendedRational>().is_err());
    }

    #[test]
    fn order_puts_infinity_last() {
        let mut v = vec![q("inf"), q("1/2"), q("-7"), q("0")];
        v.sort();
        assert_eq!(v, vec![q("-7"), q("0"), q("1/2"), q("inf")]);
    }

    #[test]
    fn recip_and_neg() {
        assert_eq!(q("0").recip(), q("inf"));
        assert_eq!(q("inf").recip(), q("0"));
        assert_eq!(q("-2/3").recip(), q("-3/2"));
        assert_eq!(q("inf").neg(), q("inf"));
        assert_eq!(q("-2/3").abs(), q("2/3"));
    }

    #[test]
    fn floor_and_float() {
        assert_eq!(q("-1/2").floor().unwrap(), BigInt::from(-1));
        assert_eq!(q("7/2").floor().unwrap(), BigInt::from(3));
        assert_eq!(q("3/8").to_f64(), 0.375);
        assert_eq!(ExtendedRational::from_f64(0.375).unwrap(), q("3/8"));
    }
}
