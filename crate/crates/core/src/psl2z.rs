//! The projective modular group `PSL(2, ℤ)` and its Möbius actions on the
//! extended real line and on the upper half plane.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cfrac::ExtendedRational;
use crate::error::{Error, Result};

/// The nine non-identity elements with `tr(M Mᵀ) ≤ 3`, as `[a, b, c, d]`
/// before sign canonicalization, indexed `E_0 … E_8`.
const GENERATOR_TABLE: [[i64; 4]; 9] = [
    [0, -1, 1, 0],
    [1, 1, 0, 1],
    [1, -1, 0, 1],
    [1, -1, 1, 0],
    [-1, -1, 1, 0],
    [1, 0, 1, 1],
    [1, 0, -1, 1],
    [0, -1, 1, 1],
    [0, -1, 1, -1],
];

/// Index `i ∈ 0..=8` of the generator `E_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorIndex(u8);

impl GeneratorIndex {
    pub const COUNT: usize = 9;

    pub fn new(i: usize) -> Result<Self> {
        if i < Self::COUNT {
            Ok(Self(i as u8))
        } else {
            Err(Error::GeneratorOutOfRange(i))
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..Self::COUNT as u8).map(Self)
    }

    /// Generator drawn from a 64-bit word by modular reduction.
    pub(crate) fn from_word(word: u64) -> Self {
        Self((word % Self::COUNT as u64) as u8)
    }
}

impl fmt::Display for GeneratorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E_{}", self.0)
    }
}

/// An element `±[[a, b], [c, d]]` of `PSL(2, ℤ)`, stored in the representative
/// with `c > 0`, or `c = 0` and `d > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjectiveMatrix {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl ProjectiveMatrix {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if !(&a * &d - &b * &c).is_one() {
            return Err(Error::NotUnimodular {
                a: a.to_string(),
                b: b.to_string(),
                c: c.to_string(),
                d: d.to_string(),
            });
        }
        Ok(Self::canonical(a, b, c, d))
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    fn canonical(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        if c.is_negative() || (c.is_zero() && d.is_negative()) {
            Self {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            Self { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        Self::canonical(BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one())
    }

    pub fn generator(i: GeneratorIndex) -> Self {
        let [a, b, c, d] = GENERATOR_TABLE[i.get()];
        Self::canonical(a.into(), b.into(), c.into(), d.into())
    }

    /// All nine generators in index order.
    pub fn generators() -> Vec<Self> {
        GeneratorIndex::all().map(Self::generator).collect()
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_identity(&self) -> bool {
        self == &Self::identity()
    }

    pub fn multiply(&self, other: &Self) -> Self {
        Self::canonical(
            &self.a * &other.a + &self.b * &other.c,
            &self.a * &other.b + &self.b * &other.d,
            &self.c * &other.a + &self.d * &other.c,
            &self.c * &other.b + &self.d * &other.d,
        )
    }

    pub fn inverse(&self) -> Self {
        Self::canonical(
            self.d.clone(),
            -&self.b,
            -&self.c,
            self.a.clone(),
        )
    }

    /// Integer power of the matrix; negative exponents use the inverse.
    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity();
        let mut sq = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&sq);
            }
            sq = sq.multiply(&sq);
            e >>= 1;
        }
        acc
    }

    /// `a² + b² + c² + d² = tr(M Mᵀ)`.
    pub fn frobenius_norm_sq(&self) -> BigInt {
        &self.a * &self.a + &self.b * &self.b + &self.c * &self.c + &self.d * &self.d
    }

    /// True iff `tr(M Mᵀ) ≤ 3` and `M` is not the identity, i.e. the tile
    /// `h_M(D)` touches the fundamental domain `D`.
    pub fn is_unit_neighbor(&self) -> bool {
        self.frobenius_norm_sq() <= BigInt::from(3) && !self.is_identity()
    }

    /// Boundary action `x ↦ (a x + b)/(c x + d)` on `ℝ ∪ {∞}`.
    pub fn mobius_real(&self, x: &ExtendedRational) -> ExtendedRational {
        x.unimodular_map(&self.a, &self.b, &self.c, &self.d)
    }

    /// Action on an exact point of the upper half plane.
    ///
    /// With `det = 1`: `Im h(z) = Im z / |cz + d|²` and
    /// `Re h(z) = (ac|z|² + (ad + bc) Re z + bd) / |cz + d|²`.
    pub fn mobius_complex(&self, z: &UpperHalfPoint) -> UpperHalfPoint {
        let r = |n: &BigInt| BigRational::from_integer(n.clone());
        let (a, b, c, d) = (r(&self.a), r(&self.b), r(&self.c), r(&self.d));
        let norm_z = &z.re * &z.re + &z.im * &z.im;
        let cre = &c * &z.re + &d;
        let cim = &c * &z.im;
        let denom = &cre * &cre + &cim * &cim;
        let re = (&a * &c * &norm_z + (&a * &d + &b * &c) * &z.re + &b * &d) / &denom;
        let im = &z.im / &denom;
        UpperHalfPoint { re, im }
    }

    /// Floating-point action on the upper half plane.
    pub fn mobius_float(&self, z: FloatPoint) -> FloatPoint {
        let [a, b, c, d] = self.to_f64();
        FloatPoint((z.0 * a + b) / (z.0 * c + d))
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [
            ExtendedRational::integer(self.a.clone()).to_f64(),
            ExtendedRational::integer(self.b.clone()).to_f64(),
            ExtendedRational::integer(self.c.clone()).to_f64(),
            ExtendedRational::integer(self.d.clone()).to_f64(),
        ]
    }

    /// `"a,b,c,d"` label.
    pub fn label(&self) -> String {
        format!("{},{},{},{}", self.a, self.b, self.c, self.d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|_| Error::Parse(s.into()))
    }
}

impl fmt::Display for ProjectiveMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for ProjectiveMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// JSON form: [a, b, c, d] as decimal strings.
impl Serialize for ProjectiveMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries()
            .map(|e| e.to_string())
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProjectiveMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let [a, b, c, d] = <[String; 4]>::deserialize(deserializer)?;
        let parse = |s: &str| s.parse::<BigInt>().map_err(D::Error::custom);
        Self::new(parse(&a)?, parse(&b)?, parse(&c)?, parse(&d)?).map_err(D::Error::custom)
    }
}

/// A point of the upper half plane with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UpperHalfPoint {
    re: BigRational,
    im: BigRational,
}

impl UpperHalfPoint {
    pub fn new(re: BigRational, im: BigRational) -> Result<Self> {
        if !im.is_positive() {
            return Err(Error::domain("imaginary part", im));
        }
        Ok(Self { re, im })
    }

    pub fn from_parts(re: &ExtendedRational, im: &ExtendedRational) -> Result<Self> {
        let re = re.to_rational().ok_or_else(|| Error::domain("real part", re))?;
        let im = im.to_rational().ok_or_else(|| Error::domain("imaginary part", im))?;
        Self::new(re, im)
    }

    /// `i`.
    pub fn i() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn abs_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_float(&self) -> FloatPoint {
        let conv = |r: &BigRational| ExtendedRational::from(r.clone()).to_f64();
        FloatPoint(Complex64::new(conv(&self.re), conv(&self.im)))
    }

    pub(crate) fn translate(&self, k: &BigInt) -> Self {
        Self {
            re: &self.re + BigRational::from_integer(k.clone()),
            im: self.im.clone(),
        }
    }

    /// `-1/z`.
    pub(crate) fn invert(&self) -> Self {
        let n = self.abs_sq();
        Self {
            re: -&self.re / &n,
            im: &self.im / n,
        }
    }
}

impl fmt::Display for UpperHalfPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (
            ExtendedRational::from(self.re.clone()),
            ExtendedRational::from(self.im.clone()),
        );
        write!(f, "{re}+{im}i")
    }
}

impl fmt::Debug for UpperHalfPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A floating-point point of the upper half plane. `Im` may underflow to zero
/// after long walks; callers treat that as having reached the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatPoint(pub Complex64);

impl FloatPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) || !re.is_finite() || !im.is_finite() {
            return Err(Error::domain("imaginary part", im));
        }
        Ok(Self(Complex64::new(re, im)))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }
}

impl fmt::Display for FloatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}{:+.16e}i", self.0.re, self.0.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(i: usize) -> ProjectiveMatrix {
        ProjectiveMatrix::generator(GeneratorIndex::new(i).unwrap())
    }

    fn m(a: i64, b: i64, c: i64, d: i64) -> ProjectiveMatrix {
        ProjectiveMatrix::from_i64(a, b, c, d).unwrap()
    }

    fn q(s: &str) -> ExtendedRational {
        s.parse().unwrap()
    }

    fn r(s: &str) -> BigRational {
        q(s).to_rational().unwrap()
    }

    #[test]
    fn multiply_examples() {
        let id = ProjectiveMatrix::identity();
        assert_eq!(g(1).multiply(&g(2)), id);
        assert_eq!(g(0).multiply(&g(0)), id);
        assert_eq!(g(0).multiply(&g(1)), m(0, -1, 1, 1));
        assert_eq!(g(0).multiply(&g(1)), g(7));
    }

    #[test]
    fn inverse_examples() {
        let id = ProjectiveMatrix::identity();
        assert_eq!(id.inverse(), id);
        assert_eq!(g(1).inverse(), g(2));
        assert_eq!(g(0).inverse(), g(0));
        for e in ProjectiveMatrix::generators() {
            assert!(e.multiply(&e.inverse()).is_identity());
        }
    }

    #[test]
    fn generator_examples() {
        assert_eq!(g(0).entries().map(|e| e.clone()), [0, -1, 1, 0].map(BigInt::from));
        assert_eq!(g(5).entries().map(|e| e.clone()), [1, 0, 1, 1].map(BigInt::from));
        assert_eq!(g(3).entries().map(|e| e.clone()), [1, -1, 1, 0].map(BigInt::from));
        assert_eq!(GeneratorIndex::new(9), Err(Error::GeneratorOutOfRange(9)));
    }

    #[test]
    fn canonical_sign_identifies_negatives() {
        assert_eq!(m(-1, 0, 1, -1), m(1, 0, -1, 1));
        assert_eq!(m(-1, 0, 0, -1), ProjectiveMatrix::identity());
        assert!(ProjectiveMatrix::from_i64(1, 1, 1, 1).is_err());
    }

    #[test]
    fn unit_neighbor_examples() {
        assert!(g(3).is_unit_neighbor());
        assert!(!ProjectiveMatrix::identity().is_unit_neighbor());
        assert!(!m(2, 1, 1, 1).is_unit_neighbor());
    }

    #[test]
    fn mobius_real_examples() {
        assert_eq!(g(0).mobius_real(&q("inf")), q("0"));
        assert_eq!(g(1).mobius_real(&q("2/3")), q("5/3"));
        assert_eq!(g(5).mobius_real(&q("-1")), q("inf"));
        assert_eq!(g(5).mobius_real(&q("inf")), q("1"));
    }

    #[test]
    fn mobius_complex_examples() {
        let i = UpperHalfPoint::i();
        assert_eq!(ProjectiveMatrix::identity().mobius_complex(&i), i);
        assert_eq!(g(0).mobius_complex(&i), i);
        let one_plus_i = UpperHalfPoint::new(r("1"), r("1")).unwrap();
        assert_eq!(g(1).mobius_complex(&i), one_plus_i);
        // h_5(i) = i/(1+i) = (1+i)/2
        let half = UpperHalfPoint::new(r("1/2"), r("1/2")).unwrap();
        assert_eq!(g(5).mobius_complex(&i), half);
    }

    #[test]
    fn mobius_float_matches_exact() {
        let z = UpperHalfPoint::new(r("1/3"), r("6/5")).unwrap();
        for e in ProjectiveMatrix::generators() {
            let exact = e.mobius_complex(&z).to_float();
            let float = e.mobius_float(z.to_float());
            assert!((exact.0 - float.0).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(UpperHalfPoint::new(r("0"), r("0")).is_err());
        assert!(UpperHalfPoint::new(r("0"), r("-1")).is_err());
        assert!(FloatPoint::new(0.0, 0.0).is_err());
    }

    #[test]
    fn pow_of_translation() {
        assert_eq!(g(1).pow(3), m(1, 3, 0, 1));
        assert_eq!(g(1).pow(-2), m(1, -2, 0, 1));
        assert!(g(0).pow(2).is_identity());
    }

    #[test]
    fn json_round_trip() {
        let big = ProjectiveMatrix::new(
            BigInt::one(),
            "100000000000000000000000".parse().unwrap(),
            BigInt::zero(),
            BigInt::one(),
        )
        .unwrap();
        let s = big.to_json();
        assert_eq!(s, r#"["1","100000000000000000000000","0","1"]"#);
        assert_eq!(ProjectiveMatrix::from_json(&s).unwrap(), big);
        assert!(ProjectiveMatrix::from_json(r#"["1","1","1","1"]"#).is_err());
    }
}
