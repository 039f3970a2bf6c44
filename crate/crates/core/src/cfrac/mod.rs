//! Exact extended rationals and finite continued fractions `[k_0; k_1, …, k_m]`.

mod extended;

pub use extended::ExtendedRational;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `A_k(w) = 1/(k + w)`.
pub fn apply_a(k: &BigUint, w: &ExtendedRational) -> Result<ExtendedRational> {
    if k.is_zero() {
        return Err(Error::domain("partial quotient", k));
    }
    w.check_unit_interval("A_k argument")?;
    Ok(a_map(&BigInt::from(k.clone()), w))
}

fn a_map(k: &BigInt, w: &ExtendedRational) -> ExtendedRational {
    w.unimodular_map(&BigInt::zero(), &BigInt::one(), &BigInt::one(), k)
}

/// A finite continued fraction `k_0 + 1/(k_1 + 1/(… + 1/k_m))`.
///
/// Any sequence of positive tail entries is representable; [`expand`] returns the
/// canonical form, whose last tail entry is at least 2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    head: BigUint,
    tail: Vec<BigUint>,
}

impl ContinuedFraction {
    pub fn new(head: BigUint, tail: Vec<BigUint>) -> Result<Self> {
        if let Some(k) = tail.iter().find(|k| k.is_zero()) {
            return Err(Error::domain("partial quotient", k));
        }
        Ok(Self { head, tail })
    }

    pub fn from_u64s(head: u64, tail: &[u64]) -> Result<Self> {
        Self::new(
            BigUint::from(head),
            tail.iter().map(|&k| BigUint::from(k)).collect(),
        )
    }

    pub fn head(&self) -> &BigUint {
        &self.head
    }

    pub fn tail(&self) -> &[BigUint] {
        &self.tail
    }

    /// Canonical iff the expansion is the one produced by the Euclidean algorithm.
    pub fn is_canonical(&self) -> bool {
        self.tail.last().is_none_or(|k| !k.is_one())
    }

    /// Rewrites a trailing `…, k, 1` as `…, k + 1` (and `[k; 1]` as `[k + 1;]`).
    pub fn canonicalize(mut self) -> Self {
        if self.tail.last().is_some_and(|k| k.is_one()) {
            self.tail.pop();
            match self.tail.last_mut() {
                Some(k) => *k += 1u32,
                None => self.head += 1u32,
            }
        }
        self
    }

    /// `k_0 + A_{k_1} ∘ … ∘ A_{k_m}(w)` for `w ∈ [0, 1]`.
    pub fn evaluate(&self, w: &ExtendedRational) -> Result<ExtendedRational> {
        w.check_unit_interval("continued fraction tail parameter")?;
        Ok(self.evaluate_unchecked(w))
    }

    fn evaluate_unchecked(&self, w: &ExtendedRational) -> ExtendedRational {
        let mut v = w.clone();
        for k in self.tail.iter().rev() {
            v = a_map(&BigInt::from(k.clone()), &v);
        }
        let head = BigInt::from(self.head.clone());
        v.unimodular_map(&BigInt::one(), &head, &BigInt::zero(), &BigInt::one())
    }

    /// Value with the tail parameter `w = 0`.
    pub fn value(&self) -> ExtendedRational {
        self.evaluate_unchecked(&ExtendedRational::zero())
    }

    /// Floating-point value, evaluated from the innermost quotient outwards.
    pub fn value_f64(&self) -> f64 {
        let mut v = 0.0;
        for k in self.tail.iter().rev() {
            v = 1.0 / (k.to_f64().unwrap_or(f64::INFINITY) + v);
        }
        self.head.to_f64().unwrap_or(f64::INFINITY) + v
    }

    /// Successive truncations `[k_0; k_1, …, k_j]`. The trivial truncation `0`
    /// of a value below 1 is omitted, so for `x ∈ (0, 1)` the `j`-th entry is
    /// `A_{k_1,…,k_j}(0)`.
    pub fn convergents(&self) -> Vec<ExtendedRational> {
        let head = BigInt::from(self.head.clone());
        // Standard recurrences p_j = k_j p_{j-1} + p_{j-2}, q_j likewise.
        let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
        let (mut p, mut q) = (head.clone(), BigInt::one());
        let mut out = Vec::with_capacity(self.tail.len() + 1);
        if !head.is_zero() || self.tail.is_empty() {
            out.push(ExtendedRational::integer(head));
        }
        for k in &self.tail {
            let k = BigInt::from(k.clone());
            let p_next = &k * &p + &p_prev;
            let q_next = &k * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            out.push(ExtendedRational::from_reduced(p.clone(), q.clone()));
        }
        out
    }

    /// Continued fraction of the tent image `min(x/(1−x), (1−x)/x)` of a value
    /// `x = [0; k_1, k_2, …] ∈ (0, 1)`: `[0; k_1 − 1, k_2, …]` when `k_1 > 1`,
    /// `[0; k_2, k_3, …]` when `k_1 = 1`. The result is canonicalized.
    pub fn shift_decrement(&self) -> Result<Self> {
        if !self.head.is_zero() || self.tail.is_empty() {
            return Err(Error::domain("shift_decrement input", self));
        }
        let mut tail = self.tail.clone();
        if tail[0].is_one() {
            tail.remove(0);
            if tail.is_empty() {
                return Err(Error::Degenerate(format!(
                    "{self} is the endpoint 1; its tent image is 0"
                )));
            }
        } else {
            tail[0] -= 1u32;
        }
        Ok(Self {
            head: BigUint::zero(),
            tail,
        }
        .canonicalize())
    }

    /// `1/[k_0; k_1, …] = [0; k_0, k_1, …]` for `k_0 ≥ 1`.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.head.is_zero() {
            return Err(Error::domain("reciprocal_cf head", &self.head));
        }
        let mut tail = Vec::with_capacity(self.tail.len() + 1);
        tail.push(self.head.clone());
        tail.extend(self.tail.iter().cloned());
        Ok(Self {
            head: BigUint::zero(),
            tail,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("continued fraction serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|_| Error::Parse(s.into()))
    }
}

/// Canonical continued fraction of a positive rational (Euclidean algorithm).
pub fn expand(x: &ExtendedRational) -> Result<ContinuedFraction> {
    if !x.is_positive() {
        return Err(Error::domain("expand", x));
    }
    let mut p = x.numer().clone();
    let mut q = x.denom().clone();
    let (head, r) = p.div_rem(&q);
    let head = head.to_biguint().unwrap();
    p = r;
    let mut tail = Vec::new();
    while !p.is_zero() {
        std::mem::swap(&mut p, &mut q);
        let (k, r) = p.div_rem(&q);
        tail.push(k.to_biguint().unwrap());
        p = r;
    }
    Ok(ContinuedFraction { head, tail })
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};", self.head)?;
        for (i, k) in self.tail.iter().enumerate() {
            if i == 0 {
                write!(f, " {k}")?;
            } else {
                write!(f, ", {k}")?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Debug for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// JSON form: a flat integer array [k_0, k_1, …, k_m] of unbounded size.
impl Serialize for ContinuedFraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let numbers: Vec<serde_json::Number> = std::iter::once(&self.head)
            .chain(&self.tail)
            .map(|k| k.to_string().parse().expect("decimal digits form a JSON number"))
            .collect();
        numbers.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ContinuedFraction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let numbers = Vec::<serde_json::Number>::deserialize(deserializer)?;
        let mut entries = numbers.iter().map(|n| {
            n.as_str()
                .parse::<BigUint>()
                .map_err(|_| D::Error::custom(format!("bad partial quotient {n}")))
        });
        let head = entries
            .next()
            .ok_or_else(|| D::Error::custom("empty continued fraction"))??;
        let tail = entries.collect::<std::result::Result<Vec<_>, _>>()?;
        ContinuedFraction::new(head, tail).map_err(D::Error::custom)
    }
}
