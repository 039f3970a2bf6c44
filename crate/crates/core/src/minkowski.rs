//! Minkowski's question mark function `?`, its inverse, the Denjoy–Minkowski
//! survival function `χ_{1/2}` and the stationary boundary law `λ`.
//!
//! At a rational `x = [0; k_1, …, k_m]` the value
//! `?(x) = 2 Σ_{n=1}^{m} (−1)^{n+1} 2^{−(k_1+…+k_n)}` is a dyadic rational, so
//! everything here is exact unless a function name says `f64`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::cfrac::{expand, ContinuedFraction, ExtendedRational};
use crate::error::{Error, Result};
use crate::numeric::dyadic_to_f64;

/// Largest binary exponent an exact dyadic value may carry (16 Mbit).
pub const MAX_EXPONENT: u64 = 1 << 24;

/// Exponent `α = log 2 / (2 log φ)` of the Hölder modulus of `?`.
pub fn holder_exponent() -> f64 {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    std::f64::consts::LN_2 / (2.0 * phi.ln())
}

/// `num / 2^exp` in lowest terms: `num` is odd whenever `exp > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    num: BigInt,
    exp: u64,
}

impl DyadicRational {
    pub fn new(num: BigInt, exp: u64) -> Self {
        let tz = if num.is_zero() {
            exp
        } else {
            num.trailing_zeros().unwrap_or(0).min(exp)
        };
        Self {
            num: num >> tz,
            exp: exp - tz,
        }
    }

    pub fn zero() -> Self {
        Self::new(BigInt::zero(), 0)
    }

    pub fn one() -> Self {
        Self::new(BigInt::one(), 0)
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u64) {
        let e = self.exp.max(other.exp);
        (
            &self.num << (e - self.exp),
            &other.num << (e - other.exp),
            e,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Self::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Self::new(a - b, e)
    }

    pub fn half(&self) -> Self {
        Self::new(self.num.clone(), self.exp + 1)
    }

    /// `1 − self`.
    pub fn complement(&self) -> Self {
        Self::one().sub(self)
    }

    pub fn to_f64(&self) -> f64 {
        dyadic_to_f64(&self.num, self.exp)
    }

    pub fn to_rational(&self) -> ExtendedRational {
        ExtendedRational::new(self.num.clone(), BigInt::one() << self.exp)
            .expect("power of two is nonzero")
    }

    /// Exact conversion of a rational whose denominator is a power of two.
    pub fn try_from_rational(x: &ExtendedRational) -> Result<Self> {
        let den = x.denom();
        if x.is_infinite() || (den & (den - 1u32)) != BigInt::zero() {
            return Err(Error::NotDyadic(x.to_string()));
        }
        Ok(Self::new(x.numer().clone(), den.bits() - 1))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Closed enclosure `[lo, hi]` of `?` over every point sharing a prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueBracket {
    pub lo: DyadicRational,
    pub hi: DyadicRational,
}

impl ValueBracket {
    pub fn width(&self) -> DyadicRational {
        self.hi.sub(&self.lo)
    }

    pub fn contains(&self, v: &DyadicRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }
}

/// `Σ_{n=1}^{m} (−1)^{n+1} 2^{S_m − S_n}` together with `S_m = k_1 + … + k_m`.
fn alternating_numerator<I>(quotients: I) -> Result<(BigInt, u64)>
where
    I: IntoIterator<Item = u64>,
{
    let mut acc = BigInt::zero();
    let mut total: u64 = 0;
    for (n, k) in quotients.into_iter().enumerate() {
        total = total
            .checked_add(k)
            .filter(|&t| t <= MAX_EXPONENT)
            .ok_or(Error::ExponentOverflow(total.saturating_add(k)))?;
        acc <<= k;
        if n % 2 == 0 {
            acc += 1;
        } else {
            acc -= 1;
        }
    }
    Ok((acc, total))
}

fn tail_as_u64(cf: &ContinuedFraction) -> Result<Vec<u64>> {
    cf.tail()
        .iter()
        .map(|k| k.to_u64().ok_or(Error::ExponentOverflow(u64::MAX)))
        .collect()
}

/// Exact `?(x)` for rational `x ∈ [0, 1]`.
pub fn qmark(x: &ExtendedRational) -> Result<DyadicRational> {
    x.check_unit_interval("qmark")?;
    if x.is_zero() {
        return Ok(DyadicRational::zero());
    }
    if x == &ExtendedRational::one() {
        return Ok(DyadicRational::one());
    }
    let quotients = tail_as_u64(&expand(x)?)?;
    let (num, total) = alternating_numerator(quotients)?;
    // 2 · num / 2^total
    Ok(DyadicRational::new(num, total - 1))
}

/// `?(x)` in floating point for a rational of any size. Terms below `2^−1100`
/// are dropped, so huge partial quotients cost nothing.
pub fn qmark_rational_f64(x: &ExtendedRational) -> Result<f64> {
    x.check_unit_interval("qmark")?;
    if x.is_zero() {
        return Ok(0.0);
    }
    let (mut p, mut q) = (x.numer().clone(), x.denom().clone());
    let mut total: u64 = 0;
    let mut sum = 0.0;
    let mut sign = 1.0;
    // x = p/q ≤ 1: the first Euclid step of [0; k_1, …] is q div p.
    while !p.is_zero() {
        let (k, r) = q.div_rem(&p);
        total = total.saturating_add(k.to_u64().unwrap_or(u64::MAX));
        if total > 1100 {
            break;
        }
        sum += sign * 2f64.powi(1 - total as i32);
        sign = -sign;
        q = p;
        p = r;
    }
    Ok(sum)
}

/// `?(x)` of a float, through the exact rational value of `x`.
pub fn qmark_f64(x: f64) -> Result<f64> {
    let r = ExtendedRational::from_f64(x).ok_or_else(|| Error::domain("qmark", x))?;
    qmark_rational_f64(&r)
}

/// `?(x)` by descending the Stern–Brocot tree from `0/1, 1/1`: each mediant
/// receives the average of the values at its two parents.
pub fn qmark_oracle(x: &ExtendedRational) -> Result<DyadicRational> {
    x.check_unit_interval("qmark_oracle")?;
    let (xp, xq) = (x.numer(), x.denom());
    let (mut lp, mut lq, mut lv) = (BigInt::zero(), BigInt::one(), DyadicRational::zero());
    let (mut rp, mut rq, mut rv) = (BigInt::one(), BigInt::one(), DyadicRational::one());
    if xp.is_zero() {
        return Ok(lv);
    }
    if xp == xq {
        return Ok(rv);
    }
    loop {
        let mp = &lp + &rp;
        let mq = &lq + &rq;
        let mv = lv.add(&rv).half();
        if mv.exponent() > MAX_EXPONENT {
            return Err(Error::ExponentOverflow(mv.exponent()));
        }
        match (xp * &mq).cmp(&(&mp * xq)) {
            Ordering::Equal => return Ok(mv),
            Ordering::Less => {
                rp = mp;
                rq = mq;
                rv = mv;
            }
            Ordering::Greater => {
                lp = mp;
                lq = mq;
                lv = mv;
            }
        }
    }
}

/// `?⁻¹(d)` for dyadic `d ∈ [0, 1]`.
///
/// Writing `d = 0.b_1…b_E` with `b_E = 1`, the equivalent infinite expansion
/// `0.b_1…b_{E−1} 0 111…` has alternating runs of zeros and ones whose lengths
/// are the partial quotients (the leading zero run, plus one, giving `k_1`).
pub fn qmark_inverse(d: &DyadicRational) -> Result<ExtendedRational> {
    if d < &DyadicRational::zero() || d > &DyadicRational::one() {
        return Err(Error::domain("qmark_inverse", d));
    }
    if d.numer().is_zero() {
        return Ok(ExtendedRational::zero());
    }
    if d == &DyadicRational::one() {
        return Ok(ExtendedRational::one());
    }
    let e = d.exponent();
    let num = d.numer();
    // digit b_j (1-based) is bit e − j of num
    let digit = |j: u64| -> bool { j < e && num.bit(e - j) };
    let mut tail: Vec<u64> = Vec::new();
    let mut run_bit = false;
    let mut run_len: u64 = 0;
    for j in 1..=e {
        let b = digit(j);
        if b == run_bit {
            run_len += 1;
        } else {
            tail.push(run_len);
            run_bit = b;
            run_len = 1;
        }
    }
    tail.push(run_len);
    tail[0] += 1;
    let cf = ContinuedFraction::from_u64s(0, &tail)?;
    Ok(cf.value())
}

/// `χ_{1/2}(y)` for `y > 0` (including `y = ∞`, where it is 0).
pub fn chi_half(y: &ExtendedRational) -> Result<DyadicRational> {
    if !(y.is_positive() || y.is_infinite()) {
        return Err(Error::domain("chi_half", y));
    }
    chi_half_closed(y)
}

/// `χ_{1/2}` on `[0, ∞]`, with the survival-function convention `χ_{1/2}(0) = 1`.
pub(crate) fn chi_half_closed(y: &ExtendedRational) -> Result<DyadicRational> {
    if y.is_zero() {
        return Ok(DyadicRational::one());
    }
    if y.is_infinite() {
        return Ok(DyadicRational::zero());
    }
    if y <= &ExtendedRational::one() {
        Ok(qmark(y)?.half().complement())
    } else {
        Ok(qmark(&y.recip())?.half())
    }
}

/// `Pr(X > x)` for `X ∼ λ`.
pub fn lambda_survival(x: &ExtendedRational) -> Result<DyadicRational> {
    if x.is_infinite() {
        return Ok(DyadicRational::zero());
    }
    if x.is_negative() {
        Ok(chi_half_closed(&x.neg())?.half().complement())
    } else {
        Ok(chi_half_closed(x)?.half())
    }
}

/// `Pr(H_I(W) < w)` for `W ∼ ?` and `I ∼ ρ` independent, each preimage
/// probability written through `?`. Equal to `?(w)` exactly when the `?`-law
/// is stationary for the interval-map chain.
pub fn kernel_pushforward_cdf(w: &ExtendedRational) -> Result<BigRational> {
    w.check_unit_interval("kernel_pushforward_cdf")?;
    let q = |x: &ExtendedRational| -> Result<BigRational> {
        Ok(qmark(x)?.to_rational().to_rational().expect("finite"))
    };
    let unit = BigRational::one();
    let half = ExtendedRational::ratio(1, 2)?;
    let identity = q(w)?;
    // 1/(1+W) < w  ⇔  W > 1/w − 1
    let h1 = if w.is_zero() || w <= &half {
        BigRational::zero()
    } else {
        &unit - q(&w.unimodular_map_i64(-1, 1, 1, 0))?
    };
    // 1 − W < w  ⇔  W > 1 − w
    let h2 = &unit - q(&w.unimodular_map_i64(-1, 1, 0, 1))?;
    // tent below w  ⇔  W < w/(1+w) or W > 1/(1+w)
    let h3 = q(&w.unimodular_map_i64(1, 0, 1, 1))? + &unit - q(&w.unimodular_map_i64(0, 1, 1, 1))?;
    // W/(1+W) < w  ⇔  W < w/(1−w)
    let h4 = if w < &half {
        q(&w.unimodular_map_i64(1, 0, -1, 1))?
    } else {
        unit.clone()
    };
    let ninth = BigRational::new(BigInt::one(), BigInt::from(9));
    Ok(&ninth * identity + &ninth * BigRational::from_integer(2.into()) * (h1 + h2 + h3 + h4))
}

/// Enclosure of `?` over all `x = [0; k_1, …, k_n, …]`.
///
/// The set of such `x` runs between `A_{k_1…k_n}(0)` and `A_{k_1…k_n}(1)`,
/// whose `?`-values are the partial sum `P_n` and `P_n + (−1)^n 2^{−S_n}`.
pub fn qmark_bracket(prefix: &[u64]) -> Result<ValueBracket> {
    if prefix.is_empty() {
        return Err(Error::Degenerate("empty prefix".into()));
    }
    if prefix.contains(&0) {
        return Err(Error::domain("partial quotient", 0));
    }
    let (num, total) = alternating_numerator(prefix.iter().copied())?;
    let partial = DyadicRational::new(num, total - 1);
    let step = DyadicRational::new(BigInt::one(), total);
    let other = if prefix.len().is_multiple_of(2) {
        partial.add(&step)
    } else {
        partial.sub(&step)
    };
    let (lo, hi) = if partial <= other {
        (partial, other)
    } else {
        (other, partial)
    };
    Ok(ValueBracket { lo, hi })
}

const HOLDER_SEED: u64 = 0x5a_1e4d_1943;

/// Empirical Hölder constant: the largest `|?(x) − ?(x′)| / |x − x′|^α` over
/// `samples` random pairs with `scale/2 ≤ |x − x′| ≤ scale`.
pub fn holder_modulus(samples: usize, scale: f64) -> Result<f64> {
    if samples == 0 || !(scale > 0.0 && scale < 1.0) {
        return Err(Error::domain("holder_modulus arguments", scale));
    }
    let alpha = holder_exponent();
    let mut rng = ChaCha20Rng::seed_from_u64(HOLDER_SEED);
    let pairs: Vec<(f64, f64)> = (0..samples)
        .map(|_| {
            let delta = scale * rng.random_range(0.5..=1.0);
            let x = rng.random_range(0.0..=(1.0 - delta));
            (x, x + delta)
        })
        .collect();
    pairs
        .par_iter()
        .map(|&(x, y)| -> Result<f64> {
            let dq = (qmark_f64(y)? - qmark_f64(x)?).abs();
            Ok(dq / (y - x).powf(alpha))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Hölder ratios along consecutive Fibonacci convergents `F_n/F_{n+1}` of
/// `φ − 1`, the extremal family for the modulus of `?`.
pub fn fibonacci_holder_ratios(count: usize) -> Result<Vec<f64>> {
    let alpha = holder_exponent();
    let (mut fa, mut fb) = (BigInt::one(), BigInt::one());
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let fc = &fa + &fb;
        let x = ExtendedRational::new(fa.clone(), fb.clone())?;
        let y = ExtendedRational::new(fb.clone(), fc.clone())?;
        let dq = qmark(&y)?.sub(&qmark(&x)?).to_f64().abs();
        // |F_n/F_{n+1} − F_{n+1}/F_{n+2}| = 1/(F_{n+1} F_{n+2})
        let dx = ExtendedRational::new(BigInt::one(), &fb * &fc)?.to_f64();
        out.push(dq / dx.powf(alpha));
        fa = fb;
        fb = fc;
    }
    Ok(out)
}
