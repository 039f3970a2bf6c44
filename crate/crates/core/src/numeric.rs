//! Conversions from big integers to `f64` that survive operands far outside the
//! `f64` exponent range.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// `x * 2^e` without intermediate overflow or premature underflow.
pub fn scale_pow2(mut x: f64, mut e: i64) -> f64 {
    const STEP: i64 = 1000;
    while e > STEP {
        x *= 2f64.powi(STEP as i32);
        e -= STEP;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -STEP {
        x *= 2f64.powi(-STEP as i32);
        e += STEP;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Nearest `f64` to `num / den` (den > 0), up to one extra rounding step.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    debug_assert!(den.is_positive());
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    if nb <= 53 && db <= 53 {
        return num.to_f64().unwrap() / den.to_f64().unwrap();
    }
    // Scale so that the integer quotient carries ~66 significant bits.
    let shift = 66 - (nb - db);
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    scale_pow2(q.to_f64().unwrap(), -shift)
}

/// `num / 2^exp` as an `f64`.
pub fn dyadic_to_f64(num: &BigInt, exp: u64) -> f64 {
    let nb = num.bits();
    if nb <= 64 {
        return scale_pow2(num.to_f64().unwrap(), -(exp as i64));
    }
    let drop = nb - 64;
    let top = num >> drop;
    scale_pow2(top.to_f64().unwrap(), drop as i64 - exp as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_operands() {
        let num = BigInt::from(3) << 5000u32;
        let den = BigInt::from(4) << 5000u32;
        assert_eq!(ratio_to_f64(&num, &den), 0.75);
        assert_eq!(ratio_to_f64(&-num, &den), -0.75);
    }

    #[test]
    fn tiny_and_large_ratios() {
        let one = BigInt::from(1);
        let big = BigInt::from(1) << 1100u32;
        assert_eq!(ratio_to_f64(&one, &big), 0.0);
        assert!(ratio_to_f64(&big, &one).is_infinite());
        let big = BigInt::from(1) << 1000u32;
        assert_eq!(ratio_to_f64(&one, &big), 2f64.powi(-1000));
    }

    #[test]
    fn dyadic() {
        assert_eq!(dyadic_to_f64(&BigInt::from(7), 4), 0.4375);
        let num = (BigInt::from(1) << 200u32) + 1;
        assert_eq!(dyadic_to_f64(&num, 201), 0.5);
    }
}
