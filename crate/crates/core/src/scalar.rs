//! Scalar traits shared by the exact and floating code paths, plus a few
//! helpers for turning very large integers into logarithms and floats.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Commutative ring with unit. Blanket-implemented.
pub trait Ring:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// A ring in which every nonzero element can be inverted.
pub trait Field: Ring + Div<Output = Self> {}

impl<T> Field for T where T: Ring + Div<Output = T> {}

/// Sign of a real number. For exact types this is certified.
pub trait RealSign {
    fn sign(&self) -> Ordering;

    fn is_positive_real(&self) -> bool {
        self.sign() == Ordering::Greater
    }
}

impl RealSign for BigRational {
    fn sign(&self) -> Ordering {
        match self.numer().sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl RealSign for BigInt {
    fn sign(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

macro_rules! float_sign {
    ($t:ty) => {
        impl RealSign for $t {
            fn sign(&self) -> Ordering {
                self.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
            }
        }
    };
}
float_sign!(f32);
float_sign!(f64);

/// Compare two values of a type with a certified sign.
pub fn real_cmp<R: Ring + RealSign>(a: &R, b: &R) -> Ordering {
    (a.clone() - b.clone()).sign()
}

/// Natural log of a positive big integer. Returns `-inf` for zero.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 960 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of |n|.
pub fn ln_abs(n: &BigInt) -> f64 {
    ln_biguint(n.magnitude())
}

/// ln(|num| / |den|) without overflow.
pub fn ln_ratio(num: &BigInt, den: &BigInt) -> f64 {
    ln_abs(num) - ln_abs(den)
}

/// `num / den` rounded to f64 with about 63 correct bits before the final
/// rounding, for arbitrarily large operands.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let negative = num.is_negative() != den.is_negative();
    let n = num.magnitude();
    let d = den.magnitude();
    let k = 64i64 + d.bits() as i64 - n.bits() as i64;
    let q = if k >= 0 {
        (n << (k as u64)) / d
    } else {
        n / (d << ((-k) as u64))
    };
    let mantissa = q.to_f64().unwrap_or(f64::INFINITY);
    let v = scale_pow2(mantissa, -k);
    if negative {
        -v
    } else {
        v
    }
}

/// `x * 2^e` without intermediate overflow for moderate `e`.
pub fn scale_pow2(x: f64, e: i64) -> f64 {
    let mut v = x;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    ratio_to_f64(r.numer(), r.denom())
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn is_one<R: One + PartialEq>(r: &R) -> bool {
    *r == R::one()
}
