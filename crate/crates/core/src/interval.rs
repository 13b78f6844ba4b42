//! Outward-rounded enclosures.
//!
//! [`Enclosure`] brackets the real number being studied between two
//! rationals over a common denominator. [`Dyadic`] is a fixed-scale interval
//! used to certify signs of algebraic numbers.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{ln_abs, ratio_to_f64};

fn floor_shr(x: &BigInt, s: u64) -> BigInt {
    x >> s
}

fn ceil_shr(x: &BigInt, s: u64) -> BigInt {
    -((-x) >> s)
}

/// Closed interval `[lo, hi] / 2^scale`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dyadic {
    pub lo: BigInt,
    pub hi: BigInt,
    pub scale: u64,
}

impl Dyadic {
    pub fn point(v: BigInt, scale: u64) -> Self {
        Dyadic {
            lo: v.clone(),
            hi: v,
            scale,
        }
    }

    pub fn zero(scale: u64) -> Self {
        Self::point(BigInt::zero(), scale)
    }

    pub fn from_rational(r: &BigRational, scale: u64) -> Self {
        let shifted = r.numer() << scale;
        let lo = shifted.div_floor(r.denom());
        let hi = -((-&shifted).div_floor(r.denom()));
        Dyadic { lo, hi, scale }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        debug_assert_eq!(self.scale, other.scale);
        Dyadic {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            scale: self.scale,
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            lo: -&self.hi,
            hi: -&self.lo,
            scale: self.scale,
        }
    }

    /// Outward rounding of an [`Enclosure`] to `scale` bits.
    pub fn from_enclosure(e: &Enclosure, scale: u64) -> Dyadic {
        Dyadic {
            lo: (&e.lo << scale).div_floor(&e.den),
            hi: -((-(&e.hi << scale)).div_floor(&e.den)),
            scale,
        }
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        debug_assert_eq!(self.scale, other.scale);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        Dyadic {
            lo: floor_shr(min, self.scale),
            hi: ceil_shr(max, self.scale),
            scale: self.scale,
        }
    }

    /// Multiply by an exact rational.
    pub fn mul_rational(&self, r: &BigRational) -> Dyadic {
        let (n, d) = (r.numer(), r.denom());
        let a = &self.lo * n;
        let b = &self.hi * n;
        let (min, max) = if a <= b { (a, b) } else { (b, a) };
        Dyadic {
            lo: min.div_floor(d),
            hi: -((-max).div_floor(d)),
            scale: self.scale,
        }
    }

    pub fn mul_int(&self, n: &BigInt) -> Dyadic {
        let a = &self.lo * n;
        let b = &self.hi * n;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Dyadic {
            lo,
            hi,
            scale: self.scale,
        }
    }

    /// Divide by a positive integer, rounding outward.
    pub fn div_int(&self, d: &BigInt) -> Dyadic {
        Dyadic {
            lo: self.lo.div_floor(d),
            hi: -((-&self.hi).div_floor(d)),
            scale: self.scale,
        }
    }

    /// `Some(sign)` when the interval excludes zero or is exactly `{0}`.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Width relative to the magnitude, as a power of two; `None` if the
    /// interval contains zero.
    pub fn relative_bits(&self) -> Option<u64> {
        if self.sign().is_none_or(|s| s == Ordering::Equal) {
            return None;
        }
        let width = &self.hi - &self.lo;
        let mag = self.lo.magnitude().min(self.hi.magnitude());
        Some(mag.bits().saturating_sub(width.magnitude().bits()))
    }

    pub fn mid_f64(&self) -> f64 {
        let sum = &self.lo + &self.hi;
        ratio_to_f64(&sum, &(BigInt::one() << (self.scale + 1)))
    }

    /// ln |value| evaluated at the midpoint.
    pub fn ln_abs_mid(&self) -> f64 {
        let sum = &self.lo + &self.hi;
        ln_abs(&sum) - (self.scale + 1) as f64 * std::f64::consts::LN_2
    }
}

/// `[lo/den, hi/den]`, `den > 0`, `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigInt,
    hi: BigInt,
    den: BigInt,
}

/// Bounds on `q |q x - p|` over an enclosure, as `[lo, hi] / den`.
#[derive(Clone, Debug)]
pub struct ThetaBound {
    pub lo: BigInt,
    pub hi: BigInt,
    pub den: BigInt,
}

impl ThetaBound {
    /// Certified `theta < 1`; `None` when the bound straddles 1.
    pub fn below_one(&self) -> Option<bool> {
        if self.hi < self.den {
            Some(true)
        } else if self.lo >= self.den {
            Some(false)
        } else {
            None
        }
    }

    pub fn value(&self) -> f64 {
        ratio_to_f64(&self.lo, &self.den)
    }

    pub fn ln_value(&self) -> f64 {
        ln_abs(&self.lo) - ln_abs(&self.den)
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

impl Enclosure {
    pub fn new(lo: BigInt, hi: BigInt, den: BigInt) -> Self {
        assert!(den.is_positive(), "enclosure denominator must be positive");
        assert!(lo <= hi, "enclosure endpoints out of order");
        Enclosure { lo, hi, den }
    }

    pub fn exact(r: &BigRational) -> Self {
        Enclosure {
            lo: r.numer().clone(),
            hi: r.numer().clone(),
            den: r.denom().clone(),
        }
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), self.den.clone())
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), self.den.clone())
    }

    pub fn lo_num(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_num(&self) -> &BigInt {
        &self.hi
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid_f64(&self) -> f64 {
        ratio_to_f64(&(&self.lo + &self.hi), &(&self.den * 2))
    }

    /// Certified comparison of x with `p/q` (`q > 0`).
    pub fn cmp_fraction(&self, p: &BigInt, q: &BigInt) -> Option<Ordering> {
        let pd = p * &self.den;
        let a = (&self.lo * q).cmp(&pd);
        if self.is_point() {
            return Some(a);
        }
        let b = (&self.hi * q).cmp(&pd);
        if a == b && a != Ordering::Equal {
            Some(a)
        } else {
            None
        }
    }

    /// Bounds on `q |q x - p|`.
    pub fn theta(&self, p: &BigInt, q: &BigInt) -> ThetaBound {
        let pd = p * &self.den;
        let e_lo = (q * &self.lo - &pd).abs() * q;
        let e_hi = (q * &self.hi - &pd).abs() * q;
        let straddles = self.cmp_fraction(p, q).is_none();
        let (mut lo, hi) = if e_lo <= e_hi {
            (e_lo, e_hi)
        } else {
            (e_hi, e_lo)
        };
        if straddles {
            lo = BigInt::zero();
        }
        ThetaBound {
            lo,
            hi,
            den: self.den.clone(),
        }
    }

    /// ln |x - p/q| evaluated at the lower endpoint.
    pub fn ln_distance(&self, p: &BigInt, q: &BigInt) -> f64 {
        let num = (q * &self.lo - p * &self.den).abs();
        ln_abs(&num) - ln_abs(q) - ln_abs(&self.den)
    }

    /// Exact `|x - p/q|` numerators at both endpoints, over `q * den`.
    pub fn distance_bounds(&self, p: &BigInt, q: &BigInt) -> (BigInt, BigInt) {
        let pd = p * &self.den;
        let a = (q * &self.lo - &pd).abs();
        let b = (q * &self.hi - &pd).abs();
        (a, b)
    }

    /// Whether the enclosure lies strictly inside `(0, 1)`.
    pub fn inside_unit_interval(&self) -> bool {
        self.lo.is_positive() && self.hi < self.den
    }

    /// Width as ln(hi - lo); `-inf` for a point.
    pub fn ln_width(&self) -> f64 {
        ln_abs(&(&self.hi - &self.lo)) - ln_abs(&self.den)
    }
}
