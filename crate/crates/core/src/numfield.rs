//! Exact arithmetic in the real field `Q(λ)`, `λ = 2 cos(π/q)`.
//!
//! Elements are polynomials in `λ` of degree below `[Q(λ):Q]` with rational
//! coefficients. Signs and magnitudes are certified by evaluating against a
//! dyadic enclosure of `λ` whose precision grows until the answer is
//! determined.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::Dyadic;
use crate::scalar::RealSign;

/// Largest supported `q`; the minimal polynomial is recovered from
/// double-precision roots, which is exact well past this.
pub const MAX_HECKE_Q: u32 = 30;

pub struct HeckeField {
    q: u32,
    /// Monic minimal polynomial of λ, low-order first, length `degree + 1`.
    minpoly: Vec<BigInt>,
    lambda: f64,
    /// Best known bracket: λ ∈ [L, L + 1] / 2^scale.
    bracket: Mutex<(u64, BigInt)>,
}

impl fmt::Debug for HeckeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeckeField")
            .field("q", &self.q)
            .field("minpoly", &self.minpoly)
            .finish()
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl HeckeField {
    pub fn new(q: u32) -> Result<Arc<HeckeField>> {
        if q < 3 {
            return Err(Error::OutOfDomain(format!("Hecke q must be >= 3, got {q}")));
        }
        if q > MAX_HECKE_Q {
            return Err(Error::OutOfDomain(format!(
                "Hecke q must be <= {MAX_HECKE_Q}, got {q}"
            )));
        }
        let pi = std::f64::consts::PI;
        // Conjugates of 2cos(π/q) are 2cos(kπ/q) with k odd and coprime to q.
        let roots: Vec<f64> = (1..q)
            .filter(|&k| k % 2 == 1 && gcd(k, q) == 1)
            .map(|k| 2.0 * (k as f64 * pi / q as f64).cos())
            .collect();
        let mut poly = vec![1.0f64];
        for r in &roots {
            let mut next = vec![0.0; poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            poly = next;
        }
        let minpoly: Vec<BigInt> = poly
            .iter()
            .map(|c| BigInt::from(c.round() as i64))
            .collect();
        let lambda = 2.0 * (pi / q as f64).cos();
        let field = HeckeField {
            q,
            minpoly,
            lambda,
            bracket: Mutex::new((0, BigInt::zero())),
        };
        field.init_bracket();
        Ok(Arc::new(field))
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    /// Sign of the minimal polynomial at `x / 2^scale`.
    fn minpoly_sign_at(&self, x: &BigInt, scale: u64) -> Ordering {
        let deg = self.degree();
        let mut acc = BigInt::zero();
        let mut xp = BigInt::one();
        for (i, m) in self.minpoly.iter().enumerate() {
            acc += (m * &xp) << (scale * (deg - i) as u64);
            xp *= x;
        }
        acc.cmp(&BigInt::zero())
    }

    fn init_bracket(&self) {
        let scale = 40u64;
        let approx = BigInt::from((self.lambda * (1u64 << scale) as f64).floor() as i64);
        let mut lo = &approx - 1024;
        let mut hi = &approx + 1024;
        let s_lo = self.minpoly_sign_at(&lo, scale);
        let s_hi = self.minpoly_sign_at(&hi, scale);
        assert!(
            s_lo != s_hi && s_lo != Ordering::Equal,
            "failed to bracket 2cos(pi/{})",
            self.q
        );
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            if self.minpoly_sign_at(&mid, scale) == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        *self.bracket.lock().unwrap() = (scale, lo);
    }

    /// Refine the bracket of λ to at least `scale` bits using Newton steps,
    /// each certified by a sign change of the minimal polynomial.
    fn lambda_bracket(&self, scale: u64) -> BigInt {
        let mut guard = self.bracket.lock().unwrap();
        while guard.0 < scale {
            let (s, ref l) = *guard;
            let target = (2 * s).max(64);
            let shift = target - s;
            let x = BigRational::new(l << shift, BigInt::one() << target);
            let (f, df) = self.eval_poly_and_derivative(&x);
            let next = x - f / df;
            let scaled = (next.numer() << target) / next.denom();
            // Bracket the Newton estimate and bisect to unit width.
            let sign_lo_ref = self.minpoly_sign_at(&(l << shift), target);
            let mut radius = BigInt::from(4);
            let (mut lo, mut hi);
            loop {
                lo = &scaled - &radius;
                hi = &scaled + &radius;
                let a = self.minpoly_sign_at(&lo, target);
                let b = self.minpoly_sign_at(&hi, target);
                if a == sign_lo_ref && b != a {
                    break;
                }
                radius <<= 4;
            }
            while &hi - &lo > BigInt::one() {
                let mid: BigInt = (&lo + &hi) >> 1;
                if self.minpoly_sign_at(&mid, target) == sign_lo_ref {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            *guard = (target, lo);
        }
        let (s, ref l) = *guard;
        l >> (s - scale)
    }

    fn eval_poly_and_derivative(&self, x: &BigRational) -> (BigRational, BigRational) {
        let mut f = BigRational::zero();
        let mut df = BigRational::zero();
        for (i, m) in self.minpoly.iter().enumerate().rev() {
            df = df * x + &f;
            f = f * x + BigRational::from_integer(m.clone());
            let _ = i;
        }
        (f, df)
    }

    /// Powers `λ^0 .. λ^(degree-1)` as dyadic intervals at `scale`.
    fn lambda_powers(&self, scale: u64) -> Vec<Dyadic> {
        let l = self.lambda_bracket(scale);
        let lam = Dyadic {
            hi: &l + 1,
            lo: l,
            scale,
        };
        let mut out = Vec::with_capacity(self.degree());
        out.push(Dyadic::point(BigInt::one() << scale, scale));
        for i in 1..self.degree() {
            let next = out[i - 1].mul(&lam);
            out.push(next);
        }
        out
    }
}

/// Element of `Q(2cos(π/q))`, stored as integer coefficients over a common
/// positive denominator in lowest terms.
#[derive(Clone)]
pub struct HeckeElem {
    num: Vec<BigInt>,
    den: BigInt,
    field: Option<Arc<HeckeField>>,
}

impl fmt::Debug for HeckeElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HeckeElem({self})")
    }
}

impl PartialEq for HeckeElem {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for HeckeElem {}

impl std::hash::Hash for HeckeElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

/// gcd with one argument small: reduce the large one first.
fn gcd_with(g: &BigInt, c: &BigInt) -> BigInt {
    if c.is_zero() {
        return g.clone();
    }
    if c.bits() > 2 * g.bits() + 64 {
        g.gcd(&(c % g))
    } else {
        g.gcd(c)
    }
}

impl HeckeElem {
    fn normalized(mut num: Vec<BigInt>, mut den: BigInt, field: Option<Arc<HeckeField>>) -> Self {
        while num.last().is_some_and(|c| c.is_zero()) {
            num.pop();
        }
        if num.is_empty() {
            return HeckeElem {
                num,
                den: BigInt::one(),
                field,
            };
        }
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        if !den.is_one() {
            let mut g = den.clone();
            for c in &num {
                if g.is_one() {
                    break;
                }
                g = gcd_with(&g, c);
            }
            if !g.is_one() {
                for c in num.iter_mut() {
                    *c /= &g;
                }
                den /= &g;
            }
        }
        HeckeElem { num, den, field }
    }

    pub fn from_rational(r: BigRational) -> Self {
        let (n, d) = r.into_raw();
        Self::normalized(vec![n], d, None)
    }

    pub fn from_int(n: i64) -> Self {
        Self::normalized(vec![BigInt::from(n)], BigInt::one(), None)
    }

    /// λ itself.
    pub fn lambda(field: &Arc<HeckeField>) -> Self {
        if field.degree() == 1 {
            // λ = 1 for q = 3
            let c0 = -field.minpoly[0].clone();
            return Self::normalized(vec![c0], BigInt::one(), Some(field.clone()));
        }
        Self::normalized(
            vec![BigInt::zero(), BigInt::one()],
            BigInt::one(),
            Some(field.clone()),
        )
    }

    /// Coefficients of `1, λ, λ², ...`, trailing zeros dropped.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn field(&self) -> Option<&Arc<HeckeField>> {
        self.field.as_ref()
    }

    pub fn is_rational(&self) -> bool {
        self.num.len() <= 1
    }

    /// Value as a rational, when it lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self.num.len() {
            0 => Some(BigRational::zero()),
            1 => Some(BigRational::new(self.num[0].clone(), self.den.clone())),
            _ => None,
        }
    }

    pub fn with_field(mut self, field: &Arc<HeckeField>) -> Self {
        self.field = Some(field.clone());
        self
    }

    fn pick_field(a: &Self, b: &Self) -> Option<Arc<HeckeField>> {
        a.field.clone().or_else(|| b.field.clone())
    }

    fn reduce(mut coeffs: Vec<BigInt>, field: &Option<Arc<HeckeField>>) -> Vec<BigInt> {
        let Some(field) = field else {
            assert!(
                coeffs.len() <= 1,
                "polynomial product without a field context"
            );
            return coeffs;
        };
        let deg = field.degree();
        while coeffs.len() > deg {
            let top = coeffs.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = coeffs.len() - deg;
            for i in 0..deg {
                let m = &field.minpoly[i];
                if !m.is_zero() {
                    coeffs[shift + i] -= &top * m;
                }
            }
        }
        coeffs
    }

    /// Bit length of the largest numerator or the denominator.
    pub fn max_bits(&self) -> u64 {
        self.num
            .iter()
            .map(|c| c.bits())
            .max()
            .unwrap_or(0)
            .max(self.den.bits())
    }

    /// Dyadic enclosure of the real value at `scale` bits.
    pub fn enclose_at(&self, scale: u64) -> Dyadic {
        if self.num.is_empty() {
            return Dyadic::zero(scale);
        }
        let acc = if self.num.len() == 1 {
            Dyadic::point(&self.num[0] << scale, scale)
        } else {
            let field = self
                .field
                .as_ref()
                .expect("irrational element without a field context");
            let powers = field.lambda_powers(scale);
            let mut acc = Dyadic::zero(scale);
            for (c, p) in self.num.iter().zip(powers.iter()) {
                if !c.is_zero() {
                    acc = acc.add(&p.mul_int(c));
                }
            }
            acc
        };
        if self.den.is_one() {
            acc
        } else {
            acc.div_int(&self.den)
        }
    }

    /// Enclosure with at least `rel_bits` of relative precision. Panics on zero.
    pub fn enclose(&self, rel_bits: u64) -> Dyadic {
        assert!(!self.is_zero(), "relative enclosure of zero");
        let mut scale = 64 + rel_bits + self.max_bits();
        loop {
            let d = self.enclose_at(scale);
            if d.relative_bits().is_some_and(|b| b >= rel_bits) {
                return d;
            }
            scale *= 2;
        }
    }

    /// ln |value|.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.enclose(64).ln_abs_mid()
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    #[allow(clippy::needless_range_loop)]
    pub fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        if self.num.len() == 1 {
            return Self::normalized(
                vec![self.den.clone()],
                self.num[0].clone(),
                self.field.clone(),
            );
        }
        let field = self.field.clone().expect("field context");
        let n = field.degree();
        // Column j of the multiplication matrix is self * λ^j.
        let mut basis = HeckeElem::one().with_field(&field);
        let lam = HeckeElem::lambda(&field);
        let mut m = vec![vec![BigRational::zero(); n + 1]; n];
        for j in 0..n {
            let col = (self.clone() * basis.clone()).coeffs();
            for i in 0..n {
                m[i][j] = col.get(i).cloned().unwrap_or_else(BigRational::zero);
            }
            basis = basis * lam.clone();
        }
        m[0][n] = BigRational::one();
        // Gauss-Jordan elimination on the augmented system.
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[r][col].is_zero()).expect("singular");
            m.swap(col, pivot);
            let inv = m[col][col].recip();
            for k in col..=n {
                m[col][k] = &m[col][k] * &inv;
            }
            for r in 0..n {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for k in col..=n {
                        let v = &m[col][k] * &f;
                        m[r][k] -= v;
                    }
                }
            }
        }
        let sol: Vec<BigRational> = m.into_iter().map(|row| row[n].clone()).collect();
        Self::from_coeffs(&sol, Some(field))
    }

    fn from_coeffs(coeffs: &[BigRational], field: Option<Arc<HeckeField>>) -> Self {
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Self::normalized(num, den, field)
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        Self::normalized(
            self.num.iter().map(|c| c * r.numer()).collect(),
            &self.den * r.denom(),
            self.field.clone(),
        )
    }
}

impl RealSign for HeckeElem {
    fn sign(&self) -> Ordering {
        match self.num.len() {
            0 => Ordering::Equal,
            1 => RealSign::sign(&self.num[0]),
            _ => {
                let mut scale = 64 + self.max_bits();
                loop {
                    if let Some(s) = self.enclose_at(scale).sign() {
                        return s;
                    }
                    scale *= 2;
                }
            }
        }
    }
}

impl Zero for HeckeElem {
    fn zero() -> Self {
        HeckeElem {
            num: Vec::new(),
            den: BigInt::one(),
            field: None,
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
}

impl One for HeckeElem {
    fn one() -> Self {
        HeckeElem {
            num: vec![BigInt::one()],
            den: BigInt::one(),
            field: None,
        }
    }
}

impl Add for HeckeElem {
    type Output = HeckeElem;

    fn add(self, rhs: HeckeElem) -> HeckeElem {
        let field = Self::pick_field(&self, &rhs);
        if self.den == rhs.den {
            let (mut long, short) = if self.num.len() >= rhs.num.len() {
                (self.num, rhs.num)
            } else {
                (rhs.num, self.num)
            };
            for (a, b) in long.iter_mut().zip(short) {
                *a += b;
            }
            return Self::normalized(long, self.den, field);
        }
        let len = self.num.len().max(rhs.num.len());
        let zero = BigInt::zero();
        let num = (0..len)
            .map(|i| {
                self.num.get(i).unwrap_or(&zero) * &rhs.den
                    + rhs.num.get(i).unwrap_or(&zero) * &self.den
            })
            .collect();
        Self::normalized(num, self.den * rhs.den, field)
    }
}

impl Neg for HeckeElem {
    type Output = HeckeElem;

    fn neg(self) -> HeckeElem {
        HeckeElem {
            num: self.num.into_iter().map(|c| -c).collect(),
            den: self.den,
            field: self.field,
        }
    }
}

impl Sub for HeckeElem {
    type Output = HeckeElem;

    fn sub(self, rhs: HeckeElem) -> HeckeElem {
        self + (-rhs)
    }
}

impl Mul for HeckeElem {
    type Output = HeckeElem;

    fn mul(self, rhs: HeckeElem) -> HeckeElem {
        let field = Self::pick_field(&self, &rhs);
        if self.num.is_empty() || rhs.num.is_empty() {
            return HeckeElem {
                field,
                ..HeckeElem::zero()
            };
        }
        let mut out = vec![BigInt::zero(); self.num.len() + rhs.num.len() - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.num.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        let reduced = Self::reduce(out, &field);
        Self::normalized(reduced, self.den * rhs.den, field)
    }
}

impl Div for HeckeElem {
    type Output = HeckeElem;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: HeckeElem) -> HeckeElem {
        let field = Self::pick_field(&self, &rhs);
        let rhs = HeckeElem {
            field: rhs.field.or(field),
            ..rhs
        };
        self * rhs.inverse()
    }
}

impl ToPrimitive for HeckeElem {
    fn to_i64(&self) -> Option<i64> {
        self.to_f64().map(|v| v.floor() as i64)
    }

    fn to_u64(&self) -> Option<u64> {
        self.to_f64()
            .filter(|v| *v >= 0.0)
            .map(|v| v.floor() as u64)
    }

    fn to_f64(&self) -> Option<f64> {
        if self.is_zero() {
            return Some(0.0);
        }
        Some(self.enclose(60).mid_f64())
    }
}

impl fmt::Display for HeckeElem {
    /// Polynomial in `L = 2cos(pi/q)`, e.g. `1/2+3L-L^2`; plain rational when
    /// the element lies in Q.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "L")?;
                    } else {
                        write!(f, "L^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn minimal_polynomials() {
        let cases: [(u32, Vec<i64>); 4] = [
            (3, vec![-1, 1]),
            (4, vec![-2, 0, 1]),
            (5, vec![-1, -1, 1]),
            (6, vec![-3, 0, 1]),
        ];
        for (q, expected) in cases {
            let f = HeckeField::new(q).unwrap();
            let got: Vec<i64> = f.minpoly().iter().map(|c| c.to_i64().unwrap()).collect();
            assert_eq!(got, expected, "q = {q}");
        }
    }

    #[test]
    fn rejects_small_q() {
        assert!(HeckeField::new(2).is_err());
    }

    #[test]
    fn golden_ratio_identities() {
        let f = HeckeField::new(5).unwrap();
        let l = HeckeElem::lambda(&f);
        // λ² = λ + 1
        let sq = l.clone() * l.clone();
        assert_eq!(sq, l.clone() + HeckeElem::one());
        // 1/λ = λ - 1
        assert_eq!(l.inverse(), l.clone() - HeckeElem::one());
        assert_eq!(l.clone() / l.clone(), HeckeElem::one());
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((l.to_f64().unwrap() - phi).abs() < 1e-15);
    }

    #[test]
    fn certified_sign_under_cancellation() {
        // F_{n+1} - F_n φ = (-1/φ)^n
        let f = HeckeField::new(5).unwrap();
        let l = HeckeElem::lambda(&f);
        let (mut a, mut b) = (BigInt::from(1), BigInt::from(1));
        for n in 2..400 {
            let next = &a + &b;
            a = b;
            b = next;
            let e = HeckeElem::from_rational(BigRational::from_integer(b.clone()))
                - l.clone()
                    .mul_rational(&BigRational::from_integer(a.clone()));
            let expected = if n % 2 == 0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
            assert_eq!(e.sign(), expected, "n = {n}");
        }
    }

    #[test]
    fn sqrt_two_inverse() {
        let f = HeckeField::new(4).unwrap();
        let l = HeckeElem::lambda(&f);
        let inv = l.inverse();
        assert_eq!(inv.coeffs(), [BigRational::zero(), rational(1, 2)]);
        assert!((inv.to_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn display() {
        let f = HeckeField::new(5).unwrap();
        let l = HeckeElem::lambda(&f);
        let e = HeckeElem::from_int(2) - l.clone().mul_rational(&rational(3, 2));
        assert_eq!(e.to_string(), "2-3/2*L");
        assert_eq!(HeckeElem::zero().to_string(), "0");
    }
}
