//! Upper half-plane primitives: Möbius maps over an exact ring, boundary
//! points, geodesics, horoballs and a few lengths.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Field, RealSign, Ring};

/// `z ↦ (a z + b) / (c z + d)` with `ad - bc = 1`, stored up to sign with the
/// first nonzero of `(a, c)` positive.
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusMap<R> {
    pub a: R,
    pub b: R,
    pub c: R,
    pub d: R,
}

impl<R: Ring + RealSign> MoebiusMap<R> {
    /// Checked constructor; the result is canonical.
    pub fn new(a: R, b: R, c: R, d: R) -> Result<Self> {
        let m = MoebiusMap { a, b, c, d };
        if !m.det().is_one() {
            return Err(Error::OutOfDomain("determinant must be 1".into()));
        }
        Ok(m.canonicalize())
    }

    /// No determinant check. Used on hot paths where the product of
    /// unimodular factors is known to be unimodular.
    pub fn from_entries(a: R, b: R, c: R, d: R) -> Self {
        MoebiusMap { a, b, c, d }.canonicalize()
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: R::one(),
            b: R::zero(),
            c: R::zero(),
            d: R::one(),
        }
    }

    pub fn det(&self) -> R {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn is_canonical(&self) -> bool {
        match self.a.sign() {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.c.sign() == Ordering::Greater,
        }
    }

    pub fn canonicalize(self) -> Self {
        if self.is_canonical() {
            self
        } else {
            MoebiusMap {
                a: -self.a,
                b: -self.b,
                c: -self.c,
                d: -self.d,
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        MoebiusMap {
            a: self.a.clone() * other.a.clone() + self.b.clone() * other.c.clone(),
            b: self.a.clone() * other.b.clone() + self.b.clone() * other.d.clone(),
            c: self.c.clone() * other.a.clone() + self.d.clone() * other.c.clone(),
            d: self.c.clone() * other.b.clone() + self.d.clone() * other.d.clone(),
        }
        .canonicalize()
    }

    pub fn inverse(&self) -> Self {
        MoebiusMap {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
        .canonicalize()
    }

    /// Image of `∞`, i.e. `a / c`.
    pub fn at_infinity(&self) -> BoundaryPoint<R>
    where
        R: Field,
    {
        if self.c.is_zero() {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(self.a.clone() / self.c.clone())
        }
    }

    /// Image of `0`, i.e. `b / d`.
    pub fn at_zero(&self) -> BoundaryPoint<R>
    where
        R: Field,
    {
        if self.d.is_zero() {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(self.b.clone() / self.d.clone())
        }
    }
}

impl<R: Field + RealSign> MoebiusMap<R> {
    /// Exact action on the boundary; the pole goes to `∞`.
    pub fn apply(&self, z: &BoundaryPoint<R>) -> BoundaryPoint<R> {
        match z {
            BoundaryPoint::Infinity => self.at_infinity(),
            BoundaryPoint::Finite(x) => {
                let den = self.c.clone() * x.clone() + self.d.clone();
                if den.is_zero() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a.clone() * x.clone() + self.b.clone()) / den)
                }
            }
        }
    }
}

impl<R: Ring + ToPrimitive> MoebiusMap<R> {
    /// Action on an interior point, evaluated in double precision.
    pub fn apply_interior(&self, z: Complex<f64>) -> Complex<f64> {
        let f = |r: &R| r.to_f64().unwrap_or(f64::NAN);
        let (a, b, c, d) = (f(&self.a), f(&self.b), f(&self.c), f(&self.d));
        (z * a + b) / (z * c + d)
    }

    pub fn to_float(&self) -> MoebiusMap<f64> {
        let f = |r: &R| r.to_f64().unwrap_or(f64::NAN);
        MoebiusMap {
            a: f(&self.a),
            b: f(&self.b),
            c: f(&self.c),
            d: f(&self.d),
        }
    }
}

impl<R: fmt::Display> fmt::Display for MoebiusMap<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// A point of `R ∪ {∞}`.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryPoint<R> {
    Finite(R),
    Infinity,
}

impl<R> BoundaryPoint<R> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn finite(&self) -> Option<&R> {
        match self {
            BoundaryPoint::Finite(x) => Some(x),
            BoundaryPoint::Infinity => None,
        }
    }
}

impl BoundaryPoint<BigRational> {
    pub fn rational(p: i64, q: i64) -> Self {
        BoundaryPoint::Finite(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }
}

impl<R: fmt::Display> fmt::Display for BoundaryPoint<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(x) => write!(f, "{x}"),
            BoundaryPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Geodesic given by its two boundary endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicLine<R> {
    e_plus: BoundaryPoint<R>,
    e_minus: BoundaryPoint<R>,
}

impl<R: Ring + RealSign> GeodesicLine<R> {
    pub fn new(e_plus: BoundaryPoint<R>, e_minus: BoundaryPoint<R>) -> Result<Self> {
        if e_plus == e_minus {
            return Err(Error::DegenerateGeodesic);
        }
        Ok(GeodesicLine { e_plus, e_minus })
    }

    pub fn e_plus(&self) -> &BoundaryPoint<R> {
        &self.e_plus
    }

    pub fn e_minus(&self) -> &BoundaryPoint<R> {
        &self.e_minus
    }

    /// Euclidean diameter; `None` for a vertical line.
    pub fn diameter(&self) -> Option<R> {
        match (&self.e_plus, &self.e_minus) {
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => {
                let d = a.clone() - b.clone();
                Some(if d.sign() == Ordering::Less { -d } else { d })
            }
            _ => None,
        }
    }

    /// Depth `2 / diameter` of the top point; `None` for a vertical line.
    pub fn depth(&self) -> Option<R>
    where
        R: Field,
    {
        match (&self.e_plus, &self.e_minus) {
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => excursion_depth(a, b).ok(),
            _ => None,
        }
    }
}

/// Horoball at `∞` (`Im z > height`) or at a reduced fraction `p/q`
/// (Euclidean disc of radius `s / q²` tangent to the real line).
#[derive(Clone, Debug, PartialEq)]
pub enum Horoball {
    AtInfinity {
        height: BigRational,
    },
    AtRational {
        p: BigInt,
        q: BigInt,
        s: BigRational,
    },
}

impl Horoball {
    pub fn at_infinity(height: BigRational) -> Result<Self> {
        if !height.is_positive() {
            return Err(Error::OutOfDomain(
                "horoball height must be positive".into(),
            ));
        }
        Ok(Horoball::AtInfinity { height })
    }

    /// `p/q` is reduced to lowest terms with `q > 0`.
    pub fn at_rational(p: BigInt, q: BigInt, s: BigRational) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::OutOfDomain("zero denominator".into()));
        }
        if !s.is_positive() {
            return Err(Error::OutOfDomain(
                "horoball parameter must be positive".into(),
            ));
        }
        let r = BigRational::new(p, q);
        Ok(Horoball::AtRational {
            p: r.numer().clone(),
            q: r.denom().clone(),
            s,
        })
    }

    /// Euclidean radius `s / q²`; for the horoball at infinity, its height.
    pub fn radius(&self) -> BigRational {
        match self {
            Horoball::AtInfinity { height } => height.clone(),
            Horoball::AtRational { q, s, .. } => s / BigRational::from_integer(q * q),
        }
    }

    /// Euclidean centre `(x, y)` for a finite base.
    pub fn center(&self) -> Option<(BigRational, BigRational)> {
        match self {
            Horoball::AtInfinity { .. } => None,
            Horoball::AtRational { p, q, .. } => {
                Some((BigRational::new(p.clone(), q.clone()), self.radius()))
            }
        }
    }

    pub fn contains(&self, z: Complex<f64>) -> bool {
        match self {
            Horoball::AtInfinity { height } => z.im > height.to_f64().unwrap_or(f64::NAN),
            Horoball::AtRational { .. } => {
                let (cx, r) = self.center().unwrap();
                let cx = cx.to_f64().unwrap_or(f64::NAN);
                let r = r.to_f64().unwrap_or(f64::NAN);
                let dx = z.re - cx;
                let dy = z.im - r;
                dx * dx + dy * dy < r * r
            }
        }
    }
}

/// Depth `2 / |x - y|` reached by the geodesic with finite endpoints `x, y`.
pub fn excursion_depth<R: Field + RealSign>(x: &R, y: &R) -> Result<R> {
    let diff = x.clone() - y.clone();
    let dist = match diff.sign() {
        Ordering::Equal => return Err(Error::DegenerateGeodesic),
        Ordering::Less => -diff,
        Ordering::Greater => diff,
    };
    Ok((R::one() + R::one()) / dist)
}

/// Membership of the endpoint pair `(x, y)` in the open sets `J ⊃ I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// In `J` but not `I`.
    JOnly,
    I,
    Outside,
}

pub fn classify_region<R: Ring + RealSign>(x: &R, y: &R) -> Region {
    let one = R::one();
    let gt = |a: &R, b: &R| (a.clone() - b.clone()).sign() == Ordering::Greater;
    let zero = R::zero();
    let neg_one = -one.clone();
    // (-1, 0) x (0, ∞)  and  (0, 1) x (-∞, 0)
    let left = gt(x, &neg_one) && gt(&zero, x);
    let right = gt(x, &zero) && gt(&one, x);
    if left && gt(y, &zero) {
        if gt(y, &one) {
            Region::I
        } else {
            Region::JOnly
        }
    } else if right && gt(&zero, y) {
        if gt(&neg_one, y) {
            Region::I
        } else {
            Region::JOnly
        }
    } else {
        Region::Outside
    }
}

/// Hyperbolic length of the vertical segment between heights `h1` and `h2`.
pub fn vertical_arc_length<F: Float>(h1: F, h2: F) -> Result<F> {
    if !(h1 > F::zero() && h2 > F::zero()) {
        return Err(Error::OutOfDomain("heights must be positive".into()));
    }
    Ok((h1 / h2).ln().abs())
}

/// Length of the arc inside `Im z > 1/k` of a geodesic whose top point is at
/// height `1/d`.
pub fn horoball_chord_length<F: Float>(k: F, d: F) -> Result<F> {
    if !(k > F::zero() && d > F::zero()) {
        return Err(Error::OutOfDomain("k and d must be positive".into()));
    }
    if d > k {
        return Err(Error::OutOfDomain(
            "geodesic does not reach the horoball".into(),
        ));
    }
    let two = F::one() + F::one();
    Ok(two * (k / d).acosh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn map(a: i64, b: i64, c: i64, d: i64) -> MoebiusMap<BigRational> {
        MoebiusMap::new(
            rational(a, 1),
            rational(b, 1),
            rational(c, 1),
            rational(d, 1),
        )
        .unwrap()
    }

    #[test]
    fn apply_examples() {
        let id = MoebiusMap::<BigRational>::identity();
        let z = BoundaryPoint::rational(3, 7);
        assert_eq!(id.apply(&z), z);
        let s = map(0, -1, 1, 0);
        assert_eq!(
            s.apply(&BoundaryPoint::Infinity),
            BoundaryPoint::rational(0, 1)
        );
        assert_eq!(
            s.apply(&BoundaryPoint::rational(0, 1)),
            BoundaryPoint::Infinity
        );
        let t = map(1, 1, 0, 1);
        assert_eq!(
            t.apply(&BoundaryPoint::rational(2, 5)),
            BoundaryPoint::rational(7, 5)
        );
    }

    #[test]
    fn canonical_sign() {
        let m = MoebiusMap::from_entries(
            rational(-1, 1),
            rational(0, 1),
            rational(3, 1),
            rational(-1, 1),
        );
        assert_eq!(m.a, rational(1, 1));
        assert_eq!(m.c, rational(-3, 1));
        let s = MoebiusMap::from_entries(
            rational(0, 1),
            rational(1, 1),
            rational(-1, 1),
            rational(0, 1),
        );
        assert_eq!(s.c, rational(1, 1));
        assert_eq!(s.clone().canonicalize(), s);
        assert!(MoebiusMap::new(
            rational(2, 1),
            rational(0, 1),
            rational(0, 1),
            rational(1, 1)
        )
        .is_err());
    }

    #[test]
    fn depth_examples() {
        assert_eq!(
            excursion_depth(&rational(1, 1), &rational(-1, 1)).unwrap(),
            rational(1, 1)
        );
        assert_eq!(
            excursion_depth(&rational(2, 3), &rational(0, 1)).unwrap(),
            rational(3, 1)
        );
        assert_eq!(
            excursion_depth(&rational(1, 3), &rational(1, 3)),
            Err(Error::DegenerateGeodesic)
        );
        assert!((excursion_depth(&0.75f64, &-0.5).unwrap() - 1.6).abs() < 1e-15);
    }

    #[test]
    fn regions() {
        assert_eq!(classify_region(&0.5f64, &-2.0), Region::I);
        assert_eq!(classify_region(&0.5f64, &-0.5), Region::JOnly);
        assert_eq!(classify_region(&1.5f64, &-2.0), Region::Outside);
        assert_eq!(classify_region(&-0.5f64, &3.0), Region::I);
        assert_eq!(
            classify_region(&rational(1, 2), &rational(-1, 1)),
            Region::JOnly
        );
        assert_eq!(classify_region(&0.0f64, &-2.0), Region::Outside);
    }

    #[test]
    fn lengths() {
        assert_eq!(vertical_arc_length(2.0, 2.0).unwrap(), 0.0);
        assert!((vertical_arc_length(2.0f64, 1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        let e2 = std::f64::consts::E.powi(2);
        assert!((vertical_arc_length(e2, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(vertical_arc_length(0.0f64, 1.0).is_err());
        assert_eq!(horoball_chord_length(1.0f64, 1.0).unwrap(), 0.0);
        assert!(horoball_chord_length(1.0f64, 1.5).is_err());
        assert!(horoball_chord_length(0.5f32, 0.25).unwrap() > 0.0);
    }

    #[test]
    fn geodesic_line() {
        let g = GeodesicLine::new(
            BoundaryPoint::rational(1, 2),
            BoundaryPoint::rational(-1, 2),
        )
        .unwrap();
        assert_eq!(g.diameter(), Some(rational(1, 1)));
        assert_eq!(g.depth(), Some(rational(2, 1)));
        assert!(
            GeodesicLine::new(BoundaryPoint::<f64>::Infinity, BoundaryPoint::Infinity).is_err()
        );
        let v = GeodesicLine::new(BoundaryPoint::Finite(0.0), BoundaryPoint::Infinity).unwrap();
        assert_eq!(v.diameter(), None);
    }

    #[test]
    fn horoball_radius() {
        let h = Horoball::at_rational(BigInt::from(2), BigInt::from(6), rational(1, 2)).unwrap();
        assert_eq!(h.radius(), rational(1, 18));
        assert!(h.contains(Complex::new(1.0 / 3.0, 1.0 / 18.0)));
        assert!(!h.contains(Complex::new(0.5, 0.01)));
        assert!(Horoball::at_infinity(rational(0, 1)).is_err());
    }
}
