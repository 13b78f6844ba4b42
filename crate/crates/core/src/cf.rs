//! Certified continued fractions, convergents and the rationals `p/q` with
//! `q |q x - p| < 1`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{Enclosure, ThetaBound};
use crate::realspec::{QuadraticForm, RealSpec};
use crate::scalar::{ln_abs, ratio_to_f64};

/// Reduced fraction `p/q` with `q >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    p: BigInt,
    q: BigInt,
}

impl Rational {
    pub fn new(p: BigInt, q: BigInt) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::OutOfDomain("zero denominator".into()));
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        Ok(Rational { p, q })
    }

    pub fn from_i64(p: i64, q: i64) -> Self {
        Self::new(BigInt::from(p), BigInt::from(q)).unwrap()
    }

    /// Caller guarantees coprimality and `q > 0`.
    pub(crate) fn from_coprime(p: BigInt, q: BigInt) -> Self {
        debug_assert!(q.is_positive());
        Rational { p, q }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn to_big_rational(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.p, &self.q)
    }

    pub fn cmp_value(&self, other: &Rational) -> Ordering {
        (&self.p * &other.q).cmp(&(&other.p * &self.q))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    /// `a_1, a_2, ...`, all positive.
    pub quotients: Vec<BigInt>,
    /// True for rational and quadratic sources.
    pub exact: bool,
    /// True when the expansion of a rational is complete.
    pub terminated: bool,
}

impl CfExpansion {
    pub fn from_quotients(q: &[u64]) -> Self {
        CfExpansion {
            quotients: q.iter().map(|&a| BigInt::from(a)).collect(),
            exact: true,
            terminated: false,
        }
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }
}

/// Expand `x ∈ (0, 1)` to `n` partial quotients.
pub fn cf_expand(x: &RealSpec, n: usize) -> Result<CfExpansion> {
    if n == 0 {
        return Err(Error::OutOfDomain("at least one term is required".into()));
    }
    match x {
        RealSpec::Rational(r) => expand_rational(r, n),
        RealSpec::Quadratic { .. } => Ok(expand_quadratic(&x.quadratic_form().unwrap(), n)),
        _ => {
            let enc = x.enclosure(0);
            if !enc.inside_unit_interval() {
                return Err(Error::OutOfDomain(format!("{x} is not inside (0, 1)")));
            }
            expand_enclosure(&enc, n)
        }
    }
}

fn expand_rational(r: &BigRational, n: usize) -> Result<CfExpansion> {
    if !(r.is_positive() && r < &BigRational::one()) {
        return Err(Error::OutOfDomain(format!("{r} is not inside (0, 1)")));
    }
    let (mut num, mut den) = (r.numer().clone(), r.denom().clone());
    let mut quotients = Vec::new();
    while !num.is_zero() && quotients.len() < n {
        let (a, rem) = den.div_rem(&num);
        quotients.push(a);
        den = num;
        num = rem;
    }
    Ok(CfExpansion {
        quotients,
        exact: true,
        terminated: num.is_zero(),
    })
}

fn expand_quadratic(f: &QuadraticForm, n: usize) -> CfExpansion {
    let root = f.n.sqrt();
    let floor = |p: &BigInt, q: &BigInt| -> BigInt {
        if q.is_positive() {
            (p + &root).div_floor(q)
        } else {
            Integer::div_floor(&(-p - &root - 1), &-q)
        }
    };
    let mut p = -f.p.clone();
    let mut q = (&f.n - &f.p * &f.p) / &f.q;
    let mut quotients = Vec::with_capacity(n);
    for _ in 0..n {
        let a = floor(&p, &q);
        p = &a * &q - &p;
        q = (&f.n - &p * &p) / &q;
        quotients.push(a);
    }
    CfExpansion {
        quotients,
        exact: true,
        terminated: false,
    }
}

/// Expand every point of the enclosure simultaneously; a quotient is
/// emitted only when both endpoints agree on it.
pub fn expand_enclosure(enc: &Enclosure, n: usize) -> Result<CfExpansion> {
    if enc.is_point() {
        return expand_rational(&enc.lo(), n);
    }
    let (mut n1, mut d1) = (enc.lo_num().clone(), enc.den().clone());
    let (mut n2, mut d2) = (enc.hi_num().clone(), enc.den().clone());
    let mut quotients = Vec::with_capacity(n);
    while quotients.len() < n {
        if n1.is_zero() || n2.is_zero() {
            return Err(Error::PrecisionExhausted {
                certified: quotients.len(),
            });
        }
        let (a1, r1) = d1.div_rem(&n1);
        let (a2, r2) = d2.div_rem(&n2);
        if a1 != a2 {
            return Err(Error::PrecisionExhausted {
                certified: quotients.len(),
            });
        }
        quotients.push(a1);
        d1 = std::mem::replace(&mut n1, r1);
        d2 = std::mem::replace(&mut n2, r2);
    }
    Ok(CfExpansion {
        quotients,
        exact: false,
        terminated: false,
    })
}

/// `p_n / q_n` for `n = 1 ..= len`.
pub fn convergents(cf: &CfExpansion) -> Vec<Rational> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(cf.len());
    for a in &cf.quotients {
        let p2 = a * &p1 + &p0;
        let q2 = a * &q1 + &q0;
        out.push(Rational::from_coprime(p2.clone(), q2.clone()));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    out
}

/// `θ = q |q x - p|` with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaValue {
    pub value: f64,
    pub error: f64,
}

pub fn theta(x: &RealSpec, r: &Rational) -> Result<ThetaValue> {
    let mut bits = 128 + 2 * r.q.bits();
    loop {
        let tb = x.enclosure(bits).theta(&r.p, &r.q);
        let value = ratio_to_f64(&(&tb.lo + &tb.hi), &(&tb.den * 2));
        let error = ratio_to_f64(&(&tb.hi - &tb.lo), &(&tb.den * 2));
        if error <= 1e-12 * value.max(1.0) {
            return Ok(ThetaValue { value, error });
        }
        if !matches!(x, RealSpec::Quadratic { .. }) {
            if error <= 1e-9 {
                return Ok(ThetaValue { value, error });
            }
            return Err(Error::PrecisionExhausted { certified: 0 });
        }
        bits *= 2;
    }
}

/// `t = ln 2 - ln |x - p/q|`.
pub fn depth_parameter(x: &RealSpec, r: &Rational) -> Result<f64> {
    if let Some(v) = x.exact_rational() {
        if *v == r.to_big_rational() {
            return Err(Error::RationalInput);
        }
    }
    let mut bits = 128 + 2 * r.q.bits();
    loop {
        let enc = x.enclosure(bits);
        if enc.cmp_fraction(&r.p, &r.q).is_some() {
            let (a, b) = enc.distance_bounds(&r.p, &r.q);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let rel_ok = enc.is_point() || (&hi - &lo) * (BigInt::one() << 50u32) <= lo;
            if rel_ok || !matches!(x, RealSpec::Quadratic { .. }) {
                let den = &r.q * enc.den();
                let ln_dist = (ln_abs(&lo) + ln_abs(&hi)) / 2.0 - ln_abs(&den);
                if ln_dist > std::f64::consts::LN_2 + 1e-15 {
                    return Err(Error::OutOfDomain("|x - p/q| exceeds 2".into()));
                }
                return Ok(std::f64::consts::LN_2 - ln_dist);
            }
        } else if !matches!(x, RealSpec::Quadratic { .. }) {
            return Err(Error::PrecisionExhausted { certified: 0 });
        }
        bits *= 2;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxKind {
    Convergent,
    Nonclassical,
}

impl ApproxKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ApproxKind::Convergent => "convergent",
            ApproxKind::Nonclassical => "nonclassical",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationRecord {
    pub rational: Rational,
    pub theta: f64,
    pub ln_theta: f64,
    /// `2 θ`.
    pub depth: f64,
    /// `ln 2 - ln |x - p/q|`.
    pub t: f64,
    pub ln_q: f64,
    pub kind: ApproxKind,
    /// `n` for the convergent `p_n/q_n`; `Some(0)` for a leading `0/1`.
    pub convergent_index: Option<usize>,
}

/// All `p/q` with `q |q x - p| < 1` up to and including the `n_terms`-th
/// convergent, ordered by decreasing distance to `x`.
pub fn n_convergents(x: &RealSpec, n_terms: usize) -> Result<Vec<ApproximationRecord>> {
    ApproxContext::new(x, n_terms)?.records()
}

/// Set when the current enclosure cannot decide a comparison.
struct Uncertain;

/// Expansion of an irrational `x` to `N + 1` terms together with an
/// enclosure fine enough to order its `N` first approximants.
pub struct ApproxContext {
    spec: RealSpec,
    enc: Enclosure,
    bits: u64,
    cf: CfExpansion,
    /// `(p_n, q_n)` for `n = 0 ..= N + 1`, starting from `(0, 1)`.
    p: Vec<BigInt>,
    q: Vec<BigInt>,
    n_terms: usize,
}

impl ApproxContext {
    pub fn new(x: &RealSpec, n_terms: usize) -> Result<Self> {
        if x.is_rational() {
            return Err(Error::RationalInput);
        }
        if n_terms == 0 {
            return Err(Error::OutOfDomain("at least one term is required".into()));
        }
        let cf = cf_expand(x, n_terms + 1)?;
        let mut p = vec![BigInt::zero()];
        let mut q = vec![BigInt::one()];
        let (mut pm, mut qm) = (BigInt::one(), BigInt::zero());
        for a in &cf.quotients {
            let pn = a * p.last().unwrap() + &pm;
            let qn = a * q.last().unwrap() + &qm;
            pm = p.last().unwrap().clone();
            qm = q.last().unwrap().clone();
            p.push(pn);
            q.push(qn);
        }
        let bits = 2 * q.last().unwrap().bits() + 128;
        let enc = x.enclosure(bits);
        Ok(ApproxContext {
            spec: x.clone(),
            enc,
            bits,
            cf,
            p,
            q,
            n_terms,
        })
    }

    pub fn spec(&self) -> &RealSpec {
        &self.spec
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    /// Partial quotients `a_1 ..= a_{N+1}`.
    pub fn quotients(&self) -> &[BigInt] {
        &self.cf.quotients
    }

    pub fn enclosure(&self) -> &Enclosure {
        &self.enc
    }

    /// `p_n / q_n`, `0 <= n <= N + 1`.
    pub fn convergent(&self, n: usize) -> Rational {
        Rational::from_coprime(self.p[n].clone(), self.q[n].clone())
    }

    fn refine(&mut self) -> Result<()> {
        if let RealSpec::Quadratic { .. } = self.spec {
            self.bits *= 2;
            self.enc = self.spec.enclosure(self.bits);
            Ok(())
        } else {
            Err(Error::PrecisionExhausted {
                certified: self.cf.len().saturating_sub(1),
            })
        }
    }

    fn certify<T>(&mut self, f: impl Fn(&Self) -> std::result::Result<T, Uncertain>) -> Result<T> {
        loop {
            match f(self) {
                Ok(v) => return Ok(v),
                Err(Uncertain) => self.refine()?,
            }
        }
    }

    pub fn records(&mut self) -> Result<Vec<ApproximationRecord>> {
        self.certify(|ctx| ctx.try_records())?
    }

    /// Exact checks of `1/θ_n` against `a_{n+1}` for `n = 1 ..= N`.
    pub fn sandwich(&mut self) -> Result<Vec<SandwichCheck>> {
        self.certify(|ctx| {
            (1..=ctx.n_terms)
                .map(|n| {
                    let tb = ctx.enc.theta(&ctx.p[n], &ctx.q[n]);
                    let a = &ctx.cf.quotients[n];
                    Ok(SandwichCheck {
                        lower: times_below_one(&(a + 1u32), &tb)?,
                        lower_weak: times_below_one(a, &tb)?,
                        upper: !times_below_one(&(a + 2u32), &tb)?,
                    })
                })
                .collect()
        })
    }

    /// Bounds on `θ_n` for convergent `n`, `1 <= n <= N`.
    pub fn convergent_theta(&self, n: usize) -> ThetaBound {
        self.enc.theta(&self.p[n], &self.q[n])
    }

    #[allow(clippy::needless_range_loop)]
    fn candidates(&self) -> Vec<(Rational, ApproxKind, Option<usize>)> {
        let a = &self.cf.quotients;
        let n_max = self.n_terms;
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut push = |r: Rational, kind, idx, out: &mut Vec<_>| {
            if seen.insert(r.clone()) {
                out.push((r, kind, idx));
            }
        };
        let zero_kind = if a[0] >= BigInt::from(2) {
            (ApproxKind::Convergent, Some(0))
        } else {
            (ApproxKind::Nonclassical, None)
        };
        push(Rational::from_i64(0, 1), zero_kind.0, zero_kind.1, &mut out);
        for n in 1..=n_max {
            push(
                self.convergent(n),
                ApproxKind::Convergent,
                Some(n),
                &mut out,
            );
        }
        for n in 0..=n_max {
            let next = &a[n];
            if next < &BigInt::from(2) {
                continue;
            }
            let (pm, qm) = if n == 0 {
                (BigInt::one(), BigInt::zero())
            } else {
                (self.p[n - 1].clone(), self.q[n - 1].clone())
            };
            for j in [BigInt::one(), next - 1u32] {
                let r = Rational::from_coprime(&pm + &j * &self.p[n], &qm + &j * &self.q[n]);
                push(r, ApproxKind::Nonclassical, None, &mut out);
            }
        }
        out
    }

    fn try_records(&self) -> std::result::Result<Result<Vec<ApproximationRecord>>, Uncertain> {
        let enc = &self.enc;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (r, kind, idx) in self.candidates() {
            let tb = enc.theta(&r.p, &r.q);
            match tb.below_one() {
                None => return Err(Uncertain),
                Some(false) => continue,
                Some(true) => {}
            }
            let side = enc.cmp_fraction(&r.p, &r.q).ok_or(Uncertain)?;
            let item = (r, kind, idx, tb);
            match side {
                Ordering::Greater => left.push(item),
                Ordering::Less => right.push(item),
                Ordering::Equal => return Ok(Err(Error::RationalInput)),
            }
        }
        // Farthest first on each side.
        left.sort_by(|a, b| a.0.cmp_value(&b.0));
        right.sort_by(|a, b| b.0.cmp_value(&a.0));
        let mut merged = Vec::with_capacity(left.len() + right.len());
        let (mut i, mut j) = (0, 0);
        while i < left.len() || j < right.len() {
            let take_left = if i == left.len() {
                false
            } else if j == right.len() {
                true
            } else {
                // Left is farther iff x lies right of the midpoint.
                let (l, r) = (&left[i].0, &right[j].0);
                let mid_p = &l.p * &r.q + &r.p * &l.q;
                let mid_q = &l.q * &r.q * 2u32;
                match enc.cmp_fraction(&mid_p, &mid_q) {
                    Some(Ordering::Greater) => true,
                    Some(Ordering::Less) => false,
                    Some(Ordering::Equal) => return Ok(Err(Error::Tie)),
                    None => return Err(Uncertain),
                }
            };
            if take_left {
                merged.push(left[i].clone());
                i += 1;
            } else {
                merged.push(right[j].clone());
                j += 1;
            }
        }
        // Truncate after convergent N.
        let last = merged
            .iter()
            .position(|m| m.2 == Some(self.n_terms))
            .expect("convergent N is always an approximant");
        merged.truncate(last + 1);
        let ln2 = std::f64::consts::LN_2;
        let records = merged
            .into_iter()
            .map(|(rational, kind, idx, tb)| {
                let theta = tb.value();
                let ln_theta = tb.ln_value();
                let ln_q = ln_abs(&rational.q);
                ApproximationRecord {
                    t: ln2 - (ln_theta - 2.0 * ln_q),
                    depth: 2.0 * theta,
                    rational,
                    theta,
                    ln_theta,
                    ln_q,
                    kind,
                    convergent_index: idx,
                }
            })
            .collect();
        Ok(Ok(records))
    }
}

/// Certified `k θ < 1`. For irrational `x` equality cannot occur.
fn times_below_one(k: &BigInt, tb: &ThetaBound) -> std::result::Result<bool, Uncertain> {
    if k * &tb.hi < tb.den {
        Ok(true)
    } else if k * &tb.lo > tb.den {
        Ok(false)
    } else {
        Err(Uncertain)
    }
}

/// Position of `1/θ_n` relative to `a_{n+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichCheck {
    /// `a_{n+1} + 1 < 1/θ_n`
    pub lower: bool,
    /// `a_{n+1} < 1/θ_n`
    pub lower_weak: bool,
    /// `1/θ_n < a_{n+1} + 2`
    pub upper: bool,
}

impl SandwichCheck {
    pub fn holds(&self) -> bool {
        self.lower && self.upper
    }

    pub fn weak_holds(&self) -> bool {
        self.lower_weak && self.upper
    }
}
