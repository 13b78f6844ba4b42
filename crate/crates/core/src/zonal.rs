//! Approximation by the orbit of `∞` under the modular group and the
//! rescaled Hecke groups `⟨z ↦ z + 1, z ↦ -η²/z⟩`, `η = 1 / (2cos(π/q))`.
//!
//! The orbit of the imaginary axis tessellates the half-plane by ideal
//! `q`-gons. The vertical ray above `x` passes through a single chain of
//! them; the edges it crosses are generated polygon by polygon, and a cusp
//! hit by two or more crossed edges is a Γ-convergent of `x`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cf::{cf_expand, convergents, theta, Rational};
use crate::error::{Error, Result};
use crate::hyperbolic::{BoundaryPoint, MoebiusMap};
use crate::interval::{Dyadic, Enclosure};
use crate::numfield::{HeckeElem, HeckeField};
use crate::realspec::RealSpec;
use crate::scalar::{ln_abs, RealSign};
use crate::HeckeMap;

use std::f64::consts::{LN_2, PI};

/// Area of the `(2, q, ∞)` orbifold.
pub fn hecke_area(q: u32) -> Result<f64> {
    if q < 3 {
        return Err(Error::OutOfDomain(format!("Hecke q must be >= 3, got {q}")));
    }
    Ok(PI * (1.0 - 2.0 / q as f64))
}

/// Lower bound on crossing heights, stored as its natural log so that
/// floors far below the `f64` range can be expressed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightFloor {
    ln_h: f64,
}

impl HeightFloor {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::OutOfDomain(format!(
                "height floor {h} is outside (0, 1)"
            )));
        }
        Ok(HeightFloor { ln_h: h.ln() })
    }

    pub fn from_ln(ln_h: f64) -> Result<Self> {
        if !(ln_h < 0.0 && ln_h.is_finite()) {
            return Err(Error::OutOfDomain(format!(
                "ln height floor {ln_h} must be negative"
            )));
        }
        Ok(HeightFloor { ln_h })
    }

    pub fn ln(&self) -> f64 {
        self.ln_h
    }
}

impl FromStr for HeightFloor {
    type Err = Error;

    /// `1e-6` or `exp:-4000`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(l) = s.strip_prefix("exp:") {
            let v: f64 = l
                .parse()
                .map_err(|_| Error::Parse(format!("bad height {s:?}")))?;
            Self::from_ln(v)
        } else {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("bad height {s:?}")))?;
            Self::new(v)
        }
    }
}

impl fmt::Display for HeightFloor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.ln_h.exp();
        if h > 1e-300 && (h.ln() - self.ln_h).abs() < 1e-12 {
            write!(f, "{h:e}")
        } else {
            write!(f, "exp:{}", self.ln_h)
        }
    }
}

#[derive(Clone, Debug)]
pub struct ZonalGroup {
    q: u32,
    field: Arc<HeckeField>,
    lambda: HeckeElem,
    eta: HeckeElem,
    t: HeckeMap,
    u: HeckeMap,
}

fn raw_mul(m: &HeckeMap, n: &HeckeMap) -> HeckeMap {
    MoebiusMap {
        a: m.a.clone() * n.a.clone() + m.b.clone() * n.c.clone(),
        b: m.a.clone() * n.b.clone() + m.b.clone() * n.d.clone(),
        c: m.c.clone() * n.a.clone() + m.d.clone() * n.c.clone(),
        d: m.c.clone() * n.b.clone() + m.d.clone() * n.d.clone(),
    }
}

fn raw_col(m: &HeckeMap, v: &(HeckeElem, HeckeElem)) -> (HeckeElem, HeckeElem) {
    (
        m.a.clone() * v.0.clone() + m.b.clone() * v.1.clone(),
        m.c.clone() * v.0.clone() + m.d.clone() * v.1.clone(),
    )
}

/// Sign-normalized column: `q > 0`, or `q = 0` and `p > 0`.
fn canonical_column(p: HeckeElem, q: HeckeElem) -> (HeckeElem, HeckeElem) {
    let s = match q.sign() {
        Ordering::Equal => p.sign(),
        s => s,
    };
    if s == Ordering::Less {
        (-p, -q)
    } else {
        (p, q)
    }
}

impl ZonalGroup {
    pub fn modular() -> Self {
        Self::hecke(3).expect("q = 3 is supported")
    }

    pub fn hecke(q: u32) -> Result<Self> {
        let field = HeckeField::new(q)?;
        let lambda = HeckeElem::lambda(&field);
        let eta = lambda.inverse();
        let one = HeckeElem::one().with_field(&field);
        let zero = HeckeElem::zero().with_field(&field);
        let t = MoebiusMap::new(one.clone(), one.clone(), zero.clone(), one.clone())?;
        let u = MoebiusMap::new(zero.clone(), -eta.clone(), lambda.clone(), zero)?;
        Ok(ZonalGroup {
            q,
            field,
            lambda,
            eta,
            t,
            u,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_modular(&self) -> bool {
        self.q == 3
    }

    pub fn field(&self) -> &Arc<HeckeField> {
        &self.field
    }

    pub fn lambda(&self) -> &HeckeElem {
        &self.lambda
    }

    pub fn eta(&self) -> &HeckeElem {
        &self.eta
    }

    /// `z ↦ z + 1`.
    pub fn t(&self) -> &HeckeMap {
        &self.t
    }

    /// `z ↦ -η²/z`.
    pub fn u(&self) -> &HeckeMap {
        &self.u
    }

    /// `T U`, elliptic of order `q`.
    pub fn w(&self) -> HeckeMap {
        self.t.compose(&self.u)
    }

    /// `U T U⁻¹`, generating the stabilizer of `0`.
    pub fn stabilizer_of_zero(&self) -> HeckeMap {
        self.u.compose(&self.t).compose(&self.u.inverse())
    }

    pub fn area(&self) -> f64 {
        hecke_area(self.q).unwrap()
    }

    /// Expected limit of `ln q̂_n / n` along Γ-convergents.
    pub fn levy_target(&self) -> f64 {
        PI * self.area() / (4.0 * LN_2)
    }

    /// Word of `g` written with letters `T` and `U`.
    pub fn word_to_map(&self, word: &str) -> Result<HeckeMap> {
        let mut g = HeckeMap::identity();
        for ch in word.chars() {
            let m = match ch {
                'T' => self.t.clone(),
                't' => self.t.inverse(),
                'U' => self.u.clone(),
                _ => return Err(Error::Parse(format!("bad letter {ch:?} in word"))),
            };
            g = g.compose(&m);
        }
        Ok(g)
    }
}

/// One edge of the tessellation crossed by the vertical ray above `x`.
#[derive(Clone, Debug)]
pub struct OrbitGeodesic {
    /// The edge is `map` applied to the imaginary axis.
    pub map: HeckeMap,
    /// `ln √((x - u)(v - x))`; `+∞` for the vertical edges.
    pub ln_height: f64,
    /// Number of polygons passed before this edge.
    pub step: usize,
    /// Side index in the polygon being left.
    pub side: usize,
}

impl OrbitGeodesic {
    pub fn is_vertical(&self) -> bool {
        self.map.c.is_zero() || self.map.d.is_zero()
    }

    /// `(g(0), g(∞))`.
    pub fn endpoints(&self) -> (BoundaryPoint<HeckeElem>, BoundaryPoint<HeckeElem>) {
        (self.map.at_zero(), self.map.at_infinity())
    }

    /// `1 / |c d|` for a finite edge.
    pub fn diameter(&self) -> Option<HeckeElem> {
        if self.is_vertical() {
            return None;
        }
        Some((self.map.c.clone() * self.map.d.clone()).abs().inverse())
    }
}

/// Crossed edges in descending order along the ray.
#[derive(Clone, Debug)]
pub struct CrossingList {
    pub q: u32,
    pub crossings: Vec<OrbitGeodesic>,
    /// Exit side taken in each polygon of the chain.
    pub path: Vec<usize>,
    pub floor: HeightFloor,
}

impl CrossingList {
    /// Word in `T`, `U` for crossing `k`.
    pub fn word(&self, k: usize) -> String {
        let c = &self.crossings[k];
        let mut w = String::new();
        // W^i U = (TU)^(i-1) T
        for &i in &self.path[..c.step] {
            for _ in 1..i {
                w.push_str("TU");
            }
            w.push('T');
        }
        for _ in 0..c.side {
            w.push_str("TU");
        }
        w
    }

    pub fn finite(&self) -> impl Iterator<Item = &OrbitGeodesic> {
        self.crossings.iter().filter(|c| !c.is_vertical())
    }
}

/// `x` seen through outward-rounded dyadic intervals.
struct XView {
    spec: RealSpec,
    fixed: Option<Enclosure>,
    /// Finest useful scale for a fixed enclosure.
    max_scale: u64,
    cache: RefCell<Vec<Dyadic>>,
}

impl XView {
    fn new(x: &RealSpec) -> Result<Self> {
        if x.is_rational() {
            return Err(Error::RationalInput);
        }
        let (fixed, max_scale) = match x {
            RealSpec::Quadratic { .. } => (None, u64::MAX),
            _ => {
                let e = x.enclosure(0);
                let bits = (-e.ln_width() / LN_2).max(0.0) as u64 + 64;
                (Some(e), bits)
            }
        };
        let probe = x.enclosure(64);
        if !probe.inside_unit_interval() {
            return Err(Error::OutOfDomain(format!("{x} is not inside (0, 1)")));
        }
        Ok(XView {
            spec: x.clone(),
            fixed,
            max_scale,
            cache: RefCell::new(Vec::new()),
        })
    }

    fn at(&self, scale: u64) -> Dyadic {
        if let Some(d) = self.cache.borrow().iter().find(|d| d.scale == scale) {
            return d.clone();
        }
        let d = match &self.fixed {
            Some(e) => Dyadic::from_enclosure(e, scale),
            None => Dyadic::from_enclosure(&self.spec.enclosure(scale + 8), scale),
        };
        let mut cache = self.cache.borrow_mut();
        if cache.len() > 8 {
            cache.remove(0);
        }
        cache.push(d.clone());
        d
    }

    /// Enclosure of `c x - a` with at least `rel_bits` relative bits.
    fn linear_form(&self, a: &HeckeElem, c: &HeckeElem, rel_bits: u64) -> Option<Dyadic> {
        let mut scale = (96 + 2 * a.max_bits().max(c.max_bits())).next_power_of_two();
        loop {
            let e = c
                .enclose_at(scale)
                .mul(&self.at(scale))
                .add(&a.enclose_at(scale).neg());
            if e.relative_bits().is_some_and(|b| b >= rel_bits) {
                return Some(e);
            }
            if scale > self.max_scale {
                return None;
            }
            scale *= 2;
        }
    }

    /// Sign of `x - a/c`.
    fn side(&self, col: &(HeckeElem, HeckeElem)) -> Option<Ordering> {
        let (a, c) = col;
        if c.is_zero() {
            // the vertex at infinity lies above everything
            return Some(Ordering::Less);
        }
        let s = self.linear_form(a, c, 1)?.sign()?;
        Some(if c.sign() == Ordering::Less {
            s.reverse()
        } else {
            s
        })
    }

    /// `ln |x - a/c|`.
    fn ln_distance(&self, col: &(HeckeElem, HeckeElem)) -> Option<f64> {
        let (a, c) = col;
        Some(self.linear_form(a, c, 50)?.ln_abs_mid() - c.ln_abs())
    }
}

struct Descent {
    /// `W^j e_1`, `j = 0 .. q`.
    w_cols: Vec<(HeckeElem, HeckeElem)>,
    /// `W^j`, `j = 0 .. q`.
    w_pows: Vec<HeckeMap>,
    /// `W^i U`, `i = 0 .. q`.
    w_u: Vec<HeckeMap>,
}

impl Descent {
    fn new(group: &ZonalGroup) -> Self {
        let w = group.w();
        let mut w_pows = vec![HeckeMap::identity()];
        for j in 1..group.q as usize {
            w_pows.push(raw_mul(&w_pows[j - 1], &w));
        }
        let e1 = (HeckeElem::one().with_field(&group.field), HeckeElem::zero());
        let w_cols = w_pows.iter().map(|m| raw_col(m, &e1)).collect();
        let w_u = w_pows.iter().map(|m| raw_mul(m, &group.u)).collect();
        Descent {
            w_cols,
            w_pows,
            w_u,
        }
    }
}

/// Edges of the tessellation crossed by the vertical ray above `x` at
/// height at least `floor`, top to bottom. The two vertical edges bounding
/// the strip `0 < Re z < 1` come first.
pub fn enumerate_crossings(
    group: &ZonalGroup,
    x: &RealSpec,
    floor: HeightFloor,
    budget: usize,
) -> Result<CrossingList> {
    let view = XView::new(x)?;
    enumerate_with(group, &view, floor, budget)
}

fn enumerate_with(
    group: &ZonalGroup,
    view: &XView,
    floor: HeightFloor,
    budget: usize,
) -> Result<CrossingList> {
    let d = Descent::new(group);
    let q = group.q as usize;
    let mut crossings = vec![
        OrbitGeodesic {
            map: HeckeMap::identity(),
            ln_height: f64::INFINITY,
            step: 0,
            side: 0,
        },
        OrbitGeodesic {
            map: d.w_pows[1].clone(),
            ln_height: f64::INFINITY,
            step: 0,
            side: 1,
        },
    ];
    let mut path = Vec::new();
    let mut g = HeckeMap::identity();
    let exhausted = |n: usize| Error::PrecisionExhausted { certified: n };
    loop {
        let n_found = crossings.len();
        let cols: Vec<(HeckeElem, HeckeElem)> = d.w_cols.iter().map(|w| raw_col(&g, w)).collect();
        // Vertices g(v_0), ..., g(v_{q-1}) are monotone between the ends of
        // the entry side, so the side of x flips exactly once.
        let first = if path.is_empty() { 2 } else { 1 };
        let mut prev = view
            .side(&cols[first - 1])
            .ok_or_else(|| exhausted(n_found))?;
        let mut exit = None;
        for (j, col) in cols.iter().enumerate().take(q).skip(first) {
            let s = view.side(col).ok_or_else(|| exhausted(n_found))?;
            if s != prev {
                exit = Some(j);
                break;
            }
            prev = s;
        }
        let j = match exit {
            Some(j) => j,
            None if !path.is_empty() => {
                // Between g(v_{q-1}) and g(v_0) on the entry side.
                unreachable!("x left the entry side of the polygon")
            }
            None => unreachable!("x is outside (0, 1)"),
        };
        let lu = view
            .ln_distance(&cols[j - 1])
            .ok_or_else(|| exhausted(n_found))?;
        let lv = view
            .ln_distance(&cols[j])
            .ok_or_else(|| exhausted(n_found))?;
        let ln_height = 0.5 * (lu + lv);
        if ln_height < floor.ln() {
            break;
        }
        if crossings.len() >= budget {
            return Err(Error::BudgetExceeded { budget, ln_height });
        }
        crossings.push(OrbitGeodesic {
            map: raw_mul(&g, &d.w_pows[j]).canonicalize(),
            ln_height,
            step: path.len(),
            side: j,
        });
        g = raw_mul(&g, &d.w_u[j]);
        path.push(j);
    }
    Ok(CrossingList {
        q: group.q,
        crossings,
        path,
        floor,
    })
}

/// A cusp `p/q` of the group in canonical form, with the number of crossed
/// finite edges ending there.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaRational {
    pub p: HeckeElem,
    pub q: HeckeElem,
    pub multiplicity: usize,
}

impl fmt::Display for GammaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.p, self.q)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaConvergent {
    pub rational: GammaRational,
    pub theta: f64,
    pub depth: f64,
    pub t: f64,
    /// `ln q̂`.
    pub ln_q: f64,
}

/// Cusps met by at least two crossed finite edges, ordered by `t`.
pub fn gamma_convergents(
    group: &ZonalGroup,
    x: &RealSpec,
    floor: HeightFloor,
    budget: usize,
) -> Result<(CrossingList, Vec<GammaConvergent>)> {
    let view = XView::new(x)?;
    let list = enumerate_with(group, &view, floor, budget)?;
    let convs = convergents_from_list(group, &view, &list)?;
    Ok((list, convs))
}

fn convergents_from_list(
    group: &ZonalGroup,
    view: &XView,
    list: &CrossingList,
) -> Result<Vec<GammaConvergent>> {
    // hashing ignores the field's lazily filled cache
    #[allow(clippy::mutable_key_type)]
    let mut counts: HashMap<(HeckeElem, HeckeElem), usize> = HashMap::new();
    let mut order = Vec::new();
    for c in list.finite() {
        let m = &c.map;
        let ends = [
            (m.a.clone(), m.c.clone()),
            (
                m.b.clone() * group.lambda.clone(),
                m.d.clone() * group.lambda.clone(),
            ),
        ];
        for (p, q) in ends {
            let key = canonical_column(p, q);
            let n = counts.entry(key.clone()).or_insert(0);
            if *n == 0 {
                order.push(key);
            }
            *n += 1;
        }
    }
    let mut out = Vec::new();
    for key in order {
        let multiplicity = counts[&key];
        if multiplicity < 2 {
            continue;
        }
        let (p, q) = key;
        let ln_q = q.ln_abs();
        let ln_dist =
            view.ln_distance(&(p.clone(), q.clone()))
                .ok_or(Error::PrecisionExhausted {
                    certified: out.len(),
                })?;
        let ln_theta = 2.0 * ln_q + ln_dist;
        let theta = ln_theta.exp();
        out.push(GammaConvergent {
            rational: GammaRational { p, q, multiplicity },
            theta,
            depth: 2.0 * theta,
            t: LN_2 - ln_dist,
            ln_q,
        });
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    if out.windows(2).any(|w| w[0].t == w[1].t) {
        return Err(Error::Tie);
    }
    Ok(out)
}

/// Modular Γ-convergents compared with the classical convergents.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModularCheck {
    pub x: String,
    pub gamma_count: usize,
    /// The Γ-list started with `0/1`, which is dropped before comparing.
    pub leading_zero: bool,
    /// Convergents `p_n/q_n` with `q_{n+2} <= (2h)^{-1/2}`, which the
    /// height floor guarantees to be present.
    pub required: usize,
    pub max_theta_error: f64,
    pub mismatch: Option<String>,
}

impl ModularCheck {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

fn integer_rational(p: &HeckeElem, q: &HeckeElem) -> Option<Rational> {
    let (p, q) = (p.to_rational()?, q.to_rational()?);
    if !p.is_integer() || !q.is_integer() {
        return None;
    }
    Rational::new(p.to_integer(), q.to_integer()).ok()
}

pub fn modular_cross_check(
    x: &RealSpec,
    floor: HeightFloor,
    budget: usize,
) -> Result<ModularCheck> {
    let (_, convs) = gamma_convergents(&ZonalGroup::modular(), x, floor, budget)?;
    let mut gamma = Vec::with_capacity(convs.len());
    for c in &convs {
        match integer_rational(&c.rational.p, &c.rational.q) {
            Some(r) => gamma.push((r, c.theta)),
            None => {
                return Ok(ModularCheck {
                    x: x.to_string(),
                    gamma_count: convs.len(),
                    leading_zero: false,
                    required: 0,
                    max_theta_error: 0.0,
                    mismatch: Some(format!("non-integral cusp {}", c.rational)),
                })
            }
        }
    }
    let leading_zero = gamma
        .first()
        .is_some_and(|(r, _)| r.p().is_zero() && r.q().is_one());
    if leading_zero {
        gamma.remove(0);
    }
    let cf = cf_expand(x, gamma.len() + 3)?;
    let classical = convergents(&cf);
    // 2 ln q_{n+2} <= -ln 2 - ln h
    let bound = -LN_2 - floor.ln();
    let required = (0..classical.len().saturating_sub(2))
        .take_while(|&i| 2.0 * ln_abs(classical[i + 2].q()) <= bound)
        .count();
    let mut mismatch = None;
    let mut max_theta_error = 0.0f64;
    for (i, (r, th)) in gamma.iter().enumerate() {
        if *r != classical[i] {
            mismatch = Some(format!(
                "entry {}: geometric {r}, classical {}",
                i + 1,
                classical[i]
            ));
            break;
        }
        let exact = theta(x, r)?.value;
        max_theta_error = max_theta_error.max((exact - th).abs());
    }
    if mismatch.is_none() && gamma.len() < required {
        mismatch = Some(format!(
            "only {} convergents found, {required} required by the height floor",
            gamma.len()
        ));
    }
    if mismatch.is_none() && max_theta_error > 1e-9 {
        mismatch = Some(format!("theta differs by {max_theta_error:e}"));
    }
    Ok(ModularCheck {
        x: x.to_string(),
        gamma_count: convs.len(),
        leading_zero,
        required,
        max_theta_error,
        mismatch,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeckeLevySample {
    pub n: usize,
    /// `ln q̂_n / n` at the last Γ-convergent.
    pub ln_q_ratio: f64,
    /// `-ln|x - p̂_n/q̂_n| / (2n)` at the last Γ-convergent.
    pub ln_dist_ratio: f64,
    /// `(n, ln q̂_n / n)` every 50 terms.
    pub trace: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeckeLevyReport {
    pub q: u32,
    pub target: f64,
    pub samples: Vec<HeckeLevySample>,
    pub mean: f64,
    pub stderr: f64,
    pub mean_ln_dist: f64,
}

/// Terminal Lévy ratios for one `x`; needs `min_convergents` Γ-convergents.
pub fn hecke_levy_sample(
    group: &ZonalGroup,
    x: &RealSpec,
    floor: HeightFloor,
    budget: usize,
    min_convergents: usize,
) -> Result<HeckeLevySample> {
    let (_, convs) = gamma_convergents(group, x, floor, budget)?;
    levy_from_convergents(&convs, min_convergents)
}

pub fn levy_from_convergents(
    convs: &[GammaConvergent],
    min_convergents: usize,
) -> Result<HeckeLevySample> {
    if convs.len() < min_convergents.max(1) {
        return Err(Error::InsufficientEvents {
            needed: min_convergents.max(1),
            got: convs.len(),
        });
    }
    let n = convs.len();
    let last = &convs[n - 1];
    let trace = convs
        .iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c.ln_q / (i + 1) as f64))
        .filter(|(i, _)| i % 50 == 0 || *i == n)
        .collect();
    Ok(HeckeLevySample {
        n,
        ln_q_ratio: last.ln_q / n as f64,
        ln_dist_ratio: (last.t - LN_2) / (2.0 * n as f64),
        trace,
    })
}

/// Pool per-sample estimates of `lim ln q̂_n / n`.
pub fn pool_levy(q: u32, samples: Vec<HeckeLevySample>) -> Result<HeckeLevyReport> {
    let target = PI * hecke_area(q)? / (4.0 * LN_2);
    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.ln_q_ratio).sum::<f64>() / n;
    let var = samples
        .iter()
        .map(|s| (s.ln_q_ratio - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0).max(1.0);
    let mean_ln_dist = samples.iter().map(|s| s.ln_dist_ratio).sum::<f64>() / n;
    Ok(HeckeLevyReport {
        q,
        target,
        mean,
        stderr: (var / n).sqrt(),
        mean_ln_dist,
        samples,
    })
}

/// Sequential driver over a list of points.
pub fn hecke_levy_experiment(
    q: u32,
    samples: &[RealSpec],
    floor: HeightFloor,
    budget: usize,
    min_convergents: usize,
) -> Result<HeckeLevyReport> {
    let group = ZonalGroup::hecke(q)?;
    let per = samples
        .iter()
        .map(|x| hecke_levy_sample(&group, x, floor, budget, min_convergents))
        .collect::<Result<Vec<_>>>()?;
    pool_levy(q, per)
}
