use std::cmp::Ordering;
use std::collections::BTreeSet;

use cusp_core::{
    cf_expand, convergents, enumerate_crossings, excursion_depth, gamma_convergents,
    horoball_chord_length, n_convergents, theta, ApproxContext, ApproxKind, BoundaryPoint, Dyadic,
    Error, HeightFloor, Horoball, RationalMap, RealSpec, ZonalGroup,
};
use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

fn spec(s: &str) -> RealSpec {
    s.parse().unwrap()
}

fn x_f64(x: &RealSpec) -> f64 {
    x.enclosure(200).mid_f64()
}

/// Hyperbolic length of the part of the semicircle of radius `r` above
/// height `y0`, by Simpson's rule on `ds = dφ / sin φ`.
fn clipped_semicircle_length(r: f64, y0: f64) -> f64 {
    let phi0 = (y0 / r).asin();
    let (a, b) = (phi0, std::f64::consts::PI - phi0);
    let n = 20_000;
    let h = (b - a) / n as f64;
    let f = |phi: f64| 1.0 / phi.sin();
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

#[test]
fn chord_matches_quadrature() {
    let exact = horoball_chord_length(1.0f64, 0.5).unwrap();
    assert!((exact - 2.0 * 2f64.acosh()).abs() < 1e-14);
    assert!((exact - 2.633916).abs() < 1e-6);
    // top height 1/d = 2, horoball Im z > 1/k = 1
    let quad = clipped_semicircle_length(2.0, 1.0);
    assert!((exact - quad).abs() < 1e-9, "{exact} vs {quad}");
    for (k, d) in [(0.5, 0.1), (2.0, 1.3), (1.5, 1.49)] {
        let exact = horoball_chord_length(k, d).unwrap();
        let quad = clipped_semicircle_length(1.0 / d, 1.0 / k);
        assert!(
            (exact - quad).abs() < 1e-8,
            "k={k} d={d}: {exact} vs {quad}"
        );
    }
    assert_eq!(horoball_chord_length(1.0f64, 1.0).unwrap(), 0.0);
}

#[test]
fn depth_is_inverse_top_height() {
    let r = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
    let d = excursion_depth(&r(2, 3), &r(0, 1)).unwrap();
    assert_eq!(d, r(3, 1));
    // distance from the top point (height 1/3) to height 1 along the
    // vertical through the centre is ln 3 = ln d
    let top = (2.0f64 / 3.0) / 2.0;
    assert!((d.to_f64().unwrap() - 1.0 / top).abs() < 1e-15);
    assert!(excursion_depth(&r(1, 2), &r(1, 2)).is_err());
}

#[test]
fn horoball_mapping_law() {
    for (p, q) in [(1i64, 2i64), (2, 5), (5, 8), (13, 21), (7, 3)] {
        // g = [[a, b], [q, -p]] sends p/q to ∞; a (-p) - b q = 1
        let egcd = (-p).extended_gcd(&q);
        assert_eq!(egcd.gcd, 1);
        let (a, b) = (egcd.x, -egcd.y);
        let big = |n: i64| BigRational::from_integer(BigInt::from(n));
        let g = RationalMap::new(big(a), big(b), big(q), big(-p)).unwrap();
        assert_eq!(
            g.apply(&BoundaryPoint::rational(p, q)),
            BoundaryPoint::Infinity
        );
        for r in [0.25f64, 1.0, 1.7] {
            let s = BigRational::new(BigInt::from((r * 100.0).round() as i64), BigInt::from(200));
            let ball = Horoball::at_rational(BigInt::from(p), BigInt::from(q), s).unwrap();
            let (cx, rad) = ball.center().unwrap();
            let (cx, rad) = (cx.to_f64().unwrap(), rad.to_f64().unwrap());
            assert!((rad - r / (2.0 * (q * q) as f64)).abs() < 1e-15);
            for i in 1..64 {
                let phi = std::f64::consts::TAU * i as f64 / 64.0;
                let z = Complex::new(cx + rad * phi.sin(), rad - rad * phi.cos());
                let w = g.apply_interior(z);
                assert!(
                    (w.im - 1.0 / r).abs() < 1e-9 * (1.0 / r),
                    "p/q={p}/{q} r={r}: image height {}",
                    w.im
                );
            }
        }
    }
}

/// Farey edges `u = p/q < x < v = r/s` with `rq - ps = 1` and
/// `√((x - u)(v - x)) >= h`. Such an edge has radius `1/(2qs) >= h`.
fn farey_edges_above(x: f64, h: f64) -> BTreeSet<(i64, i64, i64, i64)> {
    let bound = (1.0 / (2.0 * h)).floor() as i64;
    let mut out = BTreeSet::new();
    for q in 1..=bound {
        for s in 1..=bound / q {
            for p in 0..=q {
                for r in 0..=s {
                    if r * q - p * s != 1 {
                        continue;
                    }
                    let (u, v) = (p as f64 / q as f64, r as f64 / s as f64);
                    if u < x && x < v && ((x - u) * (v - x)).sqrt() >= h {
                        out.insert((p, q, r, s));
                    }
                }
            }
        }
    }
    out
}

fn crossing_edges(x: &RealSpec, h: f64) -> BTreeSet<(i64, i64, i64, i64)> {
    let g = ZonalGroup::modular();
    let list = enumerate_crossings(&g, x, HeightFloor::new(h).unwrap(), 100_000).unwrap();
    let mut seen = Vec::new();
    for c in list.finite() {
        let (e0, e1) = c.endpoints();
        let to_pair = |e: BoundaryPoint<_>| {
            let BoundaryPoint::Finite(v) = e else {
                panic!("finite edge with ∞ endpoint")
            };
            let r: BigRational = cusp_core::HeckeElem::to_rational(&v).unwrap();
            (r.numer().to_i64().unwrap(), r.denom().to_i64().unwrap())
        };
        let (a, b) = (to_pair(e0), to_pair(e1));
        let (lo, hi) = if a.0 * b.1 < b.0 * a.1 {
            (a, b)
        } else {
            (b, a)
        };
        seen.push((lo.0, lo.1, hi.0, hi.1));
    }
    let set: BTreeSet<_> = seen.iter().copied().collect();
    assert_eq!(set.len(), seen.len(), "duplicate edge for {x}");
    set
}

#[test]
fn modular_crossings_are_farey_edges() {
    for (s, h) in [
        ("quad:golden", 0.3),
        ("quad:golden", 0.01),
        ("rand:11:80", 0.005),
        ("quad:1,1,3,3", 0.002),
    ] {
        let x = spec(s);
        let got = crossing_edges(&x, h);
        let want = farey_edges_above(x_f64(&x), h);
        assert_eq!(got, want, "x = {s}, h = {h}");
    }
}

#[test]
fn hecke_crossings_straddle_and_clear_floor() {
    let g = ZonalGroup::hecke(5).unwrap();
    let x = spec("rand:7:200");
    let scale = 400;
    let xd = Dyadic::from_enclosure(&x.enclosure(scale + 64), scale);
    for h in [0.1f64, 1e-3] {
        let list = enumerate_crossings(&g, &x, HeightFloor::new(h).unwrap(), 100_000).unwrap();
        assert!(list.finite().count() >= 1);
        for c in list.finite() {
            let (e0, e1) = c.endpoints();
            let ends: Vec<Dyadic> = [e0, e1]
                .into_iter()
                .map(|e| e.finite().expect("finite edge").enclose_at(scale))
                .collect();
            let (u, v) = if ends[0].mid_f64() < ends[1].mid_f64() {
                (&ends[0], &ends[1])
            } else {
                (&ends[1], &ends[0])
            };
            let left = xd.add(&u.neg());
            let right = v.add(&xd.neg());
            assert_eq!(left.sign(), Some(Ordering::Greater));
            assert_eq!(right.sign(), Some(Ordering::Greater));
            let sq = left.mul(&right);
            assert!(sq.lo.is_positive());
            let height2 = sq.mid_f64();
            assert!(height2 >= h * h, "height² {height2}");
            assert!((0.5 * height2.ln() - c.ln_height).abs() < 1e-12);
        }
    }
}

#[test]
fn modular_gamma_convergents_match_cf_theta() {
    let x = RealSpec::golden();
    let (_, convs) = gamma_convergents(
        &ZonalGroup::modular(),
        &x,
        HeightFloor::new(1e-8).unwrap(),
        100_000,
    )
    .unwrap();
    let cf = convergents(&cf_expand(&x, 40).unwrap());
    assert!(convs.len() >= 10);
    for (g, r) in convs.iter().zip(&cf) {
        assert!(g.rational.multiplicity >= 2);
        assert!(g.theta < 1.0);
        let th = theta(&x, r).unwrap();
        assert!(
            (g.theta - th.value).abs() < 1e-9,
            "{}: {} vs {}",
            g.rational,
            g.theta,
            th.value
        );
        assert!((g.depth - 2.0 * g.theta).abs() < 1e-12);
    }
    let last = convs.last().unwrap();
    assert!((last.theta - 1.0 / 5f64.sqrt()).abs() < 1e-6);
}

#[test]
fn theta_limits_on_quadratics() {
    let golden = RealSpec::golden();
    let cf = convergents(&cf_expand(&golden, 60).unwrap());
    let five_eighths = cf.iter().find(|r| r.q() == &BigInt::from(8)).unwrap();
    assert_eq!(five_eighths.p(), &BigInt::from(5));
    let x = (5f64.sqrt() - 1.0) / 2.0;
    let th = theta(&golden, five_eighths).unwrap();
    assert!((th.value - 8.0 * (8.0 * x - 5.0).abs()).abs() < 1e-12);
    assert!((th.value - 0.446).abs() < 1e-3);
    let late = theta(&golden, &cf[55]).unwrap();
    assert!((late.value - 1.0 / 5f64.sqrt()).abs() < 1e-12);

    let root2 = spec("quad:-1,1,2");
    let cf = convergents(&cf_expand(&root2, 60).unwrap());
    let late = theta(&root2, &cf[55]).unwrap();
    assert!((late.value - 0.3535534).abs() < 1e-7);
    assert!((late.value - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);
}

#[test]
fn golden_expansion_is_all_ones() {
    let cf = cf_expand(&RealSpec::golden(), 200).unwrap();
    assert!(cf.quotients.iter().all(|a| a.is_one()));
    // x = 1/(1 + x) for the exact fixed point
    let x = x_f64(&RealSpec::golden());
    assert!((x - 1.0 / (1.0 + x)).abs() < 1e-15);
}

#[test]
fn truncated_decimal_certifies_a_prefix() {
    let x = spec("dec:0.414213");
    let n = match cf_expand(&x, 50) {
        Err(Error::PrecisionExhausted { certified }) => certified,
        other => panic!("expected exhaustion, got {other:?}"),
    };
    assert!(n >= 3);
    let cf = cf_expand(&x, n).unwrap();
    assert_eq!(cf.len(), n);
    // expansions of the interval endpoints agree exactly on the certified prefix
    let lo = cf_expand(&spec("rat:4142125/10000000"), 50).unwrap();
    let hi = cf_expand(&spec("rat:4142135/10000000"), 50).unwrap();
    let common = lo
        .quotients
        .iter()
        .zip(&hi.quotients)
        .take_while(|(a, b)| a == b)
        .count();
    assert!(cf.len() <= common);
    assert_eq!(cf.quotients[..], lo.quotients[..cf.len()]);
    assert!(cf.quotients.iter().all(|a| *a == BigInt::from(2)));
}

#[test]
fn determinant_identity_on_random_samples() {
    for i in 0..100 {
        let x = RealSpec::random_sample(42, i, 2300);
        let cf = cf_expand(&x, 2000).unwrap();
        assert_eq!(cf.len(), 2000);
        let c = convergents(&cf);
        let (mut p0, mut q0) = (BigInt::from(0), BigInt::from(1));
        for (n, r) in c.iter().enumerate() {
            let det = r.p() * &q0 - &p0 * r.q();
            let want = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(det, BigInt::from(want), "sample {i}, n = {}", n + 1);
            p0 = r.p().clone();
            q0 = r.q().clone();
        }
    }
}

/// Every `p/q` with `q |q x - p| < 1`, for `q` up to `q_max`, by scanning
/// the two nearest numerators. Returns `None` when some `θ` lies too close
/// to 1 for double precision.
fn theta_scan(x: f64, q_max: i64) -> Option<BTreeSet<(i64, i64)>> {
    let mut out = BTreeSet::new();
    for q in 1..=q_max {
        let f = (q as f64 * x).floor() as i64;
        for p in [f, f + 1] {
            if p.gcd(&q) != 1 {
                continue;
            }
            let th = q as f64 * (q as f64 * x - p as f64).abs();
            if (th - 1.0).abs() < 1e-9 {
                return None;
            }
            if th < 1.0 {
                out.insert((p, q));
            }
        }
    }
    Some(out)
}

#[test]
fn nonclassical_records_for_root3() {
    // √3 - 1 = [0; 1, 2, 1, 2, ...]
    let x = spec("quad:-1,1,3");
    let cf = cf_expand(&x, 6).unwrap();
    let q: Vec<u64> = cf.quotients.iter().map(|a| a.to_u64().unwrap()).collect();
    assert_eq!(q, [1, 2, 1, 2, 1, 2]);
    let records = n_convergents(&x, 14).unwrap();
    let q_max = records
        .iter()
        .map(|r| r.rational.q().to_i64().unwrap())
        .max()
        .unwrap();
    let got: BTreeSet<(i64, i64)> = records
        .iter()
        .map(|r| {
            (
                r.rational.p().to_i64().unwrap(),
                r.rational.q().to_i64().unwrap(),
            )
        })
        .collect();
    let want = theta_scan(x_f64(&x), q_max).unwrap();
    assert_eq!(got, want);
    let nonclassical: Vec<_> = records
        .iter()
        .filter(|r| r.kind == ApproxKind::Nonclassical)
        .collect();
    assert!(!nonclassical.is_empty());
    let conv: BTreeSet<(i64, i64)> = convergents(&cf_expand(&x, 14).unwrap())
        .iter()
        .map(|r| (r.p().to_i64().unwrap(), r.q().to_i64().unwrap()))
        .collect();
    for r in &nonclassical {
        let key = (
            r.rational.p().to_i64().unwrap(),
            r.rational.q().to_i64().unwrap(),
        );
        assert!(!conv.contains(&key));
    }
}

#[test]
fn golden_has_no_nonclassical_records() {
    let x = RealSpec::golden();
    let records = n_convergents(&x, 19).unwrap();
    // 0/1 is p_0/q_0 but not a best approximation when a_1 = 1
    for r in &records {
        let zero = r.rational.p() == &BigInt::from(0);
        assert_eq!(r.kind == ApproxKind::Convergent, !zero, "{:?}", r.rational);
    }
    let q_max = records
        .iter()
        .map(|r| r.rational.q().to_i64().unwrap())
        .max()
        .unwrap();
    assert!(q_max <= 10_000);
    let want = theta_scan(x_f64(&x), 10_000).unwrap();
    let got: BTreeSet<(i64, i64)> = records
        .iter()
        .map(|r| {
            (
                r.rational.p().to_i64().unwrap(),
                r.rational.q().to_i64().unwrap(),
            )
        })
        .collect();
    assert_eq!(got, want);
}

#[test]
fn sandwich_flags_agree_with_direct_evaluation() {
    for s in ["quad:3,-1,7", "quad:-1,1,2", "quad:1,1,13,4", "quad:golden"] {
        let x = spec(s);
        let mut ctx = ApproxContext::new(&x, 25).unwrap();
        let checks = ctx.sandwich().unwrap();
        let cf = cf_expand(&x, 26).unwrap();
        let conv = convergents(&cf);
        for (n, c) in checks.iter().enumerate() {
            let inv = 1.0 / theta(&x, &conv[n]).unwrap().value;
            let a = cf.quotients[n + 1].to_f64().unwrap();
            assert!(c.weak_holds(), "{s} n={}", n + 1);
            assert_eq!(
                c.lower,
                inv > a + 1.0,
                "{s} n={}: 1/θ = {inv}, a = {a}",
                n + 1
            );
            assert!(inv > a && inv < a + 2.0);
        }
    }
    let x = spec("quad:3,-1,7");
    let conv = convergents(&cf_expand(&x, 3).unwrap());
    let inv = 1.0 / theta(&x, &conv[0]).unwrap().value;
    assert!((inv - 1.715250).abs() < 1e-6);
}
