//! Textual specifications of real numbers in `(0, 1)` and their enclosures.
//!
//! ```text
//! rat:P/Q            exact rational
//! quad:A,B,C[,D]     (A + B*sqrt(C)) / D reduced mod 1, C not a square
//! quad:golden        alias for quad:-1,1,5,2
//! dec:0.ddd          decimal, correct to half a unit in the last digit
//! rand:SEED:DIGITS   uniform draw, DIGITS decimal digits from a seeded stream
//! ```

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::interval::Enclosure;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealSpec {
    Rational(BigRational),
    /// `(a + b sqrt(c)) / d` as written; see [`RealSpec::quadratic_parts`]
    /// for the normalized form.
    Quadratic {
        a: BigInt,
        b: BigInt,
        c: BigInt,
        d: BigInt,
    },
    /// Fractional digits after `0.`.
    Decimal(String),
    Random {
        seed: u64,
        digits: usize,
    },
}

/// `(P + sqrt(N)) / Q` with `Q | N - P²`, the form used by the periodic
/// expansion. The value lies in `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    pub p: BigInt,
    pub n: BigInt,
    pub q: BigInt,
}

/// SplitMix64 finalizer applied to `master + index * golden gamma`.
pub fn splitmix64(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Decimal digits to request for `n_terms` certified partial quotients.
pub fn default_digits(n_terms: usize) -> usize {
    (1.3 * n_terms as f64 * 1.031 + 64.0).ceil() as usize
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

/// Floor of `(a + s*sqrt(m)) / d`, `d > 0`, `m` not a perfect square.
fn floor_quadratic(a: &BigInt, negative_root: bool, m: &BigInt, d: &BigInt) -> BigInt {
    let r = m.sqrt();
    if negative_root {
        Integer::div_floor(&(a - &r - 1), d)
    } else {
        Integer::div_floor(&(a + &r), d)
    }
}

impl RealSpec {
    pub fn rational(p: i64, q: i64) -> Self {
        RealSpec::Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn golden() -> Self {
        RealSpec::Quadratic {
            a: BigInt::from(-1),
            b: BigInt::one(),
            c: BigInt::from(5),
            d: BigInt::from(2),
        }
    }

    /// Per-sample spec derived from a master seed.
    pub fn random_sample(master: u64, index: u64, digits: usize) -> Self {
        RealSpec::Random {
            seed: splitmix64(master, index),
            digits,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, RealSpec::Rational(_))
    }

    /// Rational and quadratic specs are known exactly.
    pub fn is_exact(&self) -> bool {
        matches!(self, RealSpec::Rational(_) | RealSpec::Quadratic { .. })
    }

    /// Quadratic irrationals are not typical points; almost-everywhere
    /// limits do not apply to them.
    pub fn is_generic(&self) -> bool {
        matches!(self, RealSpec::Decimal(_) | RealSpec::Random { .. })
    }

    pub fn exact_rational(&self) -> Option<&BigRational> {
        match self {
            RealSpec::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Normalized `(A, B, C, D)` with `D > 0` and value in `(0, 1)`.
    pub fn quadratic_parts(&self) -> Option<(BigInt, BigInt, BigInt, BigInt)> {
        let RealSpec::Quadratic { a, b, c, d } = self else {
            return None;
        };
        let (mut a, mut b, d) = if d.is_negative() {
            (-a, -b, -d)
        } else {
            (a.clone(), b.clone(), d.clone())
        };
        let m = &b * &b * c;
        let fl = floor_quadratic(&a, b.is_negative(), &m, &d);
        a -= fl * &d;
        if b.is_zero() {
            b = BigInt::zero();
        }
        Some((a, b, c.clone(), d))
    }

    pub fn quadratic_form(&self) -> Option<QuadraticForm> {
        let (a, b, c, d) = self.quadratic_parts()?;
        // (a + b√c)/d = (a d + sgn(b) √(b² c d²)) / d², flipped when b < 0
        let n = &b * &b * &c * &d * &d;
        let (p, q) = if b.is_negative() {
            (-(&a * &d), -(&d * &d))
        } else {
            (&a * &d, &d * &d)
        };
        Some(QuadraticForm { p, n, q })
    }

    /// Random digits as an integer `m` with `x ∈ [m, m+1] / 10^digits`.
    fn random_mantissa(seed: u64, digits: usize) -> BigInt {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: String = (0..digits)
            .map(|_| char::from(b'0' + rng.gen_range(0..10u8)))
            .collect();
        s.parse().unwrap()
    }

    /// Enclosure of the value. `bits` sets the precision for quadratic
    /// specs; decimal and random specs have a fixed width.
    pub fn enclosure(&self, bits: u64) -> Enclosure {
        match self {
            RealSpec::Rational(r) => Enclosure::exact(r),
            RealSpec::Quadratic { .. } => {
                let (a, b, c, d) = self.quadratic_parts().unwrap();
                let m = &b * &b * &c;
                let r = (m << (2 * bits)).sqrt();
                let scale = BigInt::one() << bits;
                let base = &a * &scale;
                let (lo, hi) = if b.is_negative() {
                    (&base - &r - 1, &base - &r)
                } else {
                    (&base + &r, &base + &r + 1)
                };
                Enclosure::new(lo, hi, d * scale)
            }
            RealSpec::Decimal(digits) => {
                let m: BigInt = digits.parse().unwrap();
                let den = BigInt::from(10).pow(digits.len() as u32 + 1);
                let c = m * 10;
                Enclosure::new(&c - 5, &c + 5, den)
            }
            RealSpec::Random { seed, digits } => {
                let m = Self::random_mantissa(*seed, *digits);
                let den = BigInt::from(10).pow(*digits as u32);
                Enclosure::new(m.clone(), m + 1, den)
            }
        }
    }

    fn parse_quad(body: &str) -> Result<RealSpec> {
        if body == "golden" {
            return Ok(Self::golden());
        }
        let parts: Vec<&str> = body.split(',').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(Error::Parse(format!(
                "quad expects A,B,C[,D], got {body:?}"
            )));
        }
        let a = parse_int(parts[0])?;
        let b = parse_int(parts[1])?;
        let c = parse_int(parts[2])?;
        let d = match parts.get(3) {
            Some(s) => parse_int(s)?,
            None => BigInt::one(),
        };
        if !c.is_positive() {
            return Err(Error::Parse("quad: C must be positive".into()));
        }
        if b.is_zero() {
            return Err(Error::Parse("quad: B must be nonzero".into()));
        }
        if d.is_zero() {
            return Err(Error::Parse("quad: D must be nonzero".into()));
        }
        let r = c.sqrt();
        if &r * &r == c {
            return Err(Error::Parse("quad: C must not be a perfect square".into()));
        }
        Ok(RealSpec::Quadratic { a, b, c, d })
    }
}

impl FromStr for RealSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing spec kind in {s:?}")))?;
        match kind {
            "rat" => {
                let (p, q) = body
                    .split_once('/')
                    .ok_or_else(|| Error::Parse(format!("rat expects P/Q, got {body:?}")))?;
                let p = parse_int(p)?;
                let q = parse_int(q)?;
                if q.is_zero() {
                    return Err(Error::Parse("rat: zero denominator".into()));
                }
                Ok(RealSpec::Rational(BigRational::new(p, q)))
            }
            "quad" => Self::parse_quad(body),
            "dec" => {
                let digits = body
                    .strip_prefix("0.")
                    .ok_or_else(|| Error::Parse(format!("dec expects 0.ddd, got {body:?}")))?;
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(Error::Parse(format!("dec expects 0.ddd, got {body:?}")));
                }
                Ok(RealSpec::Decimal(digits.to_string()))
            }
            "rand" => {
                let (seed, digits) = body.split_once(':').ok_or_else(|| {
                    Error::Parse(format!("rand expects SEED:DIGITS, got {body:?}"))
                })?;
                let seed: u64 = seed
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad seed {seed:?}")))?;
                let digits: usize = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad digit count {digits:?}")))?;
                if digits == 0 {
                    return Err(Error::Parse("rand: DIGITS must be positive".into()));
                }
                Ok(RealSpec::Random { seed, digits })
            }
            _ => Err(Error::Parse(format!("unknown spec kind {kind:?}"))),
        }
    }
}

impl fmt::Display for RealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSpec::Rational(r) => write!(f, "rat:{}/{}", r.numer(), r.denom()),
            RealSpec::Quadratic { a, b, c, d } => {
                if d.is_one() {
                    write!(f, "quad:{a},{b},{c}")
                } else {
                    write!(f, "quad:{a},{b},{c},{d}")
                }
            }
            RealSpec::Decimal(d) => write!(f, "dec:0.{d}"),
            RealSpec::Random { seed, digits } => write!(f, "rand:{seed}:{digits}"),
        }
    }
}

impl Serialize for RealSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RealSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "rat:2/7",
            "quad:-1,1,5,2",
            "quad:0,1,2",
            "dec:0.414213",
            "rand:7:200",
        ] {
            let spec: RealSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert_eq!(
            "quad:golden".parse::<RealSpec>().unwrap(),
            RealSpec::golden()
        );
        assert_eq!(
            "rat:4/14".parse::<RealSpec>().unwrap().to_string(),
            "rat:2/7"
        );
    }

    #[test]
    fn parse_errors() {
        for s in [
            "",
            "rat:1",
            "rat:1/0",
            "quad:1,1,4",
            "quad:1,0,2",
            "dec:1.5",
            "dec:0.",
            "rand:1",
            "rand:1:0",
            "foo:1",
        ] {
            assert!(s.parse::<RealSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn quadratic_normalization() {
        // sqrt(2) reduces to sqrt(2) - 1
        let x: RealSpec = "quad:0,1,2".parse().unwrap();
        let (a, b, c, d) = x.quadratic_parts().unwrap();
        assert_eq!(
            (a, b, c, d),
            (
                BigInt::from(-1),
                BigInt::one(),
                BigInt::from(2),
                BigInt::one()
            )
        );
        let e = x.enclosure(80);
        assert!((e.mid_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        // negative root: (3 - sqrt 5)/2 = 0.381966...
        let y: RealSpec = "quad:3,-1,5,2".parse().unwrap();
        assert!((y.enclosure(80).mid_f64() - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        let z: RealSpec = "quad:1,1,3,-4".parse().unwrap();
        let expected = -(1.0 + 3f64.sqrt()) / 4.0 + 1.0;
        assert!((z.enclosure(80).mid_f64() - expected).abs() < 1e-15);
    }

    #[test]
    fn decimal_interval_is_half_ulp() {
        let x: RealSpec = "dec:0.414213".parse().unwrap();
        let e = x.enclosure(0);
        assert_eq!(e.lo(), rational(4142125, 10_000_000));
        assert_eq!(e.hi(), rational(4142135, 10_000_000));
    }

    #[test]
    fn random_digits_are_prefix_stable() {
        let short = RealSpec::Random {
            seed: 11,
            digits: 50,
        }
        .enclosure(0);
        let long = RealSpec::Random {
            seed: 11,
            digits: 80,
        }
        .enclosure(0);
        assert!(short.lo() <= long.lo() && long.hi() <= short.hi());
        assert_ne!(splitmix64(1, 0), splitmix64(1, 1));
        assert_eq!(default_digits(2000), 2745);
    }
}
