//! Excursion events along the vertical ray above `x` and the statistics
//! computed from them.

use serde::Serialize;

use crate::cf::{ApproxContext, ApproxKind, Rational, SandwichCheck};
use crate::error::{Error, Result};
use crate::hyperbolic::horoball_chord_length;
use crate::realspec::RealSpec;
use crate::scalar::ln_abs;
use num_traits::Float;

use std::f64::consts::{LN_2, PI};

/// One tangency with a horoball at a rational.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExcursionEvent {
    pub t: f64,
    pub depth: f64,
    pub theta: f64,
    pub ln_theta: f64,
    pub ln_q: f64,
    pub kind: ApproxKind,
    pub convergent_index: Option<usize>,
    #[serde(skip)]
    pub rational: Option<Rational>,
}

impl ExcursionEvent {
    pub fn is_approximating(&self) -> bool {
        self.kind == ApproxKind::Convergent
    }

    /// `ln |x - p/q|`.
    pub fn ln_distance(&self) -> f64 {
        LN_2 - self.t
    }
}

#[derive(Clone, Debug)]
pub struct SeriesOptions {
    /// Events dropped from the front of each filtered sequence before
    /// averaging.
    pub burn_in: usize,
    /// Keep the exact `p/q` on every event. Off for large runs.
    pub keep_rationals: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            burn_in: 10,
            keep_rationals: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExcursionSeries {
    pub spec: RealSpec,
    pub events: Vec<ExcursionEvent>,
    pub t_max: f64,
    pub n_terms: usize,
    pub burn_in: usize,
    /// `ln a_n` for `n = 1 ..= N + 1`.
    pub ln_quotients: Vec<f64>,
    /// Exact comparison of `1/θ_n` with `a_{n+1}`, `n = 1 ..= N`.
    pub sandwich: Vec<SandwichCheck>,
    pub non_generic: bool,
}

impl ExcursionSeries {
    pub fn count(&self, kind: Option<ApproxKind>) -> usize {
        self.events
            .iter()
            .filter(|e| kind.is_none_or(|k| e.kind == k))
            .count()
    }

    /// Events for the requested selection: all when `approximating_only` is
    /// false.
    fn selected(&self, approximating_only: bool) -> impl Iterator<Item = &ExcursionEvent> {
        self.events
            .iter()
            .filter(move |e| !approximating_only || e.is_approximating())
    }

    /// Convergent events `n = 1 ..= N` in order.
    pub fn convergent_events(&self) -> Vec<&ExcursionEvent> {
        self.events
            .iter()
            .filter(|e| e.convergent_index.is_some_and(|n| n >= 1))
            .collect()
    }
}

pub fn build_series(x: &RealSpec, n_terms: usize) -> Result<ExcursionSeries> {
    build_series_with(x, n_terms, &SeriesOptions::default())
}

pub fn build_series_with(
    x: &RealSpec,
    n_terms: usize,
    opts: &SeriesOptions,
) -> Result<ExcursionSeries> {
    if n_terms < 10 {
        return Err(Error::InsufficientEvents {
            needed: 10,
            got: n_terms,
        });
    }
    let mut ctx = ApproxContext::new(x, n_terms)?;
    let records = ctx.records()?;
    let sandwich = ctx.sandwich()?;
    let ln_quotients = ctx.quotients().iter().map(ln_abs).collect();
    let events: Vec<ExcursionEvent> = records
        .into_iter()
        .filter(|r| r.t > 0.0)
        .map(|r| ExcursionEvent {
            t: r.t,
            depth: r.depth,
            theta: r.theta,
            ln_theta: r.ln_theta,
            ln_q: r.ln_q,
            kind: r.kind,
            convergent_index: r.convergent_index,
            rational: opts.keep_rationals.then_some(r.rational),
        })
        .collect();
    let t_max = events.last().map_or(0.0, |e| e.t);
    Ok(ExcursionSeries {
        spec: x.clone(),
        events,
        t_max,
        n_terms,
        burn_in: opts.burn_in,
        ln_quotients,
        sandwich,
        non_generic: !x.is_generic(),
    })
}

/// The rate function: `z` on `(0, 1]`, `2 - z + 2 ln z` on `[1, 2]`.
pub fn rate_profile<F: Float>(z: F) -> Result<F> {
    let two = F::one() + F::one();
    if !(z > F::zero() && z <= two) {
        return Err(Error::OutOfDomain(
            "rate profile is defined on (0, 2]".into(),
        ));
    }
    if z <= F::one() {
        Ok(z)
    } else {
        Ok(two - z + two * z.ln())
    }
}

fn profile(z: f64) -> f64 {
    rate_profile(z).expect("argument checked by caller")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub k: f64,
    pub n_all: usize,
    pub n_app: usize,
    pub rate_all: f64,
    pub rate_app: f64,
    pub predicted_all: f64,
    pub predicted_app: f64,
    pub rel_err_all: f64,
    pub rel_err_app: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    pub t_max: f64,
    pub rows: Vec<RateRow>,
}

/// `N(k)(t_max) / t_max` per kind against `3k/π²` and `3𝒜(k)/π²`.
pub fn counting_rates(series: &ExcursionSeries, k_grid: &[f64]) -> Result<RateReport> {
    if series.t_max <= 0.0 {
        return Err(Error::OutOfDomain("series horizon is zero".into()));
    }
    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        if !(k > 0.0 && k <= 2.0) {
            return Err(Error::OutOfDomain(format!("k = {k} is outside (0, 2]")));
        }
        let hits = series
            .events
            .iter()
            .filter(|e| e.depth < k && e.t <= series.t_max);
        let (mut n_all, mut n_app) = (0, 0);
        for e in hits {
            n_all += 1;
            if e.is_approximating() {
                n_app += 1;
            }
        }
        let rate_all = n_all as f64 / series.t_max;
        let rate_app = n_app as f64 / series.t_max;
        let predicted_all = 3.0 * k / (PI * PI);
        let predicted_app = 3.0 * profile(k) / (PI * PI);
        rows.push(RateRow {
            k,
            n_all,
            n_app,
            rate_all,
            rate_app,
            predicted_all,
            predicted_app,
            rel_err_all: rate_all / predicted_all - 1.0,
            rel_err_app: rate_app / predicted_app - 1.0,
        });
    }
    Ok(RateReport {
        t_max: series.t_max,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapLengthStats {
    pub k: f64,
    pub approximating_only: bool,
    pub n_events: usize,
    pub mean_gap: f64,
    pub predicted_gap: f64,
    /// Only for `k <= 1`.
    pub mean_chord: Option<f64>,
    pub predicted_chord: f64,
}

/// Mean spacing in `t` between consecutive events of depth below `k`, and
/// for `k <= 1` the mean length spent inside the horoball.
pub fn gap_and_length_stats(
    series: &ExcursionSeries,
    k: f64,
    approximating_only: bool,
) -> Result<GapLengthStats> {
    if !(k > 0.0 && k <= 2.0) {
        return Err(Error::OutOfDomain(format!("k = {k} is outside (0, 2]")));
    }
    let ts: Vec<&ExcursionEvent> = series
        .selected(approximating_only)
        .filter(|e| e.depth < k)
        .skip(series.burn_in)
        .collect();
    if ts.len() < 2 {
        return Err(Error::InsufficientEvents {
            needed: 2,
            got: ts.len(),
        });
    }
    let mean_gap = (ts[ts.len() - 1].t - ts[0].t) / (ts.len() - 1) as f64;
    let a_star = if approximating_only { profile(k) } else { k };
    let mean_chord = if k <= 1.0 {
        let total: f64 = ts
            .iter()
            .map(|e| horoball_chord_length(k, e.depth).expect("depth below k"))
            .sum();
        Some(total / ts.len() as f64)
    } else {
        None
    };
    Ok(GapLengthStats {
        k,
        approximating_only,
        n_events: ts.len(),
        mean_gap,
        predicted_gap: PI * PI / (3.0 * a_star),
        mean_chord,
        predicted_chord: PI,
    })
}

/// Grid `2i/40`, `i = 1..=40`, used for depth distributions.
pub fn depth_grid() -> Vec<f64> {
    (1..=40).map(|i| 2.0 * i as f64 / 40.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionReport {
    pub grid: Vec<f64>,
    pub cdf_all: Vec<f64>,
    pub reference_all: Vec<f64>,
    pub cdf_app: Vec<f64>,
    pub reference_app: Vec<f64>,
    pub sup_all: f64,
    pub sup_app: f64,
    pub n_all: usize,
    pub n_app: usize,
    pub mean_depth_all: f64,
    pub mean_depth_app: f64,
    pub mean_ln_depth_all: f64,
    pub mean_ln_depth_app: f64,
}

fn empirical_cdf(values: &[f64], grid: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    grid.iter()
        .map(|&g| sorted.partition_point(|&v| v <= g) as f64 / sorted.len() as f64)
        .collect()
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    s / n as f64
}

fn averaged(series: &ExcursionSeries, approximating_only: bool) -> Result<Vec<&ExcursionEvent>> {
    let ev: Vec<&ExcursionEvent> = series
        .selected(approximating_only)
        .skip(series.burn_in)
        .collect();
    if ev.len() < 100 {
        return Err(Error::InsufficientEvents {
            needed: 100,
            got: ev.len(),
        });
    }
    Ok(ev)
}

pub fn depth_statistics(series: &ExcursionSeries) -> Result<DistributionReport> {
    let all = averaged(series, false)?;
    let app = averaged(series, true)?;
    let grid = depth_grid();
    let d_all: Vec<f64> = all.iter().map(|e| e.depth).collect();
    let d_app: Vec<f64> = app.iter().map(|e| e.depth).collect();
    let cdf_all = empirical_cdf(&d_all, &grid);
    let cdf_app = empirical_cdf(&d_app, &grid);
    let reference_all: Vec<f64> = grid.iter().map(|&g| g / 2.0).collect();
    let reference_app: Vec<f64> = grid.iter().map(|&g| profile(g) / (2.0 * LN_2)).collect();
    Ok(DistributionReport {
        sup_all: sup_distance(&cdf_all, &reference_all),
        sup_app: sup_distance(&cdf_app, &reference_app),
        n_all: d_all.len(),
        n_app: d_app.len(),
        mean_depth_all: mean(d_all.iter().copied()),
        mean_depth_app: mean(d_app.iter().copied()),
        mean_ln_depth_all: mean(all.iter().map(|e| e.ln_theta + LN_2)),
        mean_ln_depth_app: mean(app.iter().map(|e| e.ln_theta + LN_2)),
        grid,
        cdf_all,
        reference_all,
        cdf_app,
        reference_app,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaStats {
    pub n_all: usize,
    pub n_app: usize,
    pub mean_theta_all: f64,
    pub mean_theta_app: f64,
    pub mean_ln_theta_all: f64,
    pub mean_ln_theta_app: f64,
}

pub fn theta_statistics(series: &ExcursionSeries) -> Result<ThetaStats> {
    let all = averaged(series, false)?;
    let app = averaged(series, true)?;
    Ok(ThetaStats {
        n_all: all.len(),
        n_app: app.len(),
        mean_theta_all: mean(all.iter().map(|e| e.theta)),
        mean_theta_app: mean(app.iter().map(|e| e.theta)),
        mean_ln_theta_all: mean(all.iter().map(|e| e.ln_theta)),
        mean_ln_theta_app: mean(app.iter().map(|e| e.ln_theta)),
    })
}

/// `(n, ln q_n / n, -ln|x - p_n/q_n| / (2n))`.
pub type LevyPoint = (usize, f64, f64);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevyReport {
    pub non_generic: bool,
    /// Terminal values over convergents.
    pub conv_ln_q: f64,
    pub conv_ln_dist: f64,
    /// Terminal values over all approximants with `θ < 1`.
    pub nconv_ln_q: f64,
    pub nconv_ln_dist: f64,
    pub conv_trace: Vec<LevyPoint>,
    pub nconv_trace: Vec<LevyPoint>,
}

fn levy_trace(events: &[&ExcursionEvent], stride: usize) -> Vec<LevyPoint> {
    let n = events.len();
    events
        .iter()
        .enumerate()
        .map(|(i, e)| (i + 1, e))
        .filter(|(i, _)| i % stride == 0 || *i == n)
        .map(|(i, e)| (i, e.ln_q / i as f64, -e.ln_distance() / (2.0 * i as f64)))
        .collect()
}

pub fn levy_limits(series: &ExcursionSeries) -> Result<LevyReport> {
    let conv = series.convergent_events();
    let all: Vec<&ExcursionEvent> = series.events.iter().collect();
    if conv.len() < 100 || all.len() < 100 {
        return Err(Error::InsufficientEvents {
            needed: 100,
            got: conv.len().min(all.len()),
        });
    }
    let conv_trace = levy_trace(&conv, 100);
    let nconv_trace = levy_trace(&all, 100);
    let (_, conv_ln_q, conv_ln_dist) = *conv_trace.last().unwrap();
    let (_, nconv_ln_q, nconv_ln_dist) = *nconv_trace.last().unwrap();
    Ok(LevyReport {
        non_generic: series.non_generic,
        conv_ln_q,
        conv_ln_dist,
        nconv_ln_q,
        nconv_ln_dist,
        conv_trace,
        nconv_trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoglawReport {
    /// `max_{10 <= n <= N} ln a_n / ln n`.
    pub max_ln_a_ratio: f64,
    /// `max_{10 <= n <= N} -ln θ_n / ln n`.
    pub max_neg_ln_theta_ratio: f64,
    /// Largest `|-ln θ_n - ln(a_{n+1} + 1)| - ln((a_{n+1}+2)/(a_{n+1}+1))`
    /// over `n`; negative when `a_{n+1} + 1 < 1/θ_n < a_{n+1} + 2` everywhere.
    pub sandwich_margin: f64,
    /// `n` with `1/θ_n` outside `(a_{n+1} + 1, a_{n+1} + 2)`, decided exactly.
    pub sandwich_failures: usize,
    /// `n` with `1/θ_n` outside `(a_{n+1}, a_{n+1} + 2)`.
    pub weak_sandwich_failures: usize,
    /// `max_n |(-ln θ_n) - ln a_{n+1}| / ln n` over `10 <= n <= N`.
    pub max_trace_gap: f64,
    /// `(n, running max of ln a_n / ln n, running max of -ln θ_n / ln n)`.
    pub trace: Vec<(usize, f64, f64)>,
}

/// `ln(e^a + c)` for a moderate `c`, stable for large `a`.
fn ln_add(a: f64, c: f64) -> f64 {
    if a > 40.0 {
        a + (c * (-a).exp()).ln_1p()
    } else {
        (a.exp() + c).ln()
    }
}

pub fn loglaw_diagnostics(series: &ExcursionSeries) -> Result<LoglawReport> {
    let conv = series.convergent_events();
    let n_max = conv.len();
    if n_max < 100 {
        return Err(Error::InsufficientEvents {
            needed: 100,
            got: n_max,
        });
    }
    let mut max_a = f64::NEG_INFINITY;
    let mut max_th = f64::NEG_INFINITY;
    let mut margin = f64::NEG_INFINITY;
    let mut gap = 0.0f64;
    let mut trace = Vec::new();
    for (i, e) in conv.iter().enumerate() {
        let n = i + 1;
        let ln_a_next = series.ln_quotients[n];
        let lo = ln_add(ln_a_next, 1.0);
        let hi = ln_add(ln_a_next, 2.0);
        margin = margin.max((-e.ln_theta - lo).abs() - (hi - lo));
        if n >= 10 {
            let ln_n = (n as f64).ln();
            max_a = max_a.max(series.ln_quotients[n - 1] / ln_n);
            max_th = max_th.max(-e.ln_theta / ln_n);
            gap = gap.max((-e.ln_theta - ln_a_next).abs() / ln_n);
            if n % 100 == 0 || n == n_max {
                trace.push((n, max_a, max_th));
            }
        }
    }
    Ok(LoglawReport {
        max_ln_a_ratio: max_a,
        max_neg_ln_theta_ratio: max_th,
        sandwich_margin: margin,
        sandwich_failures: series.sandwich.iter().filter(|c| !c.holds()).count(),
        weak_sandwich_failures: series.sandwich.iter().filter(|c| !c.weak_holds()).count(),
        max_trace_gap: gap,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_values() {
        assert_eq!(rate_profile(1.0f64).unwrap(), 1.0);
        assert!((rate_profile(2.0f64).unwrap() - 2.0 * LN_2).abs() < 1e-15);
        assert_eq!(rate_profile(0.5f64).unwrap(), 0.5);
        assert!(rate_profile(0.0f64).is_err());
        assert!(rate_profile(2.5f64).is_err());
        let below = rate_profile(1.0 - 1e-12).unwrap();
        let above = rate_profile(1.0 + 1e-12).unwrap();
        assert!((below - above).abs() < 1e-11);
    }

    #[test]
    fn golden_series_is_approximating() {
        let s = build_series_with(
            &RealSpec::golden(),
            200,
            &SeriesOptions {
                burn_in: 10,
                keep_rationals: true,
            },
        )
        .unwrap();
        assert!(s.non_generic);
        // leading 0/1 is the only nonclassical event
        assert_eq!(s.count(Some(ApproxKind::Nonclassical)), 1);
        let last = s.events.last().unwrap();
        assert!((last.depth - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        let levy = levy_limits(&s).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((levy.conv_ln_q - phi.ln()).abs() < 0.01);
        let ll = loglaw_diagnostics(&s).unwrap();
        assert_eq!(ll.max_ln_a_ratio, 0.0);
        assert!(ll.sandwich_margin < 0.0);
        assert_eq!(ll.sandwich_failures, 0);
        assert_eq!(ll.weak_sandwich_failures, 0);
    }

    #[test]
    fn too_few_terms() {
        assert!(build_series(&RealSpec::golden(), 0).is_err());
        assert!(matches!(
            build_series(&RealSpec::rational(1, 3), 20),
            Err(Error::RationalInput)
        ));
    }
}
