//! Desk-scale acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 2 and 11a assert `a_{n+1} + 1 < 1/θ_n < a_{n+1} + 2`. Its lower
//! half is false in general (`1/θ_n = [a_{n+1}; a_{n+2}, ...] + q_{n-1}/q_n`
//! can lie anywhere in `(a_{n+1}, a_{n+1} + 2)`), so those two lines report
//! FAIL with the violation count and do not change the exit status. The
//! provable bound is checked on its own line. Any other FAIL exits nonzero.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use cusp_core::{modular_cross_check, n_convergents, ExcursionSeries, HeightFloor, RealSpec};
use cusp_lab::config::{Command, ExperimentConfig};
use cusp_lab::experiment::{analyze, build_all, load_band, median, Check, Outcome};
use cusp_lab::output::write_outcome;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

const KNOWN_FAILURES: [&str; 2] = ["2", "11a"];

const SEED: u64 = 1;
const SAMPLES: usize = 100;
const DIGITS: usize = 3000;
const TERMS: usize = 2000;

struct Ledger {
    lines: Vec<(String, bool, String)>,
}

impl Ledger {
    fn record(&mut self, id: &str, pass: bool, detail: String) {
        println!(
            "{} {:>4}  {}",
            if pass { "PASS" } else { "FAIL" },
            id,
            detail
        );
        self.lines.push((id.to_string(), pass, detail));
    }

    fn checks(&mut self, id: &str, title: &str, checks: &[&Check]) {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        let detail = checks
            .iter()
            .map(|c| c.describe())
            .collect::<Vec<_>>()
            .join(" | ");
        self.record(id, pass, format!("{title}: {detail}"));
    }
}

fn config(command: Command) -> ExperimentConfig {
    let mut c = ExperimentConfig::defaults(command);
    c.seed = SEED;
    c.samples = SAMPLES;
    c.digits = DIGITS;
    c.terms = TERMS;
    c.jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    c
}

fn pick<'a>(out: &'a Outcome, names: &[&str]) -> Vec<&'a Check> {
    out.report
        .checks
        .iter()
        .filter(|c| names.contains(&c.name.as_str()))
        .collect()
}

/// `x` as an exact rational between the ends of its 3000-digit enclosure;
/// both ends are tested so every decision is certified.
fn ends(x: &RealSpec) -> [BigRational; 2] {
    let e = x.enclosure(0);
    [e.lo(), e.hi()]
}

fn theta_below_one(x: &BigRational, p: &BigInt, q: &BigInt) -> bool {
    let qx = x * BigRational::from_integer(q.clone());
    let d = (qx - BigRational::from_integer(p.clone())).abs();
    d * BigRational::from_integer(q.clone()) < BigRational::one()
}

/// Stern–Brocot search for every reduced `p/q ∈ [0, 1]`, `q <= qmax`, with
/// `q|qx - p| < 1`. A subtree between `l` and `r` only holds fractions with
/// denominator at least `q_l + q_r`; it is skipped when `x` is farther than
/// `1/(q_l + q_r)^2` from `[l, r]`.
fn stern_brocot(x: &BigRational, qmax: i64) -> BTreeSet<(i64, i64)> {
    let mut found = BTreeSet::new();
    for (p, q) in [(0i64, 1i64), (1, 1)] {
        if theta_below_one(x, &BigInt::from(p), &BigInt::from(q)) {
            found.insert((p, q));
        }
    }
    let mut stack = vec![((0i64, 1i64), (1i64, 1i64))];
    while let Some(((a, b), (c, d))) = stack.pop() {
        let (p, q) = (a + c, b + d);
        if q > qmax {
            continue;
        }
        let lo = BigRational::new(a.into(), b.into());
        let hi = BigRational::new(c.into(), d.into());
        let gap = if x < &lo {
            &lo - x
        } else if x > &hi {
            x - &hi
        } else {
            BigRational::zero()
        };
        if gap * BigRational::from_integer(BigInt::from(q * q)) >= BigRational::one() {
            continue;
        }
        if theta_below_one(x, &BigInt::from(p), &BigInt::from(q)) {
            found.insert((p, q));
        }
        stack.push(((a, b), (p, q)));
        stack.push(((p, q), (c, d)));
    }
    found
}

fn criterion_1(ledger: &mut Ledger, points: &[RealSpec]) {
    let qmax = 10_000i64;
    let mut discrepancies = 0;
    let mut total = 0;
    for x in points {
        let records = n_convergents(x, 40).expect("n-convergents");
        let engine: BTreeSet<(i64, i64)> = records
            .iter()
            .filter(|r| r.rational.q() <= &BigInt::from(qmax))
            .map(|r| {
                let p: i64 = r.rational.p().try_into().unwrap();
                let q: i64 = r.rational.q().try_into().unwrap();
                (p, q)
            })
            .collect();
        let [lo, hi] = ends(x);
        let oracle = stern_brocot(&lo, qmax);
        if oracle != stern_brocot(&hi, qmax) {
            discrepancies += 1;
            continue;
        }
        total += oracle.len();
        discrepancies += oracle.symmetric_difference(&engine).count();
    }
    ledger.record(
        "1",
        discrepancies == 0,
        format!(
            "n-convergents with q <= 10^4 vs Stern-Brocot scan: {discrepancies} discrepancies, {total} rationals over {} x",
            points.len()
        ),
    );
}

fn criterion_2(ledger: &mut Ledger, series: &[ExcursionSeries]) {
    let checked: usize = series.iter().map(|s| s.sandwich.len()).sum();
    let stated = series
        .iter()
        .flat_map(|s| &s.sandwich)
        .filter(|c| !c.holds())
        .count();
    let upper = series
        .iter()
        .flat_map(|s| &s.sandwich)
        .filter(|c| !c.upper)
        .count();
    let weak = series
        .iter()
        .flat_map(|s| &s.sandwich)
        .filter(|c| !c.weak_holds())
        .count();
    ledger.record(
        "2",
        stated == 0,
        format!(
            "a+1 < 1/theta_n < a+2: {stated} violations in {checked} indices (upper half: {upper})"
        ),
    );
    ledger.record(
        "2'",
        weak == 0,
        format!("a < 1/theta_n < a+2: {weak} violations in {checked} indices"),
    );
}

fn criterion_9(ledger: &mut Ledger) {
    let floor = HeightFloor::new(1e-6).unwrap();
    let mut failures = Vec::new();
    let mut zeros = 0;
    let mut matched = 0;
    for i in 0..20 {
        let x = RealSpec::random_sample(SEED, 10_000 + i, 200);
        let c = modular_cross_check(&x, floor, 1_000_000).expect("cross-check");
        zeros += c.leading_zero as usize;
        matched += c.gamma_count;
        if let Some(m) = c.mismatch {
            failures.push(format!("{x}: {m}"));
        }
    }
    ledger.record(
        "9",
        failures.is_empty(),
        format!(
            "modular Gamma-convergents vs convergents, 20 x at h = 1e-6: {matched} cusps, {zeros} leading 0/1, mismatches: {}",
            if failures.is_empty() { "none".into() } else { failures.join("; ") }
        ),
    );
}

fn criterion_10(ledger: &mut Ledger) {
    let mut cfg = ExperimentConfig::defaults(Command::Zonal);
    cfg.set_zonal_q(5);
    cfg.seed = SEED;
    cfg.jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    match cusp_lab::run(&cfg) {
        Ok(out) => {
            let min_n = out
                .report
                .samples
                .iter()
                .map(|s| s["gamma_convergents"].as_u64().unwrap())
                .min()
                .unwrap();
            let stderr = out.report.pooled["stderr"].as_f64().unwrap();
            let checks: Vec<&Check> = out.report.checks.iter().collect();
            let pass = checks.iter().all(|c| c.pass) && min_n >= 200;
            ledger.record(
                "10",
                pass,
                format!(
                    "q = 5, {} samples at h = {}, min {min_n} Gamma-convergents: {} (stderr {stderr:.4})",
                    cfg.samples,
                    cfg.hmin,
                    checks[0].describe()
                ),
            );
        }
        Err(e) => ledger.record("10", false, format!("hecke run failed: {e}")),
    }
}

fn criterion_11(ledger: &mut Ledger, series: &[ExcursionSeries]) {
    let stated = series
        .iter()
        .flat_map(|s| &s.sandwich)
        .filter(|c| !c.holds())
        .count();
    ledger.record(
        "11a",
        stated == 0,
        format!("sandwich bound of criterion 2 at every n: {stated} violations"),
    );
    let cfg = config(Command::Loglaw);
    let band = load_band(&cfg).expect("band file");
    let values: Vec<f64> = series
        .iter()
        .map(|s| cusp_core::loglaw_diagnostics(s).unwrap().max_ln_a_ratio)
        .collect();
    let med = median(&values);
    ledger.record(
        "11b",
        med >= band.q25 && med <= band.q75,
        format!(
            "median max ln a_n / ln n = {med:.6}, pilot band [{:.6}, {:.6}] (seed {}, {} samples)",
            band.q25, band.q75, band.seed, band.samples
        ),
    );
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_12(ledger: &mut Ledger) {
    let tmp = tempfile::tempdir().unwrap();
    let mut mismatched = Vec::new();
    let mut compared = 0;
    for command in [
        Command::Rates,
        Command::Stats,
        Command::Levy,
        Command::Zonal,
    ] {
        let mut runs = Vec::new();
        for jobs in [1, 3] {
            let mut cfg = ExperimentConfig::defaults(command);
            cfg.seed = 99;
            cfg.jobs = jobs;
            if command == Command::Zonal {
                cfg.samples = 4;
                cfg.hmin = "exp:-200".into();
                cfg.digits = 200;
                cfg.min_convergents = 10;
            } else {
                cfg.samples = 6;
                cfg.terms = 400;
                cfg.digits = 700;
            }
            cfg.out = tmp.path().join(format!("{command}-{jobs}"));
            let out = cusp_lab::run(&cfg).expect("determinism run");
            write_outcome(&cfg.out, &out).unwrap();
            runs.push(csv_files(&cfg.out));
        }
        compared += runs[0].len();
        if runs[0] != runs[1] {
            mismatched.push(command.to_string());
        }
    }
    ledger.record(
        "12",
        mismatched.is_empty() && compared > 0,
        format!(
            "CSV bytes with --jobs 1 vs 3: {compared} files compared, differing commands: {}",
            if mismatched.is_empty() {
                "none".into()
            } else {
                mismatched.join(", ")
            }
        ),
    );
}

fn main() {
    // `cargo test` passes harness flags such as `--quiet`; a name filter
    // that does not mention acceptance skips the run.
    let args: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let start = Instant::now();
    let mut ledger = Ledger { lines: Vec::new() };

    let base = config(Command::Rates);
    let points = base.points();
    criterion_1(&mut ledger, &points);

    let series = build_all(&base).expect("series");
    println!(
        "     built {} series of {TERMS} terms in {:.1?}",
        series.len(),
        start.elapsed()
    );
    criterion_2(&mut ledger, &series);

    let levy = analyze(&config(Command::Levy), &series).expect("levy");
    ledger.checks(
        "3",
        "Levy limits",
        &pick(
            &levy,
            &[
                "levy convergents",
                "levy n-convergents",
                "levy per-sample agreement",
            ],
        ),
    );

    let rates = analyze(&config(Command::Rates), &series).expect("rates");
    ledger.checks(
        "4",
        "counting rates",
        &rates.report.checks.iter().collect::<Vec<_>>(),
    );

    let mut stats_cfg = config(Command::Stats);
    stats_cfg.k = vec![0.5, 1.0, 2.0];
    let stats = analyze(&stats_cfg, &series).expect("stats");
    ledger.checks(
        "5",
        "mean gaps",
        &pick(
            &stats,
            &[
                "mean gap all k=1",
                "mean gap approximating k=1",
                "mean gap all k=2",
                "mean gap approximating k=2",
            ],
        ),
    );
    ledger.checks(
        "6",
        "excursion length",
        &pick(&stats, &["mean chord k=0.5", "mean chord k=1"]),
    );
    ledger.checks(
        "7",
        "theta and depth means",
        &pick(
            &stats,
            &[
                "mean theta all",
                "mean theta approximating",
                "mean ln theta all",
                "mean ln theta approximating",
                "mean depth all",
                "mean depth approximating",
                "mean ln depth all",
                "mean ln depth approximating",
            ],
        ),
    );
    ledger.checks(
        "8",
        "depth distribution",
        &pick(
            &stats,
            &["depth cdf sup-norm all", "depth cdf sup-norm approximating"],
        ),
    );

    criterion_9(&mut ledger);
    criterion_10(&mut ledger);
    criterion_11(&mut ledger, &series);
    criterion_12(&mut ledger);

    let failed: Vec<&str> = ledger
        .lines
        .iter()
        .filter(|(_, pass, _)| !pass)
        .map(|(id, _, _)| id.as_str())
        .collect();
    let unexpected: Vec<&str> = failed
        .iter()
        .copied()
        .filter(|id| !KNOWN_FAILURES.contains(id))
        .collect();
    println!(
        "acceptance: {} lines, {} failed ({} known), {:.1?}",
        ledger.lines.len(),
        failed.len(),
        failed.len() - unexpected.len(),
        start.elapsed()
    );
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
