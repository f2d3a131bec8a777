//! Continued fractions: exact digit extraction, convergents, synthetic digit
//! streams, and the fast run-of-ones penetration dictionary.
//!
//! A run of k consecutive partial quotients equal to 1, starting right after
//! the convergent denominator q, corresponds to a single excursion of the
//! based geodesic near the axis of [[2, 1], [1, 1]]: it begins at time
//! ≈ 2·ln q and lasts ≈ 2k·ln φ. `cf_fast_penetrations` reads that dictionary
//! off a digit string without any hyperbolic geometry.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::{Error, Result};
use crate::groups::QuadraticIrrational;
use crate::lab::report::{ExperimentReport, SampleTrace, Verdict};
use crate::lab::sample::sample_stream;
use crate::parallel;

/// Hard cap on requested digits; O(n) work and memory per sample.
pub const CF_MAX_DIGITS: usize = 10_000_000;

/// ln φ = ln((1 + √5)/2), the half-speed of the golden excursion clock.
pub const GOLDEN_LOG: f64 = 0.4812118250596035;

/// Synthetic digit streams re-anchor their floating remainder to an exact
/// conditional draw every this many digits.
pub const RANDOM_REFRESH_BLOCK: usize = 50;

/// A point of (0, 1) whose continued fraction we expand.
///
/// `Real` carries the exact dyadic rational the float denotes, so digits are
/// exact until the expansion terminates. `Quadratic` expands forever.
#[derive(Clone, Debug)]
pub enum CfInput {
    Real(f64),
    Quadratic(QuadraticIrrational),
}

impl CfInput {
    fn validate(&self) -> Result<()> {
        match self {
            CfInput::Real(x) => {
                if !x.is_finite() || *x <= 0.0 || *x >= 1.0 {
                    return Err(Error::InvalidConfig(format!(
                        "continued-fraction input must lie in the open interval (0, 1), got {x}"
                    )));
                }
            }
            CfInput::Quadratic(q) => {
                let v = q.value();
                if !(0.0 < v && v < 1.0) || !q.floor().is_zero() {
                    return Err(Error::InvalidConfig(format!(
                        "continued-fraction input must lie in the open interval (0, 1), got {q}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn validate_digit_request(n: usize) -> Result<()> {
    if n == 0 || n > CF_MAX_DIGITS {
        return Err(Error::InvalidConfig(format!(
            "digit count must be between 1 and {CF_MAX_DIGITS}, got {n}"
        )));
    }
    Ok(())
}

/// The exact fraction num/den (in lowest terms, both positive) denoted by a
/// float in (0, 1).
pub(crate) fn f64_to_exact_fraction(x: f64) -> (BigUint, BigUint) {
    debug_assert!(0.0 < x && x < 1.0);
    let bits = x.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    // Normal: (2^52 + frac)·2^(exp−1075). Subnormal: frac·2^(−1074).
    let (mut num, mut shift) = if exp_field == 0 {
        (frac, 1074i64)
    } else {
        ((1u64 << 52) | frac, 1075 - exp_field)
    };
    debug_assert!(shift > 0 && num > 0);
    let twos = num.trailing_zeros() as i64;
    let twos = twos.min(shift);
    num >>= twos;
    shift -= twos;
    (BigUint::from(num), BigUint::from(1u8) << shift as usize)
}

/// Digits of num/den ∈ (0, 1) by exact Euclidean division, at most `n` of
/// them. Returns the digits and whether the expansion terminated early.
fn rational_digits(mut num: BigUint, mut den: BigUint, n: usize) -> Result<(Vec<u64>, bool)> {
    let mut out = Vec::new();
    while out.len() < n {
        if num.is_zero() {
            return Ok((out, true));
        }
        let (digit, rem) = num_integer::Integer::div_rem(&den, &num);
        let d = digit.to_u64().ok_or_else(|| {
            Error::InvalidConfig(format!("continued-fraction digit {digit} exceeds u64"))
        })?;
        out.push(d);
        den = num;
        num = rem;
    }
    Ok((out, false))
}

fn quadratic_digits(q: &QuadraticIrrational, n: usize) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(n);
    // Consume a₀ = 0 so the returned digits are a₁, a₂, …
    let (_, mut state) = q.cf_step();
    for _ in 0..n {
        let (digit, next) = state.cf_step();
        let d = digit.to_u64().ok_or_else(|| {
            Error::InvalidConfig(format!("continued-fraction digit {digit} exceeds u64"))
        })?;
        out.push(d);
        state = next;
    }
    Ok(out)
}

/// First `n` partial quotients a₁, a₂, … of x = [0; a₁, a₂, …] ∈ (0, 1).
///
/// Digits are exact: the real path runs Euclid's algorithm on the dyadic
/// rational the float denotes, the quadratic path iterates the exact
/// (P, Q)-state step. A real input whose expansion terminates before `n`
/// digits fails with `PrecisionExhausted` carrying the count produced.
pub fn cf_digits(x: &CfInput, n: usize) -> Result<Vec<u64>> {
    x.validate()?;
    validate_digit_request(n)?;
    match x {
        CfInput::Real(v) => {
            let (num, den) = f64_to_exact_fraction(*v);
            let (digits, exhausted) = rational_digits(num, den, n)?;
            if exhausted && digits.len() < n {
                return Err(Error::PrecisionExhausted { digits: digits.len() });
            }
            Ok(digits)
        }
        CfInput::Quadratic(q) => quadratic_digits(q, n),
    }
}

/// Like `cf_digits` but a terminating real expansion returns what exists
/// instead of erroring; used where coverage is checked in time units.
pub(crate) fn cf_digits_lossy(x: &CfInput, n: usize) -> Result<Vec<u64>> {
    x.validate()?;
    validate_digit_request(n)?;
    match x {
        CfInput::Real(v) => {
            let (num, den) = f64_to_exact_fraction(*v);
            Ok(rational_digits(num, den, n)?.0)
        }
        CfInput::Quadratic(q) => quadratic_digits(q, n),
    }
}

/// Convergents pₖ/qₖ of [0; a₁, a₂, …], one per digit, exact.
pub fn convergents(digits: &[u64]) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::with_capacity(digits.len());
    let (mut p_prev, mut q_prev) = (BigInt::from(1), BigInt::from(0));
    let (mut p_cur, mut q_cur) = (BigInt::from(0), BigInt::from(1));
    for &a in digits {
        let p_next = BigInt::from(a) * &p_cur + &p_prev;
        let q_next = BigInt::from(a) * &q_cur + &q_prev;
        out.push((p_next.clone(), q_next.clone()));
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
    }
    out
}

/// Length of the longest run of consecutive digits equal to 1.
pub fn longest_one_run(digits: &[u64]) -> usize {
    let mut best = 0usize;
    let mut cur = 0usize;
    for &d in digits {
        if d == 1 {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

/// `n` partial quotients of a Gauss-distributed random point, deterministic in
/// (seed, index) and prefix-stable in `n`.
///
/// The digit loop iterates the Gauss map in floating point, which loses about
/// a bit of significance per digit; every `RANDOM_REFRESH_BLOCK` digits the
/// remainder is redrawn from its exact conditional law given the digits
/// emitted so far. Given convergent denominators q with θ = q_prev/q_cur, the
/// remainder density is (1+θ)/(1+θy)² on (0, 1), sampled by inverting its CDF
/// at a fresh uniform: y = u / (1 + θ(1 − u)). θ itself updates exactly by
/// θ ← 1/(a + θ), so the distribution of every block boundary is exact and
/// digit errors cannot accumulate across blocks.
pub fn cf_random_digits(seed: u64, index: u64, n: usize) -> Vec<u64> {
    let mut rng = sample_stream(seed, index);
    let mut theta = 0.0f64; // q₋₁/q₀ = 0/1
    let mut y = f64::NAN; // forces a draw on the first digit
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if out.len() % RANDOM_REFRESH_BLOCK == 0 || !(y > 0.0 && y < 1.0) {
            let u: f64 = rng.gen();
            y = u / (1.0 + theta * (1.0 - u));
            if !(y > 0.0 && y < 1.0) {
                continue;
            }
        }
        let inv = 1.0 / y;
        if !(inv >= 1.0 && inv < 9.0e15) {
            y = f64::NAN; // astronomically rare; redraw the remainder
            continue;
        }
        let a = inv.floor();
        out.push(a as u64);
        y = inv - a;
        theta = 1.0 / (a + theta);
    }
    out
}

/// One excursion read off the digit string: the maximal run of 1's starting
/// at `digit_index` (1-based), entered at geodesic time `time` ≈ 2·ln q and
/// lasting `duration` = 2·run_length·ln φ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfPenetration {
    pub digit_index: usize,
    pub time: f64,
    pub duration: f64,
    pub run_length: usize,
}

/// All maximal runs of 1's in the digit string, as excursions.
///
/// Continuant logarithms ln qₖ are carried directly (never qₖ itself), via
/// ln qₖ = ln qₖ₋₁ + ln(aₖ + exp(ln qₖ₋₂ − ln qₖ₋₁)), so arbitrarily long
/// strings cannot overflow. A run cut off by the end of the digit budget is
/// still reported; callers that care must check coverage past their horizon.
pub fn cf_fast_penetrations(digits: &[u64]) -> Vec<CfPenetration> {
    let mut out = Vec::new();
    let mut lq_prev = f64::NEG_INFINITY; // ln q₋₁, q₋₁ = 0
    let mut lq_cur = 0.0f64; // ln q₀, q₀ = 1
    let mut run_start: Option<(usize, f64)> = None;
    for (i, &a) in digits.iter().enumerate() {
        if a == 1 {
            if run_start.is_none() {
                run_start = Some((i + 1, 2.0 * lq_cur));
            }
        } else if let Some((start, time)) = run_start.take() {
            let len = i + 1 - start;
            out.push(CfPenetration {
                digit_index: start,
                time,
                duration: 2.0 * len as f64 * GOLDEN_LOG,
                run_length: len,
            });
        }
        let lq_next = lq_cur + (a as f64 + (lq_prev - lq_cur).exp()).ln();
        lq_prev = lq_cur;
        lq_cur = lq_next;
    }
    if let Some((start, time)) = run_start.take() {
        let len = digits.len() + 1 - start;
        out.push(CfPenetration {
            digit_index: start,
            time,
            duration: 2.0 * len as f64 * GOLDEN_LOG,
            run_length: len,
        });
    }
    out
}

/// Geodesic time 2·ln qₙ covered by a digit string, via the same
/// overflow-free continuant-log recurrence as [`cf_fast_penetrations`].
pub(crate) fn digit_time_horizon(digits: &[u64]) -> f64 {
    let mut lq_prev = f64::NEG_INFINITY;
    let mut lq_cur = 0.0f64;
    for &a in digits {
        let lq_next = lq_cur + (a as f64 + (lq_prev - lq_cur).exp()).ln();
        lq_prev = lq_cur;
        lq_cur = lq_next;
    }
    2.0 * lq_cur
}

/// Growth of the longest 1-run against its extremal prediction.
///
/// For each sample stream the statistic R(n)·2·ln φ / ln n is recorded at
/// every digit count in `digit_grid`; the run-length law makes it tend to 1.
/// Verdict `Consistent` requires every grid median inside `band` and the
/// final median at least as close to 1 as the first (small slack), otherwise
/// `Inconclusive`.
pub fn cf_run_experiment(
    n_samples: usize,
    digit_grid: &[usize],
    seed: u64,
    band: (f64, f64),
) -> Result<ExperimentReport> {
    if digit_grid.is_empty()
        || digit_grid.windows(2).any(|w| w[0] >= w[1])
        || *digit_grid.first().unwrap() < 2
        || *digit_grid.last().unwrap() > CF_MAX_DIGITS
    {
        return Err(Error::InvalidConfig(
            "digit grid must be strictly increasing within [2, max digits]".into(),
        ));
    }
    if !(band.0.is_finite() && band.1.is_finite() && band.0 < band.1) {
        return Err(Error::InvalidConfig("run-statistic band must be a finite interval".into()));
    }
    const TREND_SLACK: f64 = 0.02;
    let mut report = ExperimentReport::new("cf-runs");
    report.setting("n_samples", n_samples);
    report.setting("seed", seed);
    report.setting(
        "digit_grid",
        digit_grid.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
    );
    report.threshold("band_lo", band.0);
    report.threshold("band_hi", band.1);
    report.threshold("trend_slack", TREND_SLACK);
    report.grid = digit_grid.iter().map(|&n| n as f64).collect();
    if n_samples == 0 {
        return Ok(report);
    }
    let max_n = *digit_grid.last().unwrap();
    let grid: Vec<usize> = digit_grid.to_vec();
    report.per_sample = parallel::map_range(n_samples, move |j| {
        let digits = cf_random_digits(seed, j as u64, max_n);
        let mut values = Vec::with_capacity(grid.len());
        let mut best = 0usize;
        let mut cur = 0usize;
        let mut next_grid = 0usize;
        for (i, &d) in digits.iter().enumerate() {
            if d == 1 {
                cur += 1;
                best = best.max(cur);
            } else {
                cur = 0;
            }
            while next_grid < grid.len() && i + 1 == grid[next_grid] {
                values.push(best as f64 * 2.0 * GOLDEN_LOG / (grid[next_grid] as f64).ln());
                next_grid += 1;
            }
        }
        SampleTrace { index: j, values }
    });
    report.summarize();
    let medians = report.medians();
    let in_band = medians.iter().all(|&m| band.0 <= m && m <= band.1);
    let toward_one = (medians[medians.len() - 1] - 1.0).abs() <= (medians[0] - 1.0).abs() + TREND_SLACK;
    report.verdict =
        Some(if in_band && toward_one { Verdict::Consistent } else { Verdict::Inconclusive });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::Sign;

    fn golden_minus_one() -> QuadraticIrrational {
        QuadraticIrrational::new(-1, 2, 5).unwrap()
    }

    fn sqrt2_minus_one() -> QuadraticIrrational {
        QuadraticIrrational::new(-1, 1, 2).unwrap()
    }

    #[test]
    fn golden_digits_are_all_ones_and_sqrt2_digits_all_twos() {
        let ones = cf_digits(&CfInput::Quadratic(golden_minus_one()), 2000).unwrap();
        assert_eq!(ones.len(), 2000);
        assert!(ones.iter().all(|&d| d == 1));

        let twos = cf_digits(&CfInput::Quadratic(sqrt2_minus_one()), 500).unwrap();
        assert!(twos.iter().all(|&d| d == 2));
        assert!(cf_fast_penetrations(&twos).is_empty());
    }

    #[test]
    fn dyadic_rational_terminates_with_exact_digits() {
        // 0.375 = 3/8 = [0; 2, 1, 2].
        let x = CfInput::Real(0.375);
        assert_eq!(cf_digits(&x, 3).unwrap(), vec![2, 1, 2]);
        assert_eq!(cf_digits(&x, 2).unwrap(), vec![2, 1]);
        match cf_digits(&x, 4) {
            Err(Error::PrecisionExhausted { digits }) => assert_eq!(digits, 3),
            other => panic!("expected precision exhaustion, got {other:?}"),
        }
        assert_eq!(cf_digits_lossy(&x, 4).unwrap(), vec![2, 1, 2]);
    }

    #[test]
    fn convergents_satisfy_the_quadratic_approximation_bound() {
        // |x − p/q| ≤ 1/q² cross-multiplied into exact integers:
        // |x_num·q − p·x_den| · q ≤ x_den.
        let mut rng = sample_stream(31, 0);
        for _ in 0..25 {
            let x: f64 = rng.gen_range(1e-6..1.0);
            let digits = cf_digits_lossy(&CfInput::Real(x), 30).unwrap();
            assert!(!digits.is_empty());
            let (num, den) = f64_to_exact_fraction(x);
            let num = BigInt::from_biguint(Sign::Plus, num);
            let den = BigInt::from_biguint(Sign::Plus, den);
            for (p, q) in convergents(&digits) {
                let err = (&num * &q - &p * &den).magnitude().clone();
                assert!(
                    BigInt::from_biguint(Sign::Plus, err * q.magnitude()) <= den,
                    "convergent bound violated at x = {x}"
                );
            }
        }
    }

    #[test]
    fn random_digit_streams_are_deterministic_and_prefix_stable() {
        let a = cf_random_digits(7, 3, 400);
        let b = cf_random_digits(7, 3, 400);
        assert_eq!(a, b);
        let long = cf_random_digits(7, 3, 1200);
        assert_eq!(&long[..400], &a[..]);
        let other_stream = cf_random_digits(7, 4, 400);
        assert_ne!(a, other_stream);
    }

    #[test]
    fn random_digit_frequencies_match_the_gauss_measure() {
        // P(a = k) = log₂(1 + 1/(k(k+2))): P(1) ≈ 0.4150, P(2) ≈ 0.1699.
        let digits = cf_random_digits(11, 0, 200_000);
        let freq = |k: u64| digits.iter().filter(|&&d| d == k).count() as f64 / digits.len() as f64;
        let f1 = freq(1);
        let f2 = freq(2);
        assert!((0.38..0.45).contains(&f1), "P(1) estimate {f1} off");
        assert!((0.14..0.20).contains(&f2), "P(2) estimate {f2} off");
    }

    #[test]
    fn handcrafted_digit_string_yields_the_expected_runs() {
        // [0; 2, 1, 1, 1, 3, 1, 2]: continuants q = 2, 3, 5, 8, 29, 37, 103.
        let digits = [2u64, 1, 1, 1, 3, 1, 2];
        let conv = convergents(&digits);
        assert_eq!(conv[4].1, BigInt::from(29));
        assert_eq!(conv[6].1, BigInt::from(103));

        let runs = cf_fast_penetrations(&digits);
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0].digit_index, 2);
        assert_eq!(runs[0].run_length, 3);
        assert!((runs[0].time - 2.0 * 2.0f64.ln()).abs() < 1e-9);
        assert!((runs[0].duration - 6.0 * GOLDEN_LOG).abs() < 1e-12);
        assert_eq!(runs[1].digit_index, 6);
        assert_eq!(runs[1].run_length, 1);
        assert!((runs[1].time - 2.0 * 29.0f64.ln()).abs() < 1e-9);
        assert_eq!(longest_one_run(&digits), 3);
    }

    #[test]
    fn log_continuants_survive_very_long_strings() {
        let n = 100_000usize;
        let digits = vec![1u64; n];
        let runs = cf_fast_penetrations(&digits);
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].digit_index, 1);
        assert_eq!(runs[0].run_length, n);
        assert_eq!(runs[0].time, 0.0); // q₀ = 1: the run starts at the base
        let expected = 2.0 * n as f64 * GOLDEN_LOG;
        assert!((runs[0].duration - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn log_continuant_matches_exact_continuant_on_a_random_string() {
        let digits = cf_random_digits(5, 9, 120);
        // Recover ln q at each run start from exact convergents.
        let conv = convergents(&digits);
        for run in cf_fast_penetrations(&digits) {
            let expected = if run.digit_index == 1 {
                0.0
            } else {
                let q = &conv[run.digit_index - 2].1;
                2.0 * q.to_f64().unwrap().ln()
            };
            assert!(
                (run.time - expected).abs() < 1e-6 * (1.0 + expected.abs()),
                "time {} vs exact {expected}",
                run.time
            );
        }
    }

    #[test]
    fn inputs_outside_the_open_unit_interval_are_rejected() {
        for bad in [0.0, 1.0, -0.25, 1.5, f64::NAN] {
            assert!(cf_digits(&CfInput::Real(bad), 5).is_err());
        }
        let golden = QuadraticIrrational::new(1, 2, 5).unwrap(); // φ ≈ 1.618
        assert!(cf_digits(&CfInput::Quadratic(golden), 5).is_err());
        let ok = CfInput::Real(0.5);
        assert!(cf_digits(&ok, 0).is_err());
        assert!(cf_digits(&ok, CF_MAX_DIGITS + 1).is_err());
    }

    #[test]
    fn run_experiment_reports_are_reproducible() {
        let grid = [200usize, 500];
        let a = cf_run_experiment(8, &grid, 3, (0.2, 2.5)).unwrap();
        let b = cf_run_experiment(8, &grid, 3, (0.2, 2.5)).unwrap();
        assert_eq!(a.to_json_bytes().unwrap(), b.to_json_bytes().unwrap());
        assert_eq!(a.per_sample.len(), 8);
        assert!(a.verdict.is_some());
        // Statistic at each grid point matches the direct computation.
        for trace in &a.per_sample {
            let digits = cf_random_digits(3, trace.index as u64, 500);
            for (k, &n) in grid.iter().enumerate() {
                let direct =
                    longest_one_run(&digits[..n]) as f64 * 2.0 * GOLDEN_LOG / (n as f64).ln();
                assert_eq!(trace.values[k], direct);
            }
        }
        let empty = cf_run_experiment(0, &grid, 3, (0.2, 2.5)).unwrap();
        assert!(empty.verdict.is_none());
        assert!(empty.per_sample.is_empty());
    }

    /// Calibration run for the run-statistic band at production digit
    /// counts. `cargo test -p spiralis --release -- --ignored pilot_run --nocapture`.
    #[test]
    #[ignore]
    fn pilot_run_statistic_band() {
        let grid = [10_000, 100_000, 1_000_000];
        let report = cf_run_experiment(200, &grid, 0, (0.5, 1.5)).unwrap();
        for row in &report.quantiles {
            println!(
                "n = {:>9}: q05 {:.4}  median {:.4}  q95 {:.4}",
                row.at, row.q05, row.q50, row.q95
            );
        }
        println!("verdict: {:?}", report.verdict);
    }
}
