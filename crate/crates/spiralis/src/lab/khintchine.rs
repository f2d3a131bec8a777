//! Shrinking-target approximation statistics over quadratic-irrational
//! orbits, and the two-branch dichotomy experiment built on them.
//!
//! The per-point statistic is `h(r)·|x − r| / φ(h(r))`; the experiment
//! tracks its minimum over orbit slices of growing complexity `ln h ≤ H` and
//! classifies the median trajectory as divergent-consistent (the minimum
//! keeps falling), convergent-consistent (it stabilizes), or inconclusive.

use crate::groups::{
    orbit_quadratic_irrationals, EnumerationBudget, GroupSpec, IntMatrix, OrbitPoint,
};
use crate::lab::rate::RateFunction;
use crate::lab::report::{ExperimentReport, SampleTrace, Verdict};
use crate::thermo::Potential;
use crate::{parallel, Error, Result};

/// Pre-registered verdict thresholds (echoed into every report): the median
/// minimum must fall by at least this factor across the schedule to count as
/// divergent-consistent…
pub const KHINTCHINE_DIVERGENT_DROP: f64 = 5.0;
/// …and must retain at least this fraction of its initial value to count as
/// convergent-consistent.
pub const KHINTCHINE_CONVERGENT_FLOOR: f64 = 0.5;

/// `min { h(r)·|x − r| / φ(h(r)) : ln h(r) ≤ h_complexity }` over the given
/// orbit points.
///
/// `points` must be sorted by increasing height (the order
/// [`crate::groups::QuadraticOrbit`] produces) and complete up to the
/// requested complexity; the slice with `ln h ≤ h_complexity` must be
/// nonempty.
pub fn khintchine_statistic(
    x: f64,
    points: &[OrbitPoint],
    phi: &RateFunction,
    h_complexity: f64,
) -> Result<f64> {
    if !x.is_finite() || !h_complexity.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "statistic needs finite inputs, got x = {x}, H = {h_complexity}"
        )));
    }
    let h_cap = h_complexity.exp();
    let end = points.partition_point(|pt| pt.height <= h_cap);
    if end == 0 {
        return Err(Error::EmptyOrbitSlice { radius: h_complexity });
    }
    debug_assert!(points.windows(2).all(|w| w[0].height <= w[1].height));
    let mut best = f64::INFINITY;
    for pt in &points[..end] {
        let candidate = pt.height * (x - pt.value).abs() / phi.value(pt.height);
        if candidate < best {
            best = candidate;
        }
    }
    Ok(best)
}

/// Experiment configuration beyond the group/element/rate/potential inputs.
#[derive(Clone, Debug)]
pub struct KhintchineSettings {
    pub n_samples: usize,
    /// Increasing complexity cutoffs `H`; orbit slices are `ln h ≤ H`.
    pub h_schedule: Vec<f64>,
    pub seed: u64,
    /// Extra ball radius beyond `ln(2·e^{H_max})` used when enumerating the
    /// orbit; absorbs the bounded offset between axis distance and element
    /// displacement.
    pub orbit_margin: f64,
    /// Sample points are drawn from this boundary window, and the orbit
    /// window extends `orbit_guard` beyond it on each side. For the default
    /// guard, any orbit point outside the widened window scores strictly
    /// worse than the best interior point at every cutoff (the per-point
    /// statistic grows with both `|x − r|` and `h/φ(h)`), so the truncation
    /// never changes the minimum.
    pub sample_window: (f64, f64),
    pub orbit_guard: f64,
    /// Truncation radius of the empirical boundary measure used for
    /// non-constant potentials.
    pub patterson_radius: f64,
    pub budget: EnumerationBudget,
}

impl Default for KhintchineSettings {
    fn default() -> Self {
        Self {
            n_samples: 200,
            h_schedule: vec![6.0, 8.0, 10.0, 12.0],
            seed: 0,
            orbit_margin: 4.0,
            sample_window: (0.0, 1.0),
            orbit_guard: 1.2,
            patterson_radius: 10.0,
            // The default complexity schedule needs an orbit ball of radius
            // H_max + margin = 16, beyond the conservative group-level cap.
            budget: EnumerationBudget { radius_cap: 20.0, element_cap: 400_000_000 },
        }
    }
}

/// Runs the dichotomy experiment: samples boundary points, evaluates the
/// minimum statistic along the complexity schedule for each, and issues a
/// verdict on the median trajectory with the pre-registered thresholds.
///
/// Constant potentials sample from Lebesgue measure on the window (their
/// boundary measure class is Lebesgue); other potentials build an empirical
/// boundary measure and sample its atoms, conditioned on the window.
pub fn khintchine_experiment(
    spec: &GroupSpec,
    gamma0: &IntMatrix,
    phi: &RateFunction,
    potential: &Potential,
    settings: &KhintchineSettings,
) -> Result<ExperimentReport> {
    if !phi.is_admissible() {
        return Err(Error::InvalidConfig(format!(
            "rate function {} fails the doubling admissibility check",
            phi.label()
        )));
    }
    let schedule = &settings.h_schedule;
    if schedule.is_empty() {
        return Err(Error::InvalidConfig("complexity schedule must be nonempty".into()));
    }
    if schedule.windows(2).any(|w| !(w[1] > w[0])) || !schedule[0].is_finite() {
        return Err(Error::InvalidConfig(format!(
            "complexity schedule must be finite and strictly increasing, got {schedule:?}"
        )));
    }
    let (wa, wb) = settings.sample_window;
    if !(wa.is_finite() && wb.is_finite() && wa < wb) {
        return Err(Error::InvalidConfig(format!(
            "sample window must be a finite nonempty interval, got ({wa}, {wb})"
        )));
    }

    let mut report = ExperimentReport::new("khintchine");
    report
        .setting("group", spec.label())
        .setting("gamma0", gamma0)
        .setting("rate", phi.label())
        .setting("potential", potential.label())
        .setting("seed", settings.seed)
        .setting("n_samples", settings.n_samples)
        .setting("h_schedule", format!("{schedule:?}"))
        .setting("orbit_margin", settings.orbit_margin)
        .setting("sample_window", format!("({wa}, {wb})"))
        .setting("orbit_guard", settings.orbit_guard);
    report.threshold("divergent_drop", KHINTCHINE_DIVERGENT_DROP);
    report.threshold("convergent_floor", KHINTCHINE_CONVERGENT_FLOOR);
    report.grid = schedule.clone();
    if settings.n_samples == 0 {
        return Ok(report);
    }

    // Orbit slice complete up to the last cutoff, over the guarded window.
    let h_max = *schedule.last().expect("schedule is nonempty");
    let gap_min = 2.0 * (-h_max).exp();
    let orbit = orbit_quadratic_irrationals(
        spec,
        gamma0,
        (wa - settings.orbit_guard, wb + settings.orbit_guard),
        gap_min,
        settings.orbit_margin,
        &settings.budget,
    )?;
    report.setting("orbit_radius", orbit.radius).setting("orbit_points", orbit.len());
    let points = &orbit.points;
    let slice_ends: Vec<usize> = schedule
        .iter()
        .map(|h| points.partition_point(|pt| pt.height <= h.exp()))
        .collect();
    if slice_ends[0] == 0 {
        return Err(Error::EmptyOrbitSlice { radius: schedule[0] });
    }
    // φ(h) per orbit point, shared across samples.
    let phi_at: Vec<f64> = points.iter().map(|pt| phi.value(pt.height)).collect();

    let (xs, sampling) = crate::lab::sample::draw_window_abscissae(
        spec,
        potential,
        settings.sample_window,
        settings.n_samples,
        settings.seed,
        settings.patterson_radius,
        &settings.budget,
    )?;
    report.setting("sampling", sampling);

    let traces: Vec<Vec<f64>> = parallel::map_range(settings.n_samples, |j| {
        let x = xs[j];
        let mut values = Vec::with_capacity(slice_ends.len());
        let mut best = f64::INFINITY;
        let mut next = 0;
        for (&end, _) in slice_ends.iter().zip(schedule) {
            while next < end {
                let pt = &points[next];
                let candidate = pt.height * (x - pt.value).abs() / phi_at[next];
                if candidate < best {
                    best = candidate;
                }
                next += 1;
            }
            values.push(best);
        }
        values
    });
    report.per_sample =
        traces.into_iter().enumerate().map(|(index, values)| SampleTrace { index, values }).collect();
    report.summarize();

    let medians = report.medians();
    let first = medians[0];
    let last = *medians.last().expect("schedule is nonempty");
    report.verdict = Some(if first / last >= KHINTCHINE_DIVERGENT_DROP {
        Verdict::DivergentConsistent
    } else if last / first >= KHINTCHINE_CONVERGENT_FLOOR {
        Verdict::ConvergentConsistent
    } else {
        Verdict::Inconclusive
    });
    Ok(report)
}
