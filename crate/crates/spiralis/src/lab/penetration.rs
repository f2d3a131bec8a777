//! Tube-penetration profiles of boundary rays against the lift system of a
//! closed geodesic, and the excursion log-law experiment with its
//! continued-fraction fast path.
//!
//! The geometric path enumerates, for one ray at a time, the finitely many
//! lifts `g·axis(γ₀)` whose `ε₀`-tube the ray segment `[x₀, ξ)|_{t ≤ t_max}`
//! can reach, then resolves each entry/exit pair with the generic geodesic
//! routines. Storing the full conjugate orbit up to the enumeration radius
//! would take `O(e^radius)` memory, so instead each candidate is filtered on
//! the fly against the ray and only the handful of survivors is kept.

use crate::geometry::{
    entry_exit, ray_frame, vertical_tube_window, Boundary, GeodesicLine, HPoint,
};
use crate::groups::{
    ball_entry_bound, isqrt, predicted_ball_count, visit_column_slice, EnumerationBudget,
    GroupSpec, IntMatrix,
};
use crate::lab::cf::{cf_digits_lossy, cf_fast_penetrations, digit_time_horizon, CfInput};
use crate::lab::report::{ExperimentReport, SampleTrace, Verdict};
use crate::lab::sample::draw_window_abscissae;
use crate::thermo::Potential;
use crate::{parallel, Error, Result, GEOM_TOL};

/// Accepted band for the top-grid median of `p_max(t)/ln t` relative to its
/// limit `1/(δ̂ − δ̂₀)` in the log-law experiment.
pub const LOGLAW_BAND: (f64, f64) = (0.6, 1.5);

/// The top-grid median must be at least this close (relative to the target)
/// to the limit compared with the bottom-grid median.
const LOGLAW_TREND_SLACK: f64 = 0.05;

/// Extra tube radius used only by the candidate prefilter, so float rounding
/// in boundary images can never drop a genuine borderline event.
const EPS_PAD: f64 = 0.05;

/// Extra time (both before `t = 0` and past `t_max`) admitted by the
/// candidate prefilter, for the same reason.
const TIME_PAD: f64 = 0.3;

/// A boundary image this large means the candidate axis nearly shares an
/// endpoint with the ray and must be double-checked for degeneracy.
const DEGENERATE_IMAGE: f64 = 1e9;

/// One maximal excursion of a ray into the `ε₀`-tube of a lift axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenetrationEvent {
    /// Arclength from `x₀` at which the ray enters the tube.
    pub t_in: f64,
    /// Arclength at which it leaves again; always `> t_in`.
    pub t_out: f64,
    /// Index into the enumerated lift list ([`AxisLifts::lines`]).
    pub lift_id: usize,
}

impl PenetrationEvent {
    /// Length of the excursion.
    pub fn duration(&self) -> f64 {
        self.t_out - self.t_in
    }
}

/// Exact unoriented identity of one lift class: the lexicographically
/// smaller of the canonical entry tuples of a conjugate and its inverse.
type LiftKey = (i64, i64, i64, i64);

struct Candidate {
    key: LiftKey,
    rep: IntMatrix,
    degenerate: bool,
}

/// The lifts `g·axis(γ₀)` reachable by one fixed ray, enumerated once and
/// reusable for every tube radius `≤` and horizon `≤` the filter values it
/// was built with.
#[derive(Clone, Debug)]
pub struct AxisLifts {
    x0: HPoint,
    xi: Boundary,
    /// One conjugate of `γ₀` (or its inverse) per unoriented lift axis,
    /// canonical and lexicographically minimal, sorted by displacement.
    pub reps: Vec<IntMatrix>,
    /// `reps[k]`'s axis; [`PenetrationEvent::lift_id`] indexes this list.
    pub lines: Vec<GeodesicLine>,
    /// Ball radius that was swept; certifies completeness of [`Self::events`].
    pub radius: f64,
    eps_filter: f64,
    t_filter: f64,
}

impl AxisLifts {
    /// Sweeps the ball of radius `t_max + margin` in `spec`, keeping every
    /// lift of `axis(γ₀)` whose `(eps0 + pad)`-tube the ray `[x0, xi)` can
    /// touch before `t_max + pad`.
    ///
    /// A lift whose axis passes within `D` of the orbit base point has a
    /// conjugating representative of displacement at most `D + ℓ₀/2`
    /// (slide the conjugator along the axis to the nearest translate), so a
    /// margin of `dist(base, x0) + eps0 + ℓ₀/2` plus rounding slack makes
    /// the sweep complete for every event with `t_in ≤ t_max`.
    #[allow(clippy::too_many_arguments)]
    pub fn enumerate(
        spec: &GroupSpec,
        gamma0: &IntMatrix,
        x0: HPoint,
        xi: Boundary,
        eps0: f64,
        t_max: f64,
        margin: f64,
        budget: &EnumerationBudget,
    ) -> Result<Self> {
        if !(eps0 > 0.0) || !eps0.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "tube radius must be positive and finite, got {eps0}"
            )));
        }
        if !(t_max > 0.0) || !t_max.is_finite() || !(margin > 0.0) || !margin.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "time horizon and margin must be positive and finite, got t_max={t_max}, margin={margin}"
            )));
        }
        let tr = gamma0.trace();
        if tr.unsigned_abs() <= 2 {
            return Err(Error::NotHyperbolic { trace: tr as f64 });
        }
        if !spec.is_integer_backed() {
            return Err(Error::InvalidConfig(
                "axis-lift enumeration needs an integer-matrix group".into(),
            ));
        }
        if !spec.accepts(gamma0) {
            return Err(Error::InvalidConfig(
                "the closed-geodesic representative must belong to the group".into(),
            ));
        }
        let radius = t_max + margin;
        if radius > budget.radius_cap {
            return Err(Error::InvalidConfig(format!(
                "enumeration radius {radius} exceeds the configured cap {}",
                budget.radius_cap
            )));
        }
        let predicted = predicted_ball_count(radius);
        if predicted > budget.element_cap {
            return Err(Error::BudgetExceeded { predicted, cap: budget.element_cap });
        }

        // tr² − 4 is a conjugacy invariant, so one square root serves every
        // candidate: endpoints are ((a−d) ± √(tr²−4))/(2c) and the axis
        // distance from the base point i satisfies
        // sinh d(i, axis) = |c − b|/√(tr²−4).
        let disc = (tr * tr - 4) as f64;
        let sqrt_disc = disc.sqrt();
        let cb_cap = radius.sinh() * sqrt_disc * (1.0 + 1e-9) + 1.0;
        let frame = ray_frame(x0, xi);
        let sinh_pad = (eps0 + EPS_PAD).sinh();
        let h_floor = (-TIME_PAD).exp();
        let h_ceiling = (t_max + TIME_PAD).exp();

        // Same slicing as `visit_ball`, one first-column entry per task.
        let smax = ball_entry_bound(radius);
        let amax = isqrt((smax - 1).max(0));
        let slices = (2 * amax + 1) as usize;
        let mut candidates: Vec<Candidate> = parallel::flat_map_range(slices, |idx| {
            let a = idx as i64 - amax;
            let mut local: Vec<Candidate> = Vec::new();
            visit_column_slice(smax, a, &mut |g| {
                if !spec.accepts(&g) {
                    return;
                }
                let m = gamma0
                    .conjugate_by(&g)
                    .expect("conjugation inside the enumeration ball cannot overflow")
                    .canonical();
                let cb = (m.c as i128 - m.b as i128) as f64;
                if cb.abs() > cb_cap {
                    return;
                }
                debug_assert!(m.c != 0, "integer hyperbolic axes never end at infinity");
                if m.c == 0 {
                    return;
                }
                let inv2c = 1.0 / (2.0 * m.c as f64);
                let ad = (m.a - m.d) as f64;
                let e_minus = Boundary::Finite((ad - sqrt_disc) * inv2c);
                let e_plus = Boundary::Finite((ad + sqrt_disc) * inv2c);
                let w1 = frame.boundary_apply(e_minus);
                let w2 = frame.boundary_apply(e_plus);
                let suspect = |w: Boundary| match w {
                    Boundary::Infinity => true,
                    Boundary::Finite(v) => !v.is_finite() || v.abs() > DEGENERATE_IMAGE,
                };
                let mut degenerate = false;
                if suspect(w1) || suspect(w2) {
                    // The ray frame sends ξ to ∞; a huge image means this
                    // axis (almost) ends at ξ. Confirm on the original
                    // coordinates before declaring the ray degenerate.
                    degenerate =
                        e_minus.approx_eq(xi, GEOM_TOL) || e_plus.approx_eq(xi, GEOM_TOL);
                    if !degenerate {
                        return;
                    }
                }
                if !degenerate {
                    // In the ray frame the ray is t ↦ (0, eᵗ) and the tube
                    // crossing heights have a closed form; keep the lift only
                    // if its padded window meets [~e⁰, ~e^t_max].
                    let Some((h_in, h_out)) = vertical_tube_window(w1, w2, sinh_pad) else {
                        return;
                    };
                    if h_out < h_floor || h_in > h_ceiling {
                        return;
                    }
                }
                let mi = m
                    .inverse()
                    .expect("inverting a ball element cannot overflow")
                    .canonical();
                let key_m: LiftKey = (m.a, m.b, m.c, m.d);
                let key_i: LiftKey = (mi.a, mi.b, mi.c, mi.d);
                let (key, rep) = if key_i < key_m { (key_i, mi) } else { (key_m, m) };
                local.push(Candidate { key, rep, degenerate });
            });
            local
        });

        if candidates.iter().any(|c| c.degenerate) {
            return Err(Error::DegenerateRay);
        }
        candidates.sort_unstable_by_key(|c| (c.rep.entry_square_sum(), c.key));
        candidates.dedup_by_key(|c| c.key);

        let reps: Vec<IntMatrix> = candidates.iter().map(|c| c.rep).collect();
        let lines = reps
            .iter()
            .map(|m| {
                let inv2c = 1.0 / (2.0 * m.c as f64);
                let ad = (m.a - m.d) as f64;
                GeodesicLine::new(
                    Boundary::Finite((ad - sqrt_disc) * inv2c),
                    Boundary::Finite((ad + sqrt_disc) * inv2c),
                )
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(AxisLifts { x0, xi, reps, lines, radius, eps_filter: eps0, t_filter: t_max })
    }

    /// Entry/exit times of the ray into every enumerated tube, sorted by
    /// entry time. `eps0` and `t_max` may be at most the values the lift
    /// list was filtered with; smaller values reuse the same enumeration.
    pub fn events(&self, eps0: f64, t_max: f64) -> Result<Vec<PenetrationEvent>> {
        if !(eps0 > 0.0) || eps0 > self.eps_filter {
            return Err(Error::InvalidConfig(format!(
                "tube radius {eps0} outside the enumerated filter (0, {}]",
                self.eps_filter
            )));
        }
        if !(t_max > 0.0) || t_max > self.t_filter {
            return Err(Error::InvalidConfig(format!(
                "time horizon {t_max} outside the enumerated filter (0, {}]",
                self.t_filter
            )));
        }
        let mut out = Vec::new();
        for (lift_id, line) in self.lines.iter().enumerate() {
            if line.has_endpoint(self.xi, GEOM_TOL) {
                return Err(Error::DegenerateRay);
            }
            if let Some((t_in, t_out)) = entry_exit(self.x0, self.xi, line, eps0)? {
                if t_in <= t_max && t_out > t_in {
                    out.push(PenetrationEvent { t_in, t_out, lift_id });
                }
            }
        }
        out.sort_by(|p, q| p.t_in.total_cmp(&q.t_in).then(p.lift_id.cmp(&q.lift_id)));
        Ok(out)
    }
}

/// All penetrations of the ray `[x0, xi)` into the `eps0`-tubes of the lifts
/// of `axis(gamma0)`, with `t_in ≤ t_max`, sorted by entry time.
///
/// Fails with [`Error::DegenerateRay`] when `xi` is fixed by a conjugate of
/// `gamma0` found in the sweep (the ray would stay in one tube forever).
#[allow(clippy::too_many_arguments)]
pub fn penetration_profile(
    x0: HPoint,
    xi: Boundary,
    gamma0: &IntMatrix,
    spec: &GroupSpec,
    eps0: f64,
    t_max: f64,
    margin: f64,
    budget: &EnumerationBudget,
) -> Result<Vec<PenetrationEvent>> {
    AxisLifts::enumerate(spec, gamma0, x0, xi, eps0, t_max, margin, budget)?
        .events(eps0, t_max)
}

/// How the per-sample excursion maxima are computed.
#[derive(Clone, Debug)]
pub enum LoglawPath {
    /// Full enumeration of reachable lifts; any integer-backed group.
    Geometric {
        /// Tube radius `ε₀`.
        eps0: f64,
        /// Enumeration margin beyond the largest grid time.
        margin: f64,
    },
    /// Continued-fraction model of golden-axis excursions on the modular
    /// surface; reaches digit counts far beyond any enumerable ball.
    ContinuedFraction,
}

impl LoglawPath {
    fn label(&self) -> String {
        match self {
            LoglawPath::Geometric { eps0, margin } => {
                format!("geometric:eps0={eps0},margin={margin}")
            }
            LoglawPath::ContinuedFraction => "cf".to_owned(),
        }
    }
}

/// Tunables of [`loglaw_experiment`].
#[derive(Clone, Debug)]
pub struct LoglawSettings {
    pub n_samples: usize,
    /// Times the running maximum is read off at; strictly increasing, `> 1`.
    pub t_grid: Vec<f64>,
    pub seed: u64,
    /// Pressure gap `δ̂ − δ̂₀` normalizing the statistic; the limit of
    /// `p_max(t)/ln t` is its reciprocal.
    pub delta_gap: f64,
    /// Boundary window the sample abscissae are drawn from.
    pub sample_window: (f64, f64),
    /// Truncation radius of the empirical boundary measure used when the
    /// potential is not constant.
    pub patterson_radius: f64,
    pub budget: EnumerationBudget,
}

impl Default for LoglawSettings {
    fn default() -> Self {
        LoglawSettings {
            n_samples: 40,
            t_grid: vec![4.0, 6.0, 8.0],
            seed: 0,
            delta_gap: 1.0,
            sample_window: (0.0, 1.0),
            patterson_radius: 10.0,
            // The geometric path enumerates a ball of radius max(t_grid) +
            // margin, past the conservative group-level default cap.
            budget: EnumerationBudget { radius_cap: 20.0, element_cap: 400_000_000 },
        }
    }
}

/// Digit budget of the continued-fraction path; enough that any abscissa
/// that is not an exact dyadic covers every practical time horizon.
const CF_LOGLAW_DIGITS: usize = 4000;

/// Growth of the deepest tube excursion against `ln t`.
///
/// Per sample ray the statistic `p_max(t)/ln t` is recorded on `t_grid`,
/// where `p_max(t)` is the longest excursion (full duration) entered by time
/// `t`. Its almost-sure limit is `1/(δ̂ − δ̂₀)`; the verdict is `Consistent`
/// when the top-grid median lies within [`LOGLAW_BAND`] (scaled by the
/// target) and is no farther from the target than the bottom-grid median,
/// up to a small slack.
pub fn loglaw_experiment(
    spec: &GroupSpec,
    gamma0: &IntMatrix,
    potential: &Potential,
    path: &LoglawPath,
    settings: &LoglawSettings,
) -> Result<ExperimentReport> {
    let grid = &settings.t_grid;
    if grid.is_empty()
        || grid.windows(2).any(|w| w[0] >= w[1])
        || grid.iter().any(|&t| !(t > 1.0) || !t.is_finite())
    {
        return Err(Error::InvalidConfig(
            "time grid must be finite, strictly increasing, and > 1".into(),
        ));
    }
    if !(settings.delta_gap > 0.0) || !settings.delta_gap.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "pressure gap must be positive and finite, got {}",
            settings.delta_gap
        )));
    }
    let target = 1.0 / settings.delta_gap;
    let t_max = *grid.last().unwrap();
    if let LoglawPath::ContinuedFraction = path {
        if gamma0.trace().unsigned_abs() != 3 {
            return Err(Error::InvalidConfig(
                "the continued-fraction path models the trace-3 golden axis only".into(),
            ));
        }
    }

    let mut report = ExperimentReport::new("loglaw");
    report.setting("group", spec.label());
    report.setting(
        "gamma0",
        format!("{},{},{},{}", gamma0.a, gamma0.b, gamma0.c, gamma0.d),
    );
    report.setting("potential", potential.label());
    report.setting("path", path.label());
    report.setting("n_samples", settings.n_samples);
    report.setting("seed", settings.seed);
    report.setting(
        "t_grid",
        grid.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
    );
    report.setting("delta_gap", settings.delta_gap);
    report.threshold("band_lo", LOGLAW_BAND.0);
    report.threshold("band_hi", LOGLAW_BAND.1);
    report.threshold("trend_slack", LOGLAW_TREND_SLACK);
    report.threshold("target", target);
    report.grid = grid.clone();
    if settings.n_samples == 0 {
        return Ok(report);
    }

    let (xs, sampling) = draw_window_abscissae(
        spec,
        potential,
        settings.sample_window,
        settings.n_samples,
        settings.seed,
        settings.patterson_radius,
        &settings.budget,
    )?;
    report.setting("sampling", sampling);

    let traces: Vec<Result<SampleTrace>> = match path {
        LoglawPath::Geometric { eps0, margin } => {
            parallel::map_range(settings.n_samples, |j| {
                let profile = penetration_profile(
                    HPoint::base(),
                    Boundary::Finite(xs[j]),
                    gamma0,
                    spec,
                    *eps0,
                    t_max,
                    *margin,
                    &settings.budget,
                )?;
                let values = grid
                    .iter()
                    .map(|&t| {
                        let p_max = profile
                            .iter()
                            .filter(|e| e.t_in <= t)
                            .map(PenetrationEvent::duration)
                            .fold(0.0f64, f64::max);
                        p_max / t.ln()
                    })
                    .collect();
                Ok(SampleTrace { index: j, values })
            })
        }
        LoglawPath::ContinuedFraction => parallel::map_range(settings.n_samples, |j| {
            let x = xs[j];
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "continued-fraction path needs abscissae strictly inside (0, 1), got {x}"
                )));
            }
            let digits = cf_digits_lossy(&CfInput::Real(x), CF_LOGLAW_DIGITS)?;
            if digit_time_horizon(&digits) < t_max + 1.0 {
                return Err(Error::PrecisionExhausted { digits: digits.len() });
            }
            let events = cf_fast_penetrations(&digits);
            let values = grid
                .iter()
                .map(|&t| {
                    let p_max = events
                        .iter()
                        .filter(|e| e.time <= t)
                        .map(|e| e.duration)
                        .fold(0.0f64, f64::max);
                    p_max / t.ln()
                })
                .collect();
            Ok(SampleTrace { index: j, values })
        }),
    };
    report.per_sample = traces.into_iter().collect::<Result<Vec<_>>>()?;
    report.summarize();

    let medians = report.medians();
    let top = medians[medians.len() - 1];
    let bottom = medians[0];
    let in_band = LOGLAW_BAND.0 * target <= top && top <= LOGLAW_BAND.1 * target;
    let toward_target =
        (top - target).abs() <= (bottom - target).abs() + LOGLAW_TREND_SLACK * target;
    report.verdict =
        Some(if in_band && toward_target { Verdict::Consistent } else { Verdict::Inconclusive });
    Ok(report)
}
