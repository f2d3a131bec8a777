//! Orbit weights, shell sums, and critical-exponent estimation.
//!
//! A [`WeightedOrbit`] freezes `∫_{x₀}^{g·x₀} F` into every element once, so
//! shell sums, Patterson measures, and shadow ratios all consume the same
//! weights. The critical exponent is the least-squares slope of
//! `ln shell_sum` against the shell position.

use crate::geometry::{busemann, HPoint};
use crate::groups::{
    enumerate_ball, enumerate_by_trace, EnumerationBudget, GroupSpec, OrbitElement,
};
use crate::thermo::integral::{
    gibbs_cocycle, segment_bumps_fixed, LineQuadrature, BATCH_STEP, COCYCLE_TRUNCATION_DEFAULT,
};
use crate::thermo::potential::Potential;
use crate::{parallel, Error, Result};

/// Slack when comparing shell edges against the enumeration radius, so a
/// shell ending exactly at the radius is accepted.
const RADIUS_SLACK: f64 = 1e-9;

/// Orbit elements with the potential integral attached, plus the enumeration
/// radius they are complete out to.
#[derive(Clone, Debug)]
pub struct WeightedOrbit {
    elements: Vec<OrbitElement>,
    radius: f64,
}

impl WeightedOrbit {
    /// Attach `∫_{x₀}^{g·x₀} f` to every element. `radius` is the radius the
    /// element list is complete out to. Constant parts are exact; tube parts
    /// use the fixed bulk quadrature step ([`BATCH_STEP`]).
    pub fn new(mut elements: Vec<OrbitElement>, radius: f64, f: &Potential) -> Result<WeightedOrbit> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidConfig("orbit radius must be positive".into()));
        }
        let (c, bumps) = f.split();
        let base = HPoint::base();
        let weights: Vec<f64> = if bumps.is_empty() {
            elements.iter().map(|el| c * el.displacement).collect()
        } else {
            parallel::map_slice(&elements, |el| {
                if el.displacement <= 1e-12 {
                    return 0.0;
                }
                c * el.displacement
                    + segment_bumps_fixed(&bumps, base, el.g.apply(base), BATCH_STEP)
            })
        };
        for (el, w) in elements.iter_mut().zip(weights) {
            el.f_integral = Some(w);
        }
        Ok(WeightedOrbit { elements, radius })
    }

    /// Enumerate the ball of `radius` in `spec`'s group and weight it.
    pub fn from_ball(
        spec: &GroupSpec,
        radius: f64,
        f: &Potential,
        budget: &EnumerationBudget,
    ) -> Result<WeightedOrbit> {
        let elements = enumerate_ball(spec, radius, budget)?;
        WeightedOrbit::new(elements, radius, f)
    }

    pub fn elements(&self) -> &[OrbitElement] {
        &self.elements
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// `Σ exp(∫F)` over elements with `t ≤ displacement < t + kappa`.
pub fn shell_sum(orbit: &WeightedOrbit, t: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() || !t.is_finite() {
        return Err(Error::InvalidConfig(
            "shell position must be finite and width positive".into(),
        ));
    }
    if t + kappa > orbit.radius + RADIUS_SLACK {
        return Err(Error::IncompleteOrbit {
            needed: t + kappa,
            radius: orbit.radius,
        });
    }
    let mut sum = 0.0;
    for el in &orbit.elements {
        if el.displacement >= t && el.displacement < t + kappa {
            sum += el.weight_exponent().exp();
        }
    }
    Ok(sum)
}

/// Per-shell record from a critical-exponent fit.
#[derive(Clone, Copy, Debug)]
pub struct ShellDiagnostic {
    /// Left edge of the shell `[t, t + κ)`.
    pub t: f64,
    /// Number of orbit elements in the shell.
    pub count: usize,
    /// Weighted shell sum.
    pub sum: f64,
    /// `ln sum` (−∞ for empty shells).
    pub log_sum: f64,
    /// Fit residual at the shell midpoint (0 for shells excluded as empty).
    pub residual: f64,
}

/// Critical-exponent fit: slope, intercept, and per-shell diagnostics.
#[derive(Clone, Debug)]
pub struct ExponentFit {
    /// Least-squares slope of `ln shell_sum` against the shell midpoint.
    pub delta_hat: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    /// Fit intercept.
    pub intercept: f64,
    pub shells: Vec<ShellDiagnostic>,
}

/// Estimate the critical exponent of the weighted orbit by regressing
/// `ln shell_sum` on the shell midpoint over `t_range` with shell width
/// `kappa`.
pub fn critical_exponent(
    orbit: &WeightedOrbit,
    t_range: (f64, f64),
    kappa: f64,
) -> Result<ExponentFit> {
    let (t0, t1) = t_range;
    if !(kappa > 0.0) || !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
        return Err(Error::InvalidConfig(
            "shell range must be ordered and the width positive".into(),
        ));
    }
    if t1 > orbit.radius + RADIUS_SLACK {
        return Err(Error::IncompleteOrbit {
            needed: t1,
            radius: orbit.radius,
        });
    }
    let mut shells = Vec::new();
    let mut k = 0usize;
    loop {
        let left = t0 + k as f64 * kappa;
        if left + kappa > t1 + RADIUS_SLACK {
            break;
        }
        let mut sum = 0.0;
        let mut count = 0usize;
        for el in &orbit.elements {
            if el.displacement >= left && el.displacement < left + kappa {
                sum += el.weight_exponent().exp();
                count += 1;
            }
        }
        let log_sum = if sum > 0.0 { sum.ln() } else { f64::NEG_INFINITY };
        shells.push(ShellDiagnostic {
            t: left,
            count,
            sum,
            log_sum,
            residual: 0.0,
        });
        k += 1;
    }
    let points: Vec<(f64, f64)> = shells
        .iter()
        .filter(|s| s.sum > 0.0)
        .map(|s| (s.t + 0.5 * kappa, s.log_sum))
        .collect();
    if points.len() < 4 {
        return Err(Error::DegenerateFit {
            shells: points.len(),
        });
    }
    let (slope, intercept, stderr) = fit_line(&points);
    for s in shells.iter_mut() {
        if s.sum > 0.0 {
            s.residual = s.log_sum - (slope * (s.t + 0.5 * kappa) + intercept);
        }
    }
    Ok(ExponentFit {
        delta_hat: slope,
        stderr,
        intercept,
        shells,
    })
}

/// Ordinary least squares through `(x, y)` points; returns
/// (slope, intercept, slope standard error). Requires ≥ 3 points for the
/// error estimate; with exactly 2 the error is 0.
pub(crate) fn fit_line(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let xbar = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in points {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let mut sse = 0.0;
    for (x, y) in points {
        let r = y - (slope * x + intercept);
        sse += r * r;
    }
    let stderr = if points.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, stderr)
}

/// Trace-window exponent estimate: `ln Σ w(γ) / (2 ln s)` over all elements
/// with `2 < |tr| ≤ s` and coordinates bounded by `coordinate_bound`, where
/// `w(γ)` is the Radon–Nikodym derivative of the `F − δ` family at the
/// attracting fixed point. `reduced_*` fields rerun the sum at 3/4 of the
/// coordinate bound; `sensitivity` is the difference between the two
/// estimates and quantifies how strongly the truncation drives the value.
#[derive(Clone, Debug)]
pub struct TraceExponentEstimate {
    pub s: f64,
    pub coordinate_bound: i64,
    pub reduced_bound: i64,
    pub estimate: f64,
    pub reduced_estimate: f64,
    pub sensitivity: f64,
    pub class_count: usize,
    pub element_count: usize,
}

fn within_coordinate_bound(el: &OrbitElement, bound: i64) -> bool {
    if let Some(coords) = el.coords {
        coords.iter().all(|c| c.abs() <= bound)
    } else if let Some(m) = &el.exact {
        m.a.abs().max(m.b.abs()).max(m.c.abs()).max(m.d.abs()) <= bound
    } else {
        true
    }
}

/// Exponent estimate from the trace-ordered sum of Radon–Nikodym weights.
pub fn trace_exponent_estimate(
    spec: &GroupSpec,
    f: &Potential,
    delta: f64,
    s: f64,
    coordinate_bound: i64,
    budget: &EnumerationBudget,
    quad: &LineQuadrature,
) -> Result<TraceExponentEstimate> {
    if !(s > 2.0) || !s.is_finite() {
        return Err(Error::InvalidConfig("trace cutoff must exceed 2".into()));
    }
    if coordinate_bound < 2 {
        return Err(Error::InvalidConfig(
            "coordinate bound must be at least 2".into(),
        ));
    }
    if !delta.is_finite() {
        return Err(Error::InvalidConfig("exponent must be finite".into()));
    }
    let enumeration = enumerate_by_trace(spec, s, coordinate_bound, budget)?;
    let flattened: Vec<&OrbitElement> = enumeration
        .classes
        .iter()
        .flat_map(|c| c.elements.iter())
        .collect();
    if flattened.is_empty() {
        return Err(Error::InvalidConfig(
            "no elements in the trace window; raise the coordinate bound or the cutoff".into(),
        ));
    }
    let (c, bumps) = f.split();
    let base = HPoint::base();
    let log_weights: Vec<Result<f64>> = parallel::map_slice(&flattened, |el| {
        let (plus, _) = el.g.fixed_points()?;
        let pulled = el.g.inverse().apply(base);
        if bumps.is_empty() {
            // Constant potentials admit the exact limit of the cocycle:
            // C_ξ(x, x₀) = (δ − c) · β_ξ(x, x₀).
            Ok((c - delta) * busemann(plus, pulled, base))
        } else {
            let cocycle =
                gibbs_cocycle(f, delta, plus, pulled, base, COCYCLE_TRUNCATION_DEFAULT, quad)?;
            Ok(-cocycle.value)
        }
    });
    let mut full_sum = 0.0;
    let mut reduced_sum = 0.0;
    let reduced_bound = ((coordinate_bound * 3) / 4).max(1);
    for (el, lw) in flattened.iter().zip(log_weights) {
        let w = lw?.exp();
        full_sum += w;
        if within_coordinate_bound(el, reduced_bound) {
            reduced_sum += w;
        }
    }
    if reduced_sum <= 0.0 {
        return Err(Error::InvalidConfig(
            "coordinate bound too small for the truncation-sensitivity check".into(),
        ));
    }
    let scale = 2.0 * s.ln();
    let estimate = full_sum.ln() / scale;
    let reduced_estimate = reduced_sum.ln() / scale;
    Ok(TraceExponentEstimate {
        s,
        coordinate_bound,
        reduced_bound,
        estimate,
        reduced_estimate,
        sensitivity: (estimate - reduced_estimate).abs(),
        class_count: enumeration.classes.len(),
        element_count: flattened.len(),
    })
}
