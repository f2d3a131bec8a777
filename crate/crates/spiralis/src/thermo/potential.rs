//! Potentials on the quotient surface.
//!
//! A [`Potential`] is a bounded, group-invariant function of position on the
//! upper half-plane. The interesting variant is the tube bump
//! `F(z) = −K · min{ d(z, Γ·A), 1 }` around the axis `A` of a hyperbolic
//! element: it is 1-Lipschitz (times `K`), vanishes on the orbit of the axis,
//! and saturates at `−K` one unit away from it.
//!
//! Invariantization strategy, by group:
//! * **full modular group** — evaluation first reduces the point into the
//!   standard fundamental domain `{|u| ≤ 1/2, |z| ≥ 1}` exactly, then takes
//!   the minimum distance over a frozen, pruned set of axis lifts that can
//!   reach within the unit cap of that domain. The result is invariant up to
//!   floating-point reduction noise.
//! * **other groups** — the minimum runs over all lifts of the axis meeting a
//!   fixed ball around the base point (radius [`LIFT_RADIUS_DIRECT`]), with
//!   no reduction. This is the documented cutoff approximation: values are
//!   reliable near the base point and saturate to `−K` far from every stored
//!   lift.

use std::collections::HashSet;

use crate::geometry::{dist_to_geodesic, Boundary, GeodesicLine, HPoint, Isometry, IsometryClass};
use crate::groups::{enumerate_ball, EnumerationBudget, GroupKind, GroupSpec};
use crate::{parallel, Error, Result};

/// Distance cap in `min{d, 1}`: beyond one unit from the tube the bump is flat.
pub(crate) const TUBE_CAP: f64 = 1.0;

/// Lift-search ball radius for the non-modular (documented-cutoff) mode.
pub(crate) const LIFT_RADIUS_DIRECT: f64 = 10.0;

/// Hard ceiling on the lift-search radius; axes further than this from the
/// base point are rejected rather than enumerated.
const LIFT_RADIUS_MAX: f64 = 12.0;

/// Extra slack, beyond the cap, when deciding whether a lift can influence
/// fundamental-domain values; covers the pruning grid's discretization.
const PRUNE_MARGIN: f64 = 0.35;

/// Safety cap on fundamental-domain reduction steps (far more than the
/// `O(log(1/v))` the algorithm needs for any representable point).
const REDUCTION_STEPS_MAX: usize = 256;

/// How the minimum over axis lifts is organized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TubeMode {
    /// Reduce the point into the modular fundamental domain, then scan a
    /// pruned lift set that covers that domain exactly.
    ModularReduce,
    /// Scan lifts from a fixed ball around the base point, no reduction.
    Direct,
}

/// Tube-bump potential `−K · min{ d(z, Γ·axis), 1 }`.
#[derive(Clone, Debug)]
pub struct TubeBump {
    depth: f64,
    mode: TubeMode,
    lifts: Vec<GeodesicLine>,
    /// Heights `v` at or above this are provably ≥ the cap away from every
    /// stored lift (modular mode only), so the value shortcuts to `−K`.
    ceiling: f64,
}

impl TubeBump {
    /// Build the tube bump of depth `depth ≥ 0` around the axis of the
    /// hyperbolic `gamma`, invariantized over `spec`'s group.
    pub fn new(spec: &GroupSpec, gamma: &Isometry, depth: f64) -> Result<TubeBump> {
        if !depth.is_finite() || depth < 0.0 {
            return Err(Error::InvalidConfig(
                "tube depth must be finite and nonnegative".into(),
            ));
        }
        if gamma.classify() != IsometryClass::Hyperbolic {
            return Err(Error::NotHyperbolic {
                trace: gamma.trace(),
            });
        }
        let axis = gamma.axis()?;
        let ell = gamma.translation_length()?;
        let dist_base = dist_to_geodesic(HPoint::base(), &axis);
        let mode = if spec.kind() == GroupKind::Psl2z {
            TubeMode::ModularReduce
        } else {
            TubeMode::Direct
        };
        // Every lift that comes within the cap of the evaluation region must
        // appear in the candidate ball. In modular mode the region is the
        // fundamental domain (diameter from the base point ≲ 1.2 up to the
        // cusp shortcut); a coset argument bounds the smallest group element
        // carrying the axis onto such a lift by roughly
        // region + cap + ℓ/2 + d(x₀, axis).
        let radius = match mode {
            TubeMode::ModularReduce => (3.3 + 0.5 * ell + dist_base).max(8.0),
            TubeMode::Direct => LIFT_RADIUS_DIRECT,
        };
        if radius > LIFT_RADIUS_MAX {
            return Err(Error::InvalidConfig(
                "tube axis too far from the base point: lift search exceeds the budget".into(),
            ));
        }
        let elements = enumerate_ball(spec, radius, &EnumerationBudget::default())?;
        let mut seen: HashSet<(i64, i64)> = HashSet::new();
        let mut lifts: Vec<GeodesicLine> = Vec::new();
        for el in &elements {
            let lift = axis.transform(el.g)?;
            if seen.insert(endpoint_key(&lift)) {
                lifts.push(lift);
            }
        }
        let ceiling = match mode {
            TubeMode::Direct => f64::INFINITY,
            TubeMode::ModularReduce => {
                let top_all = lifts.iter().map(apex_height).fold(0.0, f64::max);
                let strip = strip_grid(top_all * TUBE_CAP.exp() * 1.05);
                let keep = parallel::map_slice(&lifts, |lift| {
                    strip
                        .iter()
                        .any(|&p| dist_to_geodesic(p, lift) <= TUBE_CAP + PRUNE_MARGIN)
                });
                lifts = lifts
                    .into_iter()
                    .zip(keep)
                    .filter_map(|(l, k)| if k { Some(l) } else { None })
                    .collect();
                let top = lifts.iter().map(apex_height).fold(0.0, f64::max);
                top * TUBE_CAP.exp()
            }
        };
        if lifts.is_empty() {
            return Err(Error::InvalidConfig(
                "tube axis has no lifts near the evaluation region".into(),
            ));
        }
        Ok(TubeBump {
            depth,
            mode,
            lifts,
            ceiling,
        })
    }

    /// Evaluate the bump at `p`.
    pub fn value(&self, p: HPoint) -> f64 {
        let z = match self.mode {
            TubeMode::ModularReduce => reduce_modular(p),
            TubeMode::Direct => p,
        };
        if z.v >= self.ceiling {
            // Above every stored lift's apex by a factor ≥ e: the distance to
            // each of them is at least the cap, so the minimum saturates.
            return -self.depth * TUBE_CAP;
        }
        let mut dmin = f64::INFINITY;
        for lift in &self.lifts {
            let d = dist_to_geodesic(z, lift);
            if d < dmin {
                dmin = d;
            }
        }
        -self.depth * dmin.min(TUBE_CAP)
    }

    /// Bump depth `K`.
    pub fn depth(&self) -> f64 {
        self.depth
    }

    /// Number of axis lifts kept for evaluation.
    pub fn lift_count(&self) -> usize {
        self.lifts.len()
    }
}

/// Apex height of a geodesic: the semicircle radius, or ∞ for vertical lines.
fn apex_height(line: &GeodesicLine) -> f64 {
    match (line.minus().finite(), line.plus().finite()) {
        (Some(a), Some(b)) => 0.5 * (b - a).abs(),
        _ => f64::INFINITY,
    }
}

/// Deduplication key for a lift: its unordered endpoint pair, as boundary
/// angles rounded to 1e-9 radians.
fn endpoint_key(line: &GeodesicLine) -> (i64, i64) {
    let a = angle_key(line.minus());
    let b = angle_key(line.plus());
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn angle_key(xi: Boundary) -> i64 {
    (super::patterson::boundary_angle(xi) * 1e9).round() as i64
}

/// Sample grid covering the fundamental-domain strip `|u| ≤ 1/2`,
/// `0.85 ≤ v ≤ vmax`: 11 horizontal × 16 geometric vertical points, spacing
/// well under [`PRUNE_MARGIN`] in hyperbolic distance.
fn strip_grid(vmax: f64) -> Vec<HPoint> {
    let vtop = vmax.max(1.0);
    let mut grid = Vec::with_capacity(11 * 16);
    for iu in 0..11 {
        let u = -0.5 + 0.1 * iu as f64;
        for iv in 0..16 {
            let v = 0.85 * (vtop / 0.85_f64).powf(iv as f64 / 15.0);
            grid.push(HPoint { u, v });
        }
    }
    grid
}

/// Reduce a point into the standard modular fundamental domain
/// `{ |u| ≤ 1/2, u² + v² ≥ 1 }` by alternating integer translations and the
/// inversion `z ↦ −1/z`.
pub(crate) fn reduce_modular(p: HPoint) -> HPoint {
    let mut u = p.u;
    let mut v = p.v;
    for _ in 0..REDUCTION_STEPS_MAX {
        u -= u.round();
        let n2 = u * u + v * v;
        if n2 >= 1.0 - 1e-15 {
            break;
        }
        u = -u / n2;
        v /= n2;
    }
    HPoint { u, v }
}

/// Bounded group-invariant potential: constants, tube bumps, and sums.
#[derive(Clone, Debug)]
pub enum Potential {
    Constant(f64),
    Tube(TubeBump),
    Sum(Vec<Potential>),
}

impl Potential {
    /// The zero potential.
    pub fn zero() -> Potential {
        Potential::Constant(0.0)
    }

    /// Constant potential `F ≡ c`.
    pub fn constant(c: f64) -> Result<Potential> {
        if !c.is_finite() {
            return Err(Error::InvalidConfig("constant potential must be finite".into()));
        }
        Ok(Potential::Constant(c))
    }

    /// Tube bump of depth `depth` around the axis of `gamma`, invariantized
    /// over `spec`'s group.
    pub fn tube(spec: &GroupSpec, gamma: &Isometry, depth: f64) -> Result<Potential> {
        Ok(Potential::Tube(TubeBump::new(spec, gamma, depth)?))
    }

    /// Shift by a constant: `F + c`.
    pub fn plus_constant(self, c: f64) -> Result<Potential> {
        if !c.is_finite() {
            return Err(Error::InvalidConfig("constant shift must be finite".into()));
        }
        Ok(Potential::Sum(vec![self, Potential::Constant(c)]))
    }

    /// Evaluate at a point.
    pub fn value(&self, p: HPoint) -> f64 {
        let (c, bumps) = self.split();
        let mut v = c;
        for b in bumps {
            v += b.value(p);
        }
        v
    }

    /// A bound with `|F| ≤ bound` everywhere.
    pub fn bound(&self) -> f64 {
        match self {
            Potential::Constant(c) => c.abs(),
            Potential::Tube(t) => t.depth() * TUBE_CAP,
            Potential::Sum(parts) => parts.iter().map(Potential::bound).sum(),
        }
    }

    /// Stable textual form (`zero`, `const:c`, `tube:K`, sums joined with
    /// `+`) used in report echoes and command-line round trips.
    pub fn label(&self) -> String {
        match self {
            Potential::Constant(c) if *c == 0.0 => "zero".to_owned(),
            Potential::Constant(c) => format!("const:{c}"),
            Potential::Tube(t) => format!("tube:{}", t.depth()),
            Potential::Sum(parts) => {
                parts.iter().map(Potential::label).collect::<Vec<_>>().join("+")
            }
        }
    }

    /// `Some(c)` when the potential is constant (no tube parts).
    pub fn as_constant(&self) -> Option<f64> {
        let (c, bumps) = self.split();
        if bumps.is_empty() {
            Some(c)
        } else {
            None
        }
    }

    /// Split into the total constant offset and the list of tube parts.
    /// Integration handles the constant exactly and quadratures only the
    /// bumps.
    pub(crate) fn split(&self) -> (f64, Vec<&TubeBump>) {
        let mut c = 0.0;
        let mut bumps = Vec::new();
        self.split_into(&mut c, &mut bumps);
        (c, bumps)
    }

    fn split_into<'a>(&'a self, c: &mut f64, bumps: &mut Vec<&'a TubeBump>) {
        match self {
            Potential::Constant(x) => *c += x,
            Potential::Tube(t) => bumps.push(t),
            Potential::Sum(parts) => {
                for part in parts {
                    part.split_into(c, bumps);
                }
            }
        }
    }
}
