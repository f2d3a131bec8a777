use super::{Boundary, HPoint, Isometry};
use crate::{Error, Result, GEOM_TOL};

/// Oriented complete geodesic, stored with an isometry that carries it to
/// the upward imaginary axis (`minus → 0`, `plus → ∞`). All metric queries
/// reduce to closed forms in that standard frame.
///
/// The intrinsic time coordinate is arclength along the line, increasing
/// toward `plus`, with `t = 0` at the preimage of `(0, 1)`.
#[derive(Clone, Copy, Debug)]
pub struct GeodesicLine {
    minus: Boundary,
    plus: Boundary,
    to_std: Isometry,
    from_std: Isometry,
}

impl GeodesicLine {
    /// Construct the oriented geodesic with the given distinct endpoints.
    pub fn new(minus: Boundary, plus: Boundary) -> Result<Self> {
        let to_std = match (minus, plus) {
            (Boundary::Infinity, Boundary::Infinity) => {
                return Err(Error::DegenerateGeodesic)
            }
            (Boundary::Finite(e1), Boundary::Finite(e2)) => {
                if (e2 - e1).abs() <= GEOM_TOL {
                    return Err(Error::DegenerateGeodesic);
                }
                if e1 < e2 {
                    Isometry::from_unnormalized(1.0, -e1, -1.0, e2)?
                } else {
                    Isometry::from_unnormalized(1.0, -e1, 1.0, -e2)?
                }
            }
            (Boundary::Finite(e), Boundary::Infinity) => {
                Isometry::from_unnormalized(1.0, -e, 0.0, 1.0)?
            }
            (Boundary::Infinity, Boundary::Finite(e)) => {
                Isometry::from_unnormalized(0.0, -1.0, 1.0, -e)?
            }
        };
        Ok(GeodesicLine {
            minus,
            plus,
            to_std,
            from_std: to_std.inverse(),
        })
    }

    pub fn minus(&self) -> Boundary {
        self.minus
    }

    pub fn plus(&self) -> Boundary {
        self.plus
    }

    /// Whether `xi` coincides with one of the endpoints (tolerance `tol`).
    pub fn has_endpoint(&self, xi: Boundary, tol: f64) -> bool {
        self.minus.approx_eq(xi, tol) || self.plus.approx_eq(xi, tol)
    }

    /// Distance from a point to the line: `arcsinh(|u|/v)` in the
    /// standard frame.
    pub fn dist(&self, p: HPoint) -> f64 {
        let q = self.to_std.apply(p);
        (q.u.abs() / q.v).asinh()
    }

    /// Orthogonal projection onto the line.
    pub fn closest_point(&self, p: HPoint) -> HPoint {
        let q = self.to_std.apply(p);
        let r = (q.u * q.u + q.v * q.v).sqrt();
        self.from_std.apply(HPoint { u: 0.0, v: r })
    }

    /// Intrinsic time of the projection of `p` onto the line.
    pub fn time_of(&self, p: HPoint) -> f64 {
        let q = self.to_std.apply(p);
        (q.u * q.u + q.v * q.v).sqrt().ln()
    }

    /// Point at intrinsic time `t` (unit speed, increasing toward `plus`).
    pub fn point_at(&self, t: f64) -> HPoint {
        self.from_std.apply(HPoint { u: 0.0, v: t.exp() })
    }

    /// Image geodesic under an isometry (orientation preserved).
    pub fn transform(&self, g: Isometry) -> Result<GeodesicLine> {
        GeodesicLine::new(g.boundary_apply(self.minus), g.boundary_apply(self.plus))
    }
}

/// Point at signed arclength `s` along `line`, with `s = 0` at the point
/// of the line closest to `origin` and `s > 0` toward the plus endpoint.
pub fn geodesic_point(line: &GeodesicLine, s: f64, origin: HPoint) -> HPoint {
    line.point_at(line.time_of(origin) + s)
}

/// Distance from `p` to `line` (free-function form of [`GeodesicLine::dist`]).
pub fn dist_to_geodesic(p: HPoint, line: &GeodesicLine) -> f64 {
    line.dist(p)
}

/// Orthogonal projection of `p` onto `line`.
pub fn closest_point(p: HPoint, line: &GeodesicLine) -> HPoint {
    line.closest_point(p)
}

/// The complete geodesic through `x` with forward endpoint `xi`
/// (oriented so that `plus = xi`).
pub fn ray_geodesic(x: HPoint, xi: Boundary) -> Result<GeodesicLine> {
    let frame = frame_sending_to_infinity(xi);
    let w = frame.apply(x);
    // In the frame the ray is the vertical line through w, upward; its
    // backward endpoint is the real point below w.
    let minus = frame.inverse().boundary_apply(Boundary::Finite(w.u));
    GeodesicLine::new(minus, xi)
}

/// Point at arclength `t ≥ 0` along the ray from `x` toward `xi`
/// (negative `t` extends backward along the same geodesic).
pub fn ray_point(x: HPoint, xi: Boundary, t: f64) -> HPoint {
    let frame = frame_sending_to_infinity(xi);
    let w = frame.apply(x);
    frame.inverse().apply(HPoint {
        u: w.u,
        v: w.v * t.exp(),
    })
}

/// Isometry carrying `x` to `(0,1)` and `xi` to `∞`, so the ray `[x, xi)`
/// becomes `t ↦ (0, e^t)`.
pub fn ray_frame(x: HPoint, xi: Boundary) -> Isometry {
    let frame = frame_sending_to_infinity(xi);
    let w = frame.apply(x);
    // Translate the vertical line to u = 0, then scale its base to height 1.
    let s = w.v.sqrt();
    let shift = Isometry {
        a: 1.0 / s,
        b: -w.u / s,
        c: 0.0,
        d: s,
    };
    shift.compose(frame)
}

/// Some isometry sending `xi` to `∞` (identity when `xi = ∞`).
fn frame_sending_to_infinity(xi: Boundary) -> Isometry {
    match xi {
        Boundary::Infinity => Isometry::identity(),
        Boundary::Finite(e) => Isometry {
            a: 0.0,
            b: -1.0,
            c: 1.0,
            d: -e,
        },
    }
}

/// The complete geodesic through two distinct points, oriented from `x`
/// toward `y`.
pub fn through_points(x: HPoint, y: HPoint) -> Result<GeodesicLine> {
    if (x.u - y.u).abs() <= GEOM_TOL * (1.0 + x.u.abs().max(y.u.abs())) {
        // Vertical line.
        let e = Boundary::Finite(0.5 * (x.u + y.u));
        return if y.v > x.v {
            GeodesicLine::new(e, Boundary::Infinity)
        } else if y.v < x.v {
            GeodesicLine::new(Boundary::Infinity, e)
        } else {
            Err(Error::DegenerateGeodesic)
        };
    }
    // Half-circle: center from equal-radius condition, endpoints c ± r.
    let c = ((y.u * y.u + y.v * y.v) - (x.u * x.u + x.v * x.v)) / (2.0 * (y.u - x.u));
    let r = ((x.u - c) * (x.u - c) + x.v * x.v).sqrt();
    // u is strictly monotone along a half-circle, so the travel direction
    // is read off the horizontal ordering of the two points.
    if y.u > x.u {
        GeodesicLine::new(Boundary::Finite(c - r), Boundary::Finite(c + r))
    } else {
        GeodesicLine::new(Boundary::Finite(c + r), Boundary::Finite(c - r))
    }
}

/// Whether the ray `[x, xi)` meets the closed ball `B(y, radius)`.
pub fn shadow_contains(x: HPoint, y: HPoint, radius: f64, xi: Boundary) -> bool {
    let frame = frame_sending_to_infinity(xi);
    let w = frame.apply(x);
    let q = frame.apply(y);
    // Distance from q to the vertical ray rising from w: the foot of the
    // perpendicular onto the full line {u = w.u} sits at height
    // √((q.u − w.u)² + q.v²); below the ray start the origin is closest.
    let du = q.u - w.u;
    let foot = (du * du + q.v * q.v).sqrt();
    let d = if foot >= w.v {
        (du.abs() / q.v).asinh()
    } else {
        super::hdist(q, w)
    };
    d <= radius
}

/// Entry/exit times of the ray `[origin, xi)` into the closed
/// `eps0`-neighborhood of `line`, measured as arclength from `origin`.
///
/// Returns `None` when the ray misses the neighborhood; the exit time is
/// `+∞` exactly when `xi` is an endpoint of `line`. The distance from a
/// point moving at unit speed along a geodesic to a fixed geodesic is a
/// convex function of time, so the minimum is located by ternary search
/// and the level crossings by bisection.
pub fn entry_exit(
    origin: HPoint,
    xi: Boundary,
    line: &GeodesicLine,
    eps0: f64,
) -> Result<Option<(f64, f64)>> {
    if !(eps0 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tube radius must be positive, got {eps0}"
        )));
    }
    let shares_endpoint = line.has_endpoint(xi, GEOM_TOL);
    if shares_endpoint && line.dist(origin) <= GEOM_TOL {
        return Err(Error::DegenerateRay);
    }

    let frame = ray_frame(origin, xi);
    let moved = line.transform(frame)?;
    // In the ray frame the ray is t ↦ (0, e^t); distance to the moved line
    // is a cheap closed form per evaluation.
    let f = |t: f64| moved.dist(HPoint { u: 0.0, v: t.exp() });

    const T_PRECISION: f64 = 1e-9;

    if shares_endpoint {
        // Convex with limit 0 at +∞, hence nonincreasing: single entry.
        if f(0.0) <= eps0 {
            return Ok(Some((0.0, f64::INFINITY)));
        }
        let mut hi = 1.0;
        while f(hi) > eps0 {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::NonConvergent {
                    error: f(1e12),
                    tolerance: eps0,
                });
            }
        }
        let t_in = bisect_crossing(&f, eps0, hi / 2.0, hi, T_PRECISION, true);
        return Ok(Some((t_in, f64::INFINITY)));
    }

    // Bracket the convex minimum: f grows without bound, so doubling finds
    // an upper end where f exceeds its start value.
    let f0 = f(0.0);
    let mut hi = 1.0;
    while f(hi) <= f0 + 1.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NonConvergent {
                error: f(1e12),
                tolerance: eps0,
            });
        }
    }
    let (mut a, mut b) = (0.0_f64, hi);
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) <= f(m2) {
            b = m2;
        } else {
            a = m1;
        }
        if b - a < T_PRECISION * 1e-2 {
            break;
        }
    }
    let t_min = 0.5 * (a + b);
    let d_min = f(t_min);
    if d_min > eps0 {
        return Ok(None);
    }

    let t_in = if f0 <= eps0 {
        0.0
    } else {
        bisect_crossing(&f, eps0, 0.0, t_min, T_PRECISION, true)
    };
    let mut out_hi = t_min + 1.0;
    while f(out_hi) <= eps0 {
        out_hi += 1.0;
    }
    let t_out = bisect_crossing(&f, eps0, t_min, out_hi, T_PRECISION, false);
    Ok(Some((t_in, t_out)))
}

/// Bisect `f(t) = level` on `[lo, hi]`; `downward` means `f` crosses from
/// above the level to below it over the interval.
fn bisect_crossing(
    f: &dyn Fn(f64) -> f64,
    level: f64,
    mut lo: f64,
    mut hi: f64,
    precision: f64,
    downward: bool,
) -> f64 {
    while hi - lo > precision {
        let mid = 0.5 * (lo + hi);
        let above = f(mid) > level;
        if above == downward {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Height window of the tube `{d(·, L) ≤ ε}` along the vertical geodesic
/// `h ↦ (0, h)`, for a line `L` with endpoints `w1, w2` (in the ray
/// frame). Returns heights `(h_in, h_out)` with `h_out = +∞` when `L` has
/// `∞` as an endpoint; `None` when the tube is missed. `sinh_eps` is
/// `sinh ε`.
///
/// Derivation: `sinh d((0,h), L) = |w1·w2 + h²| / (h·|w2−w1|)` for finite
/// endpoints, `|w|/h` when one endpoint is `∞`; the tube condition becomes
/// a pair of quadratic inequalities in `h`.
pub fn vertical_tube_window(w1: Boundary, w2: Boundary, sinh_eps: f64) -> Option<(f64, f64)> {
    match (w1, w2) {
        (Boundary::Infinity, Boundary::Infinity) => None,
        (Boundary::Finite(w), Boundary::Infinity) | (Boundary::Infinity, Boundary::Finite(w)) => {
            Some((w.abs() / sinh_eps, f64::INFINITY))
        }
        (Boundary::Finite(a), Boundary::Finite(b)) => {
            let e = a * b;
            let w = (b - a).abs();
            if w == 0.0 {
                return None;
            }
            let sw = sinh_eps * w;
            let disc = sw * sw - 4.0 * e;
            if e >= 0.0 {
                // Line on one side of the vertical; window from
                // h² − sinh(ε)·W·h + E ≤ 0 when it has real roots.
                if disc < 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                let h_in = 0.5 * (sw - sq);
                let h_out = 0.5 * (sw + sq);
                if h_out <= 0.0 {
                    None
                } else {
                    Some((h_in.max(0.0), h_out))
                }
            } else {
                // Line crosses the vertical: entry from
                // h² + sinh(ε)·W·h + E ≥ 0, exit from the other quadratic.
                let sq = disc.sqrt();
                let h_in = 0.5 * (-sw + sq);
                let h_out = 0.5 * (sw + sq);
                Some((h_in, h_out))
            }
        }
    }
}
