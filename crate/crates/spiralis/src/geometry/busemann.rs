use super::{Boundary, GeodesicLine, HPoint};
use crate::Result;

/// Busemann cocycle `β_ξ(x, y) = lim_{t→∞} d(x, ξ_t) − d(y, ξ_t)`.
///
/// For `ξ = ∞` the closed form is `ln(v_y / v_x)`; a finite `ξ` is first
/// carried to `∞` by an isometry, which leaves the cocycle unchanged.
pub fn busemann(xi: Boundary, x: HPoint, y: HPoint) -> f64 {
    match xi {
        Boundary::Infinity => (y.v / x.v).ln(),
        Boundary::Finite(e) => {
            let frame = super::geodesic::ray_frame(HPoint::base(), Boundary::Finite(e));
            // Any isometry with ξ ↦ ∞ works; ray_frame is a convenient one.
            let fx = frame.apply(x);
            let fy = frame.apply(y);
            (fy.v / fx.v).ln()
        }
    }
}

/// Gromov product `(ξ|η)_x`, computed as the average of the two Busemann
/// values at the projection of `x` onto the geodesic `(ξ, η)`. Returns
/// `+∞` when the endpoints coincide.
pub fn gromov_product(x: HPoint, xi: Boundary, eta: Boundary) -> Result<f64> {
    if xi == eta {
        return Ok(f64::INFINITY);
    }
    let line = GeodesicLine::new(xi, eta)?;
    let z = line.closest_point(x);
    Ok(0.5 * (busemann(xi, x, z) + busemann(eta, x, z)))
}

/// Visual distance `d_x(ξ, η) = e^{−(ξ|η)_x}`; zero when `ξ = η`.
pub fn visual_distance(x: HPoint, xi: Boundary, eta: Boundary) -> Result<f64> {
    if xi == eta {
        return Ok(0.0);
    }
    Ok((-gromov_product(x, xi, eta)?).exp())
}

/// Truncated defining limit of the visual distance: rays from `x` toward
/// both boundary points are cut at depth `t`, giving
/// `exp(−(t − d(ξ_t, η_t)/2))`. Kept as an oracle for the closed form.
pub fn visual_distance_limit(x: HPoint, xi: Boundary, eta: Boundary, t: f64) -> f64 {
    if xi == eta {
        return 0.0;
    }
    let a = super::geodesic::ray_point(x, xi, t);
    let b = super::geodesic::ray_point(x, eta, t);
    (-(t - 0.5 * super::hdist(a, b))).exp()
}
