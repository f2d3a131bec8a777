use crate::{Error, Result};

/// Point of the upper half-plane, `v > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint {
    pub u: f64,
    pub v: f64,
}

impl HPoint {
    /// Construct a point, rejecting coordinates outside the model.
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(v > 0.0) || !u.is_finite() || !v.is_finite() {
            return Err(Error::InvalidPoint(v));
        }
        Ok(HPoint { u, v })
    }

    /// The reference base point `(0, 1)`.
    pub const fn base() -> Self {
        HPoint { u: 0.0, v: 1.0 }
    }

    /// Hyperbolic distance to another point.
    pub fn dist(self, other: HPoint) -> f64 {
        hdist(self, other)
    }
}

/// Hyperbolic distance between two points:
/// `arcosh(1 + ((u1−u2)² + (v1−v2)²) / (2 v1 v2))`.
pub fn hdist(p: HPoint, q: HPoint) -> f64 {
    let du = p.u - q.u;
    let dv = p.v - q.v;
    let x = 1.0 + (du * du + dv * dv) / (2.0 * p.v * q.v);
    // Guard against x dipping below 1 by rounding for coincident points.
    if x <= 1.0 {
        0.0
    } else {
        x.acosh()
    }
}
