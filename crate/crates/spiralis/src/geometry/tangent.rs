use super::{Boundary, GeodesicLine, HPoint, Isometry};
use crate::Result;

/// Unit tangent vector in Hopf coordinates: the backward endpoint, the
/// forward endpoint, and a signed time along the connecting geodesic.
///
/// Time is arclength with zero at the point of the geodesic closest to
/// the reference base point `(0, 1)`, increasing toward `plus`. The flip
/// involution reverses both endpoints and negates the time, fixing the
/// base point of the vector.
#[derive(Clone, Copy, Debug)]
pub struct UnitTangent {
    pub minus: Boundary,
    pub plus: Boundary,
    pub time: f64,
}

impl UnitTangent {
    pub fn new(minus: Boundary, plus: Boundary, time: f64) -> Result<Self> {
        // Validate endpoint distinctness by constructing the geodesic.
        GeodesicLine::new(minus, plus)?;
        Ok(UnitTangent { minus, plus, time })
    }

    /// The vector's oriented geodesic.
    pub fn line(&self) -> GeodesicLine {
        GeodesicLine::new(self.minus, self.plus).expect("validated at construction")
    }

    /// Foot point of the vector on the surface.
    pub fn base_point(&self) -> HPoint {
        let line = self.line();
        line.point_at(line.time_of(HPoint::base()) + self.time)
    }

    /// Geodesic flow for time `dt`.
    pub fn flow(&self, dt: f64) -> UnitTangent {
        UnitTangent {
            minus: self.minus,
            plus: self.plus,
            time: self.time + dt,
        }
    }

    /// Direction-reversing involution `ι`.
    pub fn flip(&self) -> UnitTangent {
        UnitTangent {
            minus: self.plus,
            plus: self.minus,
            time: -self.time,
        }
    }

    /// The vector based at `p` pointing along the given oriented geodesic.
    pub fn on_line_at(minus: Boundary, plus: Boundary, p: HPoint) -> Result<Self> {
        let line = GeodesicLine::new(minus, plus)?;
        let time = line.time_of(p) - line.time_of(HPoint::base());
        Ok(UnitTangent { minus, plus, time })
    }

    /// Image under an isometry. The time offset is recomputed because the
    /// zero point (closest approach to the base point) is not equivariant.
    pub fn transform(&self, g: Isometry) -> Result<UnitTangent> {
        let p = g.apply(self.base_point());
        UnitTangent::on_line_at(g.boundary_apply(self.minus), g.boundary_apply(self.plus), p)
    }
}
