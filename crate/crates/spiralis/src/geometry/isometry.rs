use super::{Boundary, GeodesicLine, HPoint};
use crate::{Error, Result, GEOM_TOL};

/// Orientation-preserving isometry of the half-plane, stored as a real
/// 2×2 matrix of determinant one acting by fractional-linear maps.
///
/// The matrix sign is canonicalized (the two lifts `±M` act identically):
/// trace non-negative, and when the trace vanishes the lower-left entry,
/// then the upper-left entry, is made non-negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Conjugacy type of an isometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsometryClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl Isometry {
    /// Construct from matrix entries, requiring determinant one.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !det.is_finite() || (det - 1.0).abs() > GEOM_TOL {
            return Err(Error::InvalidIsometry(det));
        }
        Ok(Isometry { a, b, c, d }.canonical())
    }

    /// Construct from any positive-determinant matrix by rescaling.
    pub fn from_unnormalized(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !det.is_finite() || det <= GEOM_TOL {
            return Err(Error::InvalidIsometry(det));
        }
        let s = det.sqrt();
        Ok(Isometry {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        }
        .canonical())
    }

    pub const fn identity() -> Self {
        Isometry {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    /// Pick the canonical sign among the two lifts `±M`.
    fn canonical(self) -> Self {
        let tr = self.a + self.d;
        let flip = if tr != 0.0 {
            tr < 0.0
        } else if self.c != 0.0 {
            self.c < 0.0
        } else {
            self.a < 0.0
        };
        if flip {
            Isometry {
                a: -self.a,
                b: -self.b,
                c: -self.c,
                d: -self.d,
            }
        } else {
            self
        }
    }

    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    /// Group inverse (determinant one, so the adjugate).
    pub fn inverse(self) -> Self {
        Isometry {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
        .canonical()
    }

    /// Composition `self ∘ other` (matrix product).
    pub fn compose(self, other: Isometry) -> Self {
        Isometry {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .canonical()
    }

    /// Image of an interior point under the fractional-linear action.
    pub fn apply(self, p: HPoint) -> HPoint {
        let (u, v) = (p.u, p.v);
        let re_den = self.c * u + self.d;
        let im_den = self.c * v;
        let den = re_den * re_den + im_den * im_den;
        let re_num = (self.a * u + self.b) * re_den + self.a * self.c * v * v;
        HPoint {
            u: re_num / den,
            v: v / den,
        }
    }

    /// Image of a boundary point.
    pub fn boundary_apply(self, xi: Boundary) -> Boundary {
        match xi {
            Boundary::Infinity => {
                if self.c == 0.0 {
                    Boundary::Infinity
                } else {
                    Boundary::Finite(self.a / self.c)
                }
            }
            Boundary::Finite(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    Boundary::Infinity
                } else {
                    Boundary::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }

    /// Conjugacy type, decided from the trace with tolerance `GEOM_TOL`.
    pub fn classify(self) -> IsometryClass {
        let tr = self.trace().abs();
        if tr > 2.0 + GEOM_TOL {
            IsometryClass::Hyperbolic
        } else if tr < 2.0 - GEOM_TOL {
            IsometryClass::Elliptic
        } else {
            // Trace ±2: identity iff off-diagonal entries vanish.
            if self.b.abs() <= GEOM_TOL && self.c.abs() <= GEOM_TOL {
                IsometryClass::Identity
            } else {
                IsometryClass::Parabolic
            }
        }
    }

    /// Translation length `2 arcosh(|tr|/2)` of a hyperbolic element.
    pub fn translation_length(self) -> Result<f64> {
        let tr = self.trace().abs();
        if tr <= 2.0 + GEOM_TOL {
            return Err(Error::NotHyperbolic { trace: self.trace() });
        }
        Ok(2.0 * (tr / 2.0).acosh())
    }

    /// Fixed boundary points of a hyperbolic element as
    /// `(attracting, repelling)`.
    ///
    /// With the canonical (positive-trace) lift and `c ≠ 0`, the value of
    /// `c·x + d` at the fixed point `x± = ((a−d) ± √(tr²−4))/(2c)` is
    /// `(tr ± √(tr²−4))/2`, which exceeds 1 exactly for the `+` root; the
    /// derivative `(cx+d)^{-2}` there is below 1, so the `+` root attracts.
    pub fn fixed_points(self) -> Result<(Boundary, Boundary)> {
        let g = self.canonical();
        let tr = g.trace();
        if tr <= 2.0 + GEOM_TOL {
            return Err(Error::NotHyperbolic { trace: tr });
        }
        let disc = (tr * tr - 4.0).sqrt();
        if g.c != 0.0 {
            let attracting = ((g.a - g.d) + disc) / (2.0 * g.c);
            let repelling = ((g.a - g.d) - disc) / (2.0 * g.c);
            Ok((Boundary::Finite(attracting), Boundary::Finite(repelling)))
        } else {
            // Upper triangular: fixes infinity and b/(d−a); infinity
            // attracts exactly when the diagonal satisfies a > d.
            let finite = Boundary::Finite(g.b / (g.d - g.a));
            if g.a > g.d {
                Ok((Boundary::Infinity, finite))
            } else {
                Ok((finite, Boundary::Infinity))
            }
        }
    }

    /// Translation axis of a hyperbolic element, oriented from the
    /// repelling to the attracting fixed point.
    pub fn axis(self) -> Result<GeodesicLine> {
        let (plus, minus) = self.fixed_points()?;
        GeodesicLine::new(minus, plus)
    }
}

impl std::ops::Mul for Isometry {
    type Output = Isometry;
    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hdist;

    fn golden() -> Isometry {
        // [[2,1],[1,1]]: trace 3, translation length 4 ln φ.
        Isometry::new(2.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn identity_construction_is_canonical() {
        let id = Isometry::identity();
        assert_eq!(id.a, 1.0);
        assert_eq!(id.c, 0.0);
        assert_eq!(id.classify(), IsometryClass::Identity);
    }

    #[test]
    fn determinant_is_enforced() {
        assert!(Isometry::new(2.0, 0.0, 0.0, 1.0).is_err());
        assert!(Isometry::from_unnormalized(2.0, 0.0, 0.0, 3.0).is_ok());
        assert!(Isometry::from_unnormalized(1.0, 0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn sign_is_canonicalized() {
        let g = Isometry::new(-2.0, -1.0, -1.0, -1.0).unwrap();
        assert_eq!(g, golden());
    }

    #[test]
    fn apply_preserves_distance() {
        let g = golden();
        let p = HPoint::new(0.3, 0.7).unwrap();
        let q = HPoint::new(-1.1, 2.5).unwrap();
        let d0 = hdist(p, q);
        let d1 = hdist(g.apply(p), g.apply(q));
        assert!((d0 - d1).abs() < 1e-12);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let g = golden();
        let h = Isometry::new(1.0, 2.0, 0.0, 1.0).unwrap();
        let p = HPoint::new(0.25, 1.5).unwrap();
        let via_compose = (g * h).apply(p);
        let via_seq = g.apply(h.apply(p));
        assert!((via_compose.u - via_seq.u).abs() < 1e-12);
        assert!((via_compose.v - via_seq.v).abs() < 1e-12);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let g = golden();
        let e = g * g.inverse();
        assert!((e.a - 1.0).abs() < 1e-12);
        assert!(e.b.abs() < 1e-12);
        assert!(e.c.abs() < 1e-12);
        assert!((e.d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classification_covers_the_standard_cases() {
        assert_eq!(golden().classify(), IsometryClass::Hyperbolic);
        let parabolic = Isometry::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(parabolic.classify(), IsometryClass::Parabolic);
        let elliptic = Isometry::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(elliptic.classify(), IsometryClass::Elliptic);
    }

    #[test]
    fn golden_translation_length() {
        // 2 arcosh(3/2) = 4 ln φ.
        let ell = golden().translation_length().unwrap();
        assert!((ell - 1.9248473002384139).abs() < 1e-14);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((ell - 4.0 * phi.ln()).abs() < 1e-14);
    }

    #[test]
    fn golden_fixed_points() {
        // [[2,1],[1,1]] fixes (1 ± √5)/2; the golden ratio attracts.
        let (att, rep) = golden().fixed_points().unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!(att.approx_eq(Boundary::Finite(phi), 1e-12));
        assert!(rep.approx_eq(Boundary::Finite(1.0 - phi), 1e-12));
    }

    #[test]
    fn attracting_point_attracts() {
        let g = golden();
        let (att, _) = g.fixed_points().unwrap();
        let mut x = Boundary::Finite(0.123);
        for _ in 0..60 {
            x = g.boundary_apply(x);
        }
        assert!(x.approx_eq(att, 1e-9));
    }

    #[test]
    fn diagonal_element_fixes_zero_and_infinity() {
        let g = Isometry::new(2.0, 0.0, 0.0, 0.5).unwrap();
        let (att, rep) = g.fixed_points().unwrap();
        assert_eq!(att, Boundary::Infinity);
        assert!(rep.approx_eq(Boundary::Finite(0.0), 0.0));
        let g_inv = g.inverse();
        let (att2, rep2) = g_inv.fixed_points().unwrap();
        assert!(att2.approx_eq(Boundary::Finite(0.0), 0.0));
        assert_eq!(rep2, Boundary::Infinity);
    }

    #[test]
    fn non_hyperbolic_has_no_axis() {
        let parabolic = Isometry::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            parabolic.translation_length(),
            Err(Error::NotHyperbolic { .. })
        ));
        assert!(parabolic.fixed_points().is_err());
    }

    #[test]
    fn boundary_action_handles_poles() {
        let g = Isometry::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(g.boundary_apply(Boundary::Finite(0.0)), Boundary::Infinity);
        assert!(g
            .boundary_apply(Boundary::Infinity)
            .approx_eq(Boundary::Finite(0.0), 0.0));
    }
}
