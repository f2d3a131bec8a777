//! Geometry of the upper half-plane model.
//!
//! Points live in `{(u, v) : v > 0}` with the metric of constant curvature
//! −1; the boundary circle is `R ∪ {∞}`. Orientation-preserving isometries
//! are real Möbius maps with determinant 1, identified up to sign.
//!
//! Conventions used throughout the crate:
//!
//! * the reference base point is `(0, 1)`;
//! * geodesics are oriented, from `minus` to `plus`;
//! * a unit tangent vector is an ordered pair of distinct boundary points
//!   plus a time coordinate along the oriented geodesic (Hopf coordinates);
//!   time is signed arclength measured from the point of the geodesic
//!   closest to the reference origin and increases toward `plus`.

mod boundary;
mod busemann;
mod geodesic;
mod isometry;
mod point;
mod tangent;

pub use boundary::Boundary;
pub use busemann::{busemann, gromov_product, visual_distance, visual_distance_limit};
pub use geodesic::{
    closest_point, dist_to_geodesic, entry_exit, geodesic_point, ray_frame, ray_geodesic,
    ray_point, shadow_contains, through_points, vertical_tube_window, GeodesicLine,
};
pub use isometry::{Isometry, IsometryClass};
pub use point::{hdist, HPoint};
pub use tangent::UnitTangent;
