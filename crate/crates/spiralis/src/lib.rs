//! Numerical toolkit for the hyperbolic plane and its Fuchsian quotients:
//! Möbius geometry, complete orbit enumeration for arithmetic lattices,
//! weighted orbit-growth exponents, empirical boundary measures with shadow
//! and dimension diagnostics, and shrinking-target / penetration experiments
//! driven by continued fractions.
//!
//! The crate is organised in four layers, each building on the previous one:
//!
//! * [`geometry`] — points, boundary points, isometries, geodesics, Busemann
//!   functions and visual distance on the upper half-plane.
//! * [`groups`] — group descriptions, exact integer matrices, ball-complete
//!   orbit enumeration, and exact quadratic-irrational boundary points.
//! * [`thermo`] — weight potentials, line integrals, growth exponents,
//!   cocycles, empirical boundary measures, shadow ratios and dimensions.
//! * [`lab`] — reproducible experiments: approximation statistics,
//!   tube-penetration profiles, and continued-fraction fast paths.
//!
//! Heavy inner loops run through [`parallel`], which is backed by rayon when
//! the `parallel` feature (default) is enabled and degrades to plain
//! sequential iteration otherwise. All parallel entry points preserve input
//! order and reduce sequentially, so output bytes never depend on the worker
//! count.

pub mod error;
pub mod geometry;
pub mod groups;
pub mod io;
pub mod lab;
pub mod parallel;
pub mod thermo;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Absolute tolerance for geometric predicates (sign tests, endpoint
/// coincidence, determinant checks).
pub const GEOM_TOL: f64 = 1e-9;
