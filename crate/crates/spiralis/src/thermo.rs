//! Thermodynamic layer: potentials on the quotient surface, geodesic line
//! integrals, periods, Gibbs cocycles, shell sums and critical exponents,
//! empirical Patterson measures, Radon–Nikodym derivatives, and
//! measure-dimension estimators.
//!
//! Conventions shared by the whole module:
//! * the base point is `HPoint::base()` = (0, 1);
//! * potentials are functions of position only (footpoint potentials);
//! * orbit weights attach `exp(∫ F)` data to [`crate::groups::OrbitElement`]s
//!   via [`WeightedOrbit`], and every downstream sum consumes those frozen
//!   weights so estimators stay consistent with each other;
//! * reductions are sequential in a fixed order, so results do not depend on
//!   the worker count.

mod exponent;
mod integral;
mod patterson;
mod potential;

pub use exponent::{
    critical_exponent, shell_sum, trace_exponent_estimate, ExponentFit, ShellDiagnostic,
    TraceExponentEstimate, WeightedOrbit,
};
pub use integral::{
    delta0_cyclic, gibbs_cocycle, line_integral, period, rn_derivative, CocycleValue,
    LineQuadrature, COCYCLE_TRUNCATION_DEFAULT,
};
pub use patterson::{
    gibbs_dimension, local_dimension, mohsen_ratio, patterson_empirical, BoundaryMeasure,
    DimensionFit, EmpiricalPattersonMeasure, GibbsDimension, PattersonAtom,
};
pub use potential::{Potential, TubeBump};
