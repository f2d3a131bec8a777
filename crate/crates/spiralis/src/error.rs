//! Crate-wide error type.
//!
//! Every failure mode callers are expected to handle has its own variant;
//! opaque failures are not used. [`Error::exit_code`] groups the variants
//! into the process exit classes used by the command-line front end.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Point outside the open upper half-plane.
    #[error("point must satisfy v > 0 and be finite, got v = {0}")]
    InvalidPoint(f64),

    /// Matrix is not (a rescaling of) an orientation-preserving isometry.
    #[error("isometry must have determinant 1 (tolerance 1e-9), got {0}")]
    InvalidIsometry(f64),

    /// Geodesic endpoints coincide.
    #[error("geodesic endpoints must be distinct")]
    DegenerateGeodesic,

    /// Operation requires a hyperbolic element.
    #[error("operation requires a hyperbolic element (|trace| > 2), got trace {trace}")]
    NotHyperbolic { trace: f64 },

    /// Exact fixed points requested for an element fixing the point at infinity.
    #[error("element fixes the point at infinity; its fixed points are not a quadratic-irrational pair")]
    InfinityFixed,

    /// Ray queried against the geodesic that contains it.
    #[error("ray lies inside the target geodesic; entry and exit times are undefined")]
    DegenerateRay,

    /// Enumeration would exceed the configured element budget.
    #[error("enumeration budget exceeded: predicted {predicted} elements, cap {cap}")]
    BudgetExceeded { predicted: u64, cap: u64 },

    /// Group description fails its own invariants.
    #[error("invalid group description: {0}")]
    InvalidGroup(String),

    /// Quadratic-irrational triple fails its invariants.
    #[error("invalid quadratic irrational: {0}")]
    InvalidQuadratic(String),

    /// Integer overflow in exact matrix arithmetic.
    #[error("integer overflow in exact matrix arithmetic")]
    IntegerOverflow,

    /// Quadrature refinement did not settle.
    #[error("line integral did not converge: refinement still changes the result by {delta:e}")]
    QuadratureNonConvergent { delta: f64 },

    /// Cocycle truncation error estimate too large.
    #[error("cocycle did not converge: truncation error estimate {error:e} exceeds {tolerance:e}")]
    NonConvergent { error: f64, tolerance: f64 },

    /// Orbit too shallow for the requested displacement range.
    #[error("orbit radius {radius} too small for requested range up to {needed}")]
    IncompleteOrbit { needed: f64, radius: f64 },

    /// Too few populated shells for a least-squares fit.
    #[error("degenerate fit: only {shells} nonempty shells (need at least 4)")]
    DegenerateFit { shells: usize },

    /// Unnormalised measure mass above the safety cap.
    #[error("measure mass {mass:e} exceeds the blow-up cap {cap:e}")]
    MassBlowup { mass: f64, cap: f64 },

    /// Shadow contains no atoms.
    #[error("shadow contains no measure atoms")]
    EmptyShadow,

    /// Ball around the query point contains no atoms.
    #[error("ball of radius {epsilon:e} contains no measure mass")]
    EmptyBall { epsilon: f64 },

    /// No orbit points inside the requested complexity slice.
    #[error("no orbit points discovered within radius {radius}")]
    EmptyOrbitSlice { radius: f64 },

    /// Continued-fraction digits requested beyond the available precision.
    #[error("continued-fraction precision exhausted after {digits} digits")]
    PrecisionExhausted { digits: usize },

    /// Plot requested for an empty series.
    #[error("cannot plot an empty series")]
    EmptySeries,

    /// Configuration rejected.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit class: 2 = invalid input/config, 3 = numerical
    /// non-convergence or empty result, 4 = budget exceeded, 1 = other.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            InvalidPoint(_) | InvalidIsometry(_) | DegenerateGeodesic | InvalidGroup(_)
            | InvalidQuadratic(_) | InvalidConfig(_) | NotHyperbolic { .. } | InfinityFixed
            | EmptySeries => 2,
            QuadratureNonConvergent { .. } | NonConvergent { .. } | DegenerateFit { .. }
            | MassBlowup { .. } | EmptyShadow | EmptyBall { .. } | EmptyOrbitSlice { .. }
            | PrecisionExhausted { .. } | DegenerateRay | IntegerOverflow => 3,
            BudgetExceeded { .. } | IncompleteOrbit { .. } => 4,
            Io(_) | Json(_) => 1,
        }
    }
}
