/// Point of the boundary circle: either a real number or the point at
/// infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    Finite(f64),
    Infinity,
}

impl Boundary {
    /// Finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            Boundary::Finite(x) => Some(x),
            Boundary::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, Boundary::Infinity)
    }

    /// Approximate equality with an absolute tolerance on finite values.
    pub fn approx_eq(self, other: Boundary, tol: f64) -> bool {
        match (self, other) {
            (Boundary::Infinity, Boundary::Infinity) => true,
            (Boundary::Finite(a), Boundary::Finite(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }
}

impl From<f64> for Boundary {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Boundary::Finite(x)
        } else {
            Boundary::Infinity
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Finite(x) => write!(f, "{x}"),
            Boundary::Infinity => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approx_eq_mixes_kinds_correctly() {
        assert!(Boundary::Infinity.approx_eq(Boundary::Infinity, 0.0));
        assert!(Boundary::Finite(1.0).approx_eq(Boundary::Finite(1.0 + 1e-12), 1e-9));
        assert!(!Boundary::Finite(1.0).approx_eq(Boundary::Infinity, 1e-9));
        assert!(!Boundary::Finite(0.0).approx_eq(Boundary::Finite(1.0), 1e-9));
    }
}
