//! Exact 2×2 unimodular integer matrices.
//!
//! These are the elements of SL₂(ℤ) stored without rounding. All arithmetic
//! is overflow-checked; a product that leaves the `i64` range reports
//! [`Error::IntegerOverflow`] instead of wrapping. Matrices act projectively
//! (as elements of PSL₂(ℤ)): `canonical` picks one representative of the
//! pair {M, −M} so that enumeration and deduplication never double-count.

use crate::error::Error;
use crate::geometry::Isometry;
use crate::Result;

/// An element of SL₂(ℤ) with determinant exactly +1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMatrix {
    /// Builds a matrix, enforcing determinant +1 (computed exactly in `i128`).
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(Error::InvalidIsometry(det as f64));
        }
        Ok(Self { a, b, c, d })
    }

    pub const fn identity() -> Self {
        Self { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn det(&self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }

    /// Trace a + d, exact in `i128` so it never overflows.
    pub fn trace(&self) -> i128 {
        self.a as i128 + self.d as i128
    }

    /// Sum of squared entries; equals 2·cosh d(i, g·i) for the base point i.
    pub fn entry_square_sum(&self) -> i128 {
        let (a, b, c, d) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        a * a + b * b + c * c + d * d
    }

    /// Hyperbolic displacement of the base point (0,1): acosh(Σ entries²/2).
    pub fn displacement(&self) -> f64 {
        let half = self.entry_square_sum() as f64 / 2.0;
        if half <= 1.0 {
            0.0
        } else {
            half.acosh()
        }
    }

    /// The projective sign representative: trace > 0, ties broken by c > 0,
    /// then a > 0. Mirrors the floating-point [`Isometry::canonical`] rule.
    pub fn canonical(&self) -> Self {
        let flip = match self.trace().cmp(&0) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => {
                if self.c != 0 {
                    self.c < 0
                } else {
                    self.a < 0
                }
            }
        };
        if flip {
            Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            *self
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Exact product, overflow-checked entry by entry.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let entry = |x: i128| -> Result<i64> {
            i64::try_from(x).map_err(|_| Error::IntegerOverflow)
        };
        let (a1, b1, c1, d1) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        let (a2, b2, c2, d2) = (rhs.a as i128, rhs.b as i128, rhs.c as i128, rhs.d as i128);
        Ok(Self {
            a: entry(a1 * a2 + b1 * c2)?,
            b: entry(a1 * b2 + b1 * d2)?,
            c: entry(c1 * a2 + d1 * c2)?,
            d: entry(c1 * b2 + d1 * d2)?,
        })
    }

    /// Exact inverse: the adjugate [[d, −b], [−c, a]] (determinant is +1).
    pub fn inverse(&self) -> Result<Self> {
        let neg = |x: i64| x.checked_neg().ok_or(Error::IntegerOverflow);
        Ok(Self { a: self.d, b: neg(self.b)?, c: neg(self.c)?, d: self.a })
    }

    /// Conjugate g · self · g⁻¹, exact.
    pub fn conjugate_by(&self, g: &Self) -> Result<Self> {
        g.mul(self)?.mul(&g.inverse()?)
    }

    /// Exact integer power (n may be negative).
    pub fn pow(&self, n: i32) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { *self };
        let mut acc = Self::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// Floating-point view. Exact when |entries| < 2²⁶ so that the
    /// determinant check cannot be spoilt by rounding.
    pub fn to_isometry(&self) -> Result<Isometry> {
        Isometry::new(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }
}

impl std::fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}
