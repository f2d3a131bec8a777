//! Arithmetic Fuchsian groups and their orbits.
//!
//! Three families are supported:
//! - `Psl2z`: the full modular group PSL₂(ℤ);
//! - `Congruence(N)`: the principal congruence subgroup Γ(N), the kernel of
//!   reduction mod N (entries a ≡ d ≡ ±1, b ≡ c ≡ 0 mod N, with one sign);
//! - `Quaternion { a, b }`: the cocompact lattice Γ_{a,b} of matrices
//!   [[x + y√a, z − t√a], [b(z + t√a), x − y√a]] over integer quadruples with
//!   x² − a·y² − b·z² + ab·t² = 1, valid only when the ternary form
//!   x² − a·y² − b·z² has no nonzero integer solution (division algebra).
//!
//! Enumeration is by displacement balls (exact integer sweeps driven by the
//! identity cosh d(i, g·i) = (a² + b² + c² + d²)/2), by coordinate boxes for
//! quaternion lattices, and by trace. Orbits of quadratic irrationals are
//! kept in exact canonical form so deduplication is never a matter of
//! floating-point luck.

mod enumerate;
mod intmatrix;
mod orbit;
mod quadratic;

pub use enumerate::{
    ball_entry_bound, enumerate_ball, enumerate_by_trace, enumerate_cyclic, enumerate_quaternion,
    predicted_ball_count, visit_ball, visit_column_slice, TraceClass, TraceEnumeration,
};
pub use intmatrix::IntMatrix;
pub use orbit::{orbit_quadratic_irrationals, OrbitPoint, QuadraticOrbit};
pub use quadratic::{fixed_point_exact, QuadraticIrrational};

use crate::error::Error;
use crate::geometry::Isometry;
use crate::Result;

/// Size limits for enumeration sweeps.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationBudget {
    /// Largest allowed ball radius.
    pub radius_cap: f64,
    /// Cap on the predicted / actual element count.
    pub element_cap: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self { radius_cap: 14.0, element_cap: 200_000_000 }
    }
}

impl EnumerationBudget {
    pub fn with_radius_cap(radius_cap: f64) -> Self {
        Self { radius_cap, ..Self::default() }
    }
}

/// One enumerated group element together with its displacement data.
#[derive(Clone, Debug)]
pub struct OrbitElement {
    /// Floating-point Möbius action.
    pub g: Isometry,
    /// Exact integer matrix for the integer-backed groups.
    pub exact: Option<IntMatrix>,
    /// Exact quaternion coordinates (x, y, z, t) for Γ_{a,b} elements.
    pub coords: Option<[i64; 4]>,
    /// hdist(x₀, g·x₀) from the base point x₀ = (0, 1).
    pub displacement: f64,
    /// ∫_{x₀}^{g·x₀} F̃ for the active potential; `None` until the
    /// thermodynamic layer fills it (treated as 0, the zero potential).
    pub f_integral: Option<f64>,
}

impl OrbitElement {
    pub fn from_int_matrix(m: IntMatrix) -> Result<Self> {
        Ok(Self {
            g: m.to_isometry()?,
            exact: Some(m),
            coords: None,
            displacement: m.displacement(),
            f_integral: None,
        })
    }

    /// Weight exponent used in orbit sums: the stored potential integral,
    /// or 0 when the element has not been weighted (zero potential).
    pub fn weight_exponent(&self) -> f64 {
        self.f_integral.unwrap_or(0.0)
    }
}

/// Which arithmetic family a [`GroupSpec`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Psl2z,
    Congruence(i64),
    Quaternion { a: i64, b: i64 },
}

/// A validated group description plus cached small elements.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    kind: GroupKind,
    /// Cached integer elements: honest generators for PSL₂(ℤ); for Γ(N) the
    /// standard unipotents [[1,N],[0,1]], [[1,0],[N,1]] (generators of Γ(2)
    /// projectively, seed elements for sanity checks when N ≥ 3).
    generators: Vec<IntMatrix>,
    /// Cached small quaternion coordinate solutions (x, y, z, t).
    quaternion_seeds: Vec<[i64; 4]>,
}

impl GroupSpec {
    pub fn psl2z() -> Self {
        Self {
            kind: GroupKind::Psl2z,
            generators: vec![
                IntMatrix { a: 0, b: -1, c: 1, d: 0 },
                IntMatrix { a: 1, b: 1, c: 0, d: 1 },
            ],
            quaternion_seeds: Vec::new(),
        }
    }

    pub fn congruence(level: i64) -> Result<Self> {
        if level < 2 {
            return Err(Error::InvalidGroup(format!(
                "congruence level must be at least 2, got {level}"
            )));
        }
        Ok(Self {
            kind: GroupKind::Congruence(level),
            generators: vec![
                IntMatrix { a: 1, b: level, c: 0, d: 1 },
                IntMatrix { a: 1, b: 0, c: level, d: 1 },
            ],
            quaternion_seeds: Vec::new(),
        })
    }

    pub fn quaternion(a: i64, b: i64) -> Result<Self> {
        validate_quaternion(a, b)?;
        let mut spec =
            Self { kind: GroupKind::Quaternion { a, b }, generators: Vec::new(), quaternion_seeds: Vec::new() };
        spec.quaternion_seeds = enumerate::quaternion_seed_solutions(a, b, 3);
        Ok(spec)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Stable textual form (`psl2z`, `congruence:N`, `quaternion:a,b`) used
    /// in report echoes and command-line round trips.
    pub fn label(&self) -> String {
        match self.kind {
            GroupKind::Psl2z => "psl2z".to_owned(),
            GroupKind::Congruence(n) => format!("congruence:{n}"),
            GroupKind::Quaternion { a, b } => format!("quaternion:{a},{b}"),
        }
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    pub fn quaternion_seeds(&self) -> &[[i64; 4]] {
        &self.quaternion_seeds
    }

    pub fn is_integer_backed(&self) -> bool {
        !matches!(self.kind, GroupKind::Quaternion { .. })
    }

    /// Membership filter for integer matrices (always true for PSL₂(ℤ),
    /// the mod-N congruence for Γ(N), false for quaternion lattices).
    pub fn accepts(&self, m: &IntMatrix) -> bool {
        match self.kind {
            GroupKind::Psl2z => true,
            GroupKind::Congruence(n) => {
                let zero = |x: i64| x.rem_euclid(n) == 0;
                (zero(m.a - 1) && zero(m.d - 1) && zero(m.b) && zero(m.c))
                    || (zero(m.a + 1) && zero(m.d + 1) && zero(m.b) && zero(m.c))
            }
            GroupKind::Quaternion { .. } => false,
        }
    }
}

/// Integer square root (floor), exact.
pub(crate) fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r > 0 && r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n);
    r * r == n
}

/// Legendre symbol (k | p) for an odd prime p, via Euler's criterion.
fn legendre(k: i64, p: i64) -> i64 {
    let k = k.rem_euclid(p);
    if k == 0 {
        return 0;
    }
    // Fast exponentiation of k^((p-1)/2) mod p.
    let mut base = k as i128;
    let mut exp = (p - 1) / 2;
    let m = p as i128;
    let mut acc: i128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// Squarefree part: returns (s, f) with n = s·f² and s squarefree.
fn squarefree_part(mut n: i64) -> (i64, i64) {
    let mut f = 1i64;
    let mut p = 2i64;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            f *= p;
        }
        p += 1;
    }
    (n, f)
}

fn odd_prime_factors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    while n % 2 == 0 {
        n /= 2;
    }
    let mut p = 3i64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Searches for a nonzero solution of p·x² = q·y² + r·z² with all three
/// squared terms at most `cap`. Returns a witness if one exists in range.
fn isotropic_witness(p: i64, q: i64, r: i64, cap: i64) -> Option<(i64, i64, i64)> {
    let ymax = isqrt(cap / q.max(1));
    for y in 0..=ymax {
        let qy = q * y * y;
        let zmax = isqrt((cap - qy).max(0) / r.max(1));
        for z in 0..=zmax {
            if y == 0 && z == 0 {
                continue;
            }
            let s = qy + r * z * z;
            if s % p != 0 {
                continue;
            }
            if is_square(s / p) {
                return Some((isqrt(s / p), y, z));
            }
        }
    }
    None
}

/// Checks the division-algebra invariant for Γ_{a,b}: the ternary norm form
/// x² − a·y² − b·z² must be anisotropic over ℤ (equivalently over ℚ).
///
/// Strategy, on the squarefree reductions a₀, b₀ of a and b:
/// 1. fast sufficient certificates of anisotropy: an odd prime p | b₀ with
///    p ∤ a₀ and (a₀ | p) = −1 (or symmetrically p | a₀), which forces the
///    usual mod-p² descent;
/// 2. witness search for isotropy within the coordinate box |x|,|y|,|z| ≤ 10³
///    on the original form, and on the reduced (and once-descended) forms,
///    which by the classical minimal-solution bound (|x| ≤ √(a₀b₀)) is
///    decisive whenever a₀·b₀ ≤ 10⁶.
fn validate_quaternion(a: i64, b: i64) -> Result<()> {
    if a < 1 || b < 1 {
        return Err(Error::InvalidGroup(format!(
            "quaternion parameters must be positive integers, got ({a}, {b})"
        )));
    }
    let (a0, fa) = squarefree_part(a);
    let (b0, fb) = squarefree_part(b);
    if a0 == 1 || b0 == 1 {
        return Err(Error::InvalidGroup(format!(
            "quaternion algebra ({a}, {b}) splits: {} is a perfect square times a unit, \
             so x² − a·y² − b·z² is isotropic",
            if a0 == 1 { format!("a = {a} = {a0}·{fa}²") } else { format!("b = {b} = {b0}·{fb}²") }
        )));
    }

    // Witness search on the original form (the documented bound 10³ box).
    if let Some((x, y, z)) = isotropic_witness(1, a, b, 1_000_000) {
        return Err(Error::InvalidGroup(format!(
            "quaternion algebra ({a}, {b}) is not a division algebra: \
             x² − a·y² − b·z² vanishes at ({x}, {y}, {z})"
        )));
    }

    // Anisotropy certificates on the reduced form.
    for p in odd_prime_factors(b0) {
        if a0 % p != 0 && legendre(a0, p) == -1 {
            return Ok(());
        }
    }
    for p in odd_prime_factors(a0) {
        if b0 % p != 0 && legendre(b0, p) == -1 {
            return Ok(());
        }
    }

    // No certificate: decide by exhaustive search on the reduced form (and
    // its mod-gcd descent), complete for a₀·b₀ ≤ 10⁶.
    if let Some((x, y, z)) = isotropic_witness(1, a0, b0, 4_000_000) {
        return Err(Error::InvalidGroup(format!(
            "quaternion algebra ({a}, {b}) is not a division algebra: the reduced form \
             x² − {a0}·y² − {b0}·z² vanishes at ({x}, {y}, {z})"
        )));
    }
    let g = num_integer::gcd(a0, b0);
    if g > 1 {
        // x must be divisible by g; substituting x = g·x′ yields
        // g·x′² = (a₀/g)·y² + (b₀/g)·z².
        if let Some((x, y, z)) = isotropic_witness(g, a0 / g, b0 / g, 4_000_000) {
            return Err(Error::InvalidGroup(format!(
                "quaternion algebra ({a}, {b}) is not a division algebra: descent witness \
                 ({x}, {y}, {z}) for {g}·x² = {}·y² + {}·z²",
                a0 / g,
                b0 / g
            )));
        }
    }
    if a0 * b0 <= 1_000_000 {
        Ok(())
    } else {
        Err(Error::InvalidGroup(format!(
            "cannot certify the division-algebra condition for ({a}, {b}): \
             no residue obstruction found and the bounded search is not decisive \
             for a₀·b₀ = {} > 10⁶",
            a0 * b0
        )))
    }
}
