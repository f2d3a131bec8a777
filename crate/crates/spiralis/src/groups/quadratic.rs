//! Exact real quadratic irrationals (P + √Δ)/Q.
//!
//! The canonical form keeps P, Q, Δ integers with Q ≠ 0, Δ > 0 non-square,
//! Q | (Δ − P²), and no common factor removable without breaking that
//! divisibility. The conjugate (P − √Δ)/Q is represented as (−P + √Δ)/(−Q),
//! so the sign of Q is meaningful and is never normalised away.
//!
//! Within a fixed Δ the canonical triple is unique for a given value: the
//! coefficient of √Δ pins |Q| and its sign, and the rational part then pins
//! P. Deduplication across different Δ's sharing a squarefree part is not
//! attempted; all orbit constructions in this crate keep Δ fixed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::groups::intmatrix::IntMatrix;
use crate::Result;

/// (p + √delta) / q with the invariants described at module level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticIrrational {
    p: BigInt,
    q: BigInt,
    delta: BigInt,
}

/// √Δ as f64. Conversion to f64 rounds correctly (≤ 0.5 ulp) whenever Δ is
/// finite in f64, and `sqrt` is correctly rounded, so the result is within
/// ~1 ulp. Beyond f64 range, fall back to the integer square root, which
/// preserves the magnitude.
fn sqrt_f64(delta: &BigInt) -> f64 {
    match delta.to_f64() {
        Some(x) if x.is_finite() => x.sqrt(),
        _ => delta.sqrt().to_f64().unwrap_or(f64::INFINITY),
    }
}

impl QuadraticIrrational {
    /// Builds the canonical form of (p + √delta)/q.
    ///
    /// Errors with [`Error::InvalidQuadratic`] when q = 0, Δ ≤ 0, or Δ is a
    /// perfect square (the value would be rational).
    pub fn new<P, Q, D>(p: P, q: Q, delta: D) -> Result<Self>
    where
        BigInt: From<P> + From<Q> + From<D>,
    {
        Self::from_bigints(BigInt::from(p), BigInt::from(q), BigInt::from(delta))
    }

    pub fn from_bigints(mut p: BigInt, mut q: BigInt, mut delta: BigInt) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::InvalidQuadratic("denominator Q must be nonzero".into()));
        }
        if !delta.is_positive() {
            return Err(Error::InvalidQuadratic("Δ must be positive".into()));
        }
        let root = delta.sqrt();
        if &root * &root == delta {
            return Err(Error::InvalidQuadratic(
                "Δ is a perfect square; the value would be rational".into(),
            ));
        }

        // Restore the divisibility invariant Q | (Δ − P²) if needed by
        // scaling: (P, Q, Δ) → (P·|Q|, Q·|Q|, Δ·Q²).
        if !((&delta - &p * &p) % &q).is_zero() {
            let t = q.abs();
            p *= &t;
            delta *= &t * &t;
            q *= &t;
        }

        // Strip removable factors: divide (P, Q) by a prime f and Δ by f²
        // whenever that keeps Q | (Δ − P²).
        let mut g = p.gcd(&q);
        if g > BigInt::from(1) {
            let mut factor = BigInt::from(2);
            let trial_cap = BigInt::from(1_000_000u64);
            loop {
                while (&g % &factor).is_zero() {
                    let (p2, q2) = (&p / &factor, &q / &factor);
                    let f2 = &factor * &factor;
                    if !(&delta % &f2).is_zero() {
                        break;
                    }
                    let d2 = &delta / &f2;
                    if !((&d2 - &p2 * &p2) % &q2).is_zero() {
                        break;
                    }
                    p = p2;
                    q = q2;
                    delta = d2;
                    g = &g / &factor;
                }
                if factor > trial_cap || &factor * &factor > g {
                    break;
                }
                factor += 1;
            }
            // Whatever remains of g after trial division is prime or has no
            // factor below the cap; try it directly as a last candidate.
            if g > BigInt::from(1) {
                let f2 = &g * &g;
                if (&delta % &f2).is_zero() {
                    let (p2, q2, d2) = (&p / &g, &q / &g, &delta / &f2);
                    if ((&d2 - &p2 * &p2) % &q2).is_zero() {
                        p = p2;
                        q = q2;
                        delta = d2;
                    }
                }
            }
        }

        Ok(Self { p, q, delta })
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn delta(&self) -> &BigInt {
        &self.delta
    }

    /// Numerical value (P + √Δ)/Q, arranged to avoid cancellation: for P < 0
    /// it evaluates (Δ − P²)/(Q(√Δ − P)) whose numerator is exact.
    pub fn value(&self) -> f64 {
        let qf = self.q.to_f64().unwrap_or(f64::MAX);
        let sqrt = sqrt_f64(&self.delta);
        if self.p.is_negative() {
            let k = (&self.delta - &self.p * &self.p) / &self.q; // exact by invariant
            let denom = sqrt - self.p.to_f64().unwrap_or(f64::MIN);
            k.to_f64().unwrap_or(f64::MAX) / denom
        } else {
            (self.p.to_f64().unwrap_or(f64::MAX) + sqrt) / qf
        }
    }

    /// Galois conjugate (P − √Δ)/Q, as a canonical triple (−P, −Q, Δ).
    pub fn conjugate(&self) -> Self {
        Self { p: -&self.p, q: -&self.q, delta: self.delta.clone() }
    }

    pub fn conjugate_value(&self) -> f64 {
        self.conjugate().value()
    }

    /// |α − α^σ| = 2√Δ/|Q|.
    pub fn conjugate_gap(&self) -> f64 {
        2.0 * sqrt_f64(&self.delta) / self.q.to_f64().unwrap_or(f64::MAX).abs()
    }

    /// Height h(α) = 2/|α − α^σ| = |Q|/√Δ.
    pub fn height(&self) -> f64 {
        self.q.to_f64().unwrap_or(f64::MAX).abs() / sqrt_f64(&self.delta)
    }

    /// Exact Möbius image (aα + b)/(cα + d) in canonical form.
    pub fn apply(&self, m: &IntMatrix) -> Result<Self> {
        let (a, b, c, d) =
            (BigInt::from(m.a), BigInt::from(m.b), BigInt::from(m.c), BigInt::from(m.d));
        // With α = (P + √Δ)/Q:
        //   (aα + b)/(cα + d) = (N + Q√Δ)/M,
        //   N = (aP + bQ)(cP + dQ) − acΔ,  M = (cP + dQ)² − c²Δ,
        // and M | (Q²Δ − N²), so the canonical constructor never rescales.
        let u = &a * &self.p + &b * &self.q;
        let w = &c * &self.p + &d * &self.q;
        let n = &u * &w - &a * &c * &self.delta;
        let m_den = &w * &w - &c * &c * &self.delta;
        if m_den.is_zero() {
            return Err(Error::InvalidQuadratic(
                "Möbius image at infinity; this cannot happen for det-1 integer matrices".into(),
            ));
        }
        let sign = if self.q.is_negative() { BigInt::from(-1) } else { BigInt::from(1) };
        Self::from_bigints(&sign * n, sign * m_den, &self.q * &self.q * &self.delta)
    }

    /// ⌊α⌋, exact.
    pub fn floor(&self) -> BigInt {
        let s = self.delta.sqrt(); // ⌊√Δ⌋, and √Δ is irrational
        if self.q.is_positive() {
            (&self.p + s).div_floor(&self.q)
        } else {
            (-&self.p - s - 1i32).div_floor(&-&self.q)
        }
    }

    /// One continued-fraction step: returns the digit a₀ = ⌊α⌋ and the next
    /// complete quotient 1/(α − a₀).
    ///
    /// The step keeps Δ fixed (it does not re-canonicalise), which is what
    /// makes periodicity detectable as a repeat of the (P, Q) state.
    pub fn cf_step(&self) -> (BigInt, Self) {
        let a0 = self.floor();
        let p1 = &a0 * &self.q - &self.p;
        let q1 = (&self.delta - &p1 * &p1) / &self.q; // exact: Q | Δ − P₁²
        (a0, Self { p: p1, q: q1, delta: self.delta.clone() })
    }

    /// First n continued-fraction digits of α (a₀ may be ≤ 0; all later
    /// digits are ≥ 1).
    pub fn cf_digits(&self, n: usize) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(n);
        let mut state = self.clone();
        for _ in 0..n {
            let (digit, next) = state.cf_step();
            out.push(digit);
            state = next;
        }
        out
    }

    /// Whether the continued-fraction expansion ends in an infinite string of
    /// 1's. Decided exactly: the (P, Q) state is eventually periodic, and the
    /// the answer is whether every digit on the cycle equals 1.
    pub fn cf_tail_is_all_ones(&self) -> Result<bool> {
        use std::collections::HashMap;
        let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
        let mut digits: Vec<BigInt> = Vec::new();
        let mut state = self.clone();
        for step in 0..100_000usize {
            let key = (state.p.clone(), state.q.clone());
            if let Some(&start) = seen.get(&key) {
                let one = BigInt::from(1);
                return Ok(digits[start..].iter().all(|d| *d == one));
            }
            seen.insert(key, step);
            let (digit, next) = state.cf_step();
            digits.push(digit);
            state = next;
        }
        Err(Error::PrecisionExhausted { digits: 100_000 })
    }
}

impl std::fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} + sqrt({}))/{}", self.p, self.delta, self.q)
    }
}

/// Exact fixed points of a hyperbolic integer matrix, attracting first.
///
/// For the sign representative with trace > 2 the attracting point is the
/// +√ root ((a − d) + √(tr² − 4))/(2c): the Möbius derivative at a fixed
/// point is (cz + d)⁻², and cz + d at the two roots equals (tr ± √(tr²−4))/2,
/// so the + root has derivative of modulus < 1.
pub fn fixed_point_exact(m: &IntMatrix) -> Result<(QuadraticIrrational, QuadraticIrrational)> {
    let m = m.canonical();
    let tr = m.trace();
    if tr <= 2 {
        return Err(Error::NotHyperbolic { trace: tr as f64 });
    }
    if m.c == 0 {
        return Err(Error::InfinityFixed);
    }
    let delta = BigInt::from(tr) * BigInt::from(tr) - 4;
    let attracting = QuadraticIrrational::new(m.a - m.d, 2 * m.c, delta)?;
    let repelling = attracting.conjugate();
    Ok((attracting, repelling))
}
