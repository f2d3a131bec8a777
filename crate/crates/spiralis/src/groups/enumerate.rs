//! Group-element enumeration by displacement ball, coordinate box, and trace.
//!
//! The integer ball sweep is driven by the exact identity
//! cosh d(i, g·i) = (a² + b² + c² + d²)/2: elements with displacement ≤ R are
//! exactly the integer quadruples of determinant 1 with entry square sum
//! ≤ 2·cosh R. Rather than sweep all (a, b, c) triples, the driver loops over
//! first columns (a, c) with gcd 1; the second columns solving ad − bc = 1
//! form the one-parameter family (b₀ + k·a, d₀ + k·c), and the square-sum
//! bound is a k-interval. This visits each element once at cost O(1), so the
//! whole sweep is linear in the output plus the number of columns.
//!
//! Everything is emitted in canonical projective sign (see
//! [`IntMatrix::canonical`]) so {g, −g} is never double-counted, and results
//! are sorted by (exact square sum, lexicographic entries) — an exact integer
//! key, making the order independent of worker count.

use crate::error::Error;
use crate::geometry::Isometry;
use crate::groups::intmatrix::IntMatrix;
use crate::groups::{isqrt, EnumerationBudget, GroupKind, GroupSpec, OrbitElement};
use crate::Result;

/// Extended gcd: returns (g, s, t) with a·s + b·t = g = gcd(a, b) ≥ 0.
fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, s, t) = egcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}

/// Entry square-sum bound ⌊2·cosh R⌋ for a displacement ball of radius R.
pub fn ball_entry_bound(radius: f64) -> i64 {
    (2.0 * radius.cosh()).floor() as i64
}

/// Empirical prediction of the PSL₂(ℤ) ball element count (canonical signs).
/// The true count is asymptotically proportional to e^R; the constant here
/// over-covers so the budget check errs on the safe side.
pub fn predicted_ball_count(radius: f64) -> u64 {
    (3.5 * radius.exp()) as u64 + 16
}

/// Visits every canonical element with first column (a, c), any second
/// column within the square-sum bound `smax`.
fn visit_column(smax: i64, a: i64, c: i64, f: &mut impl FnMut(IntMatrix)) {
    let (g, s, t) = egcd(a, c);
    if g != 1 {
        return;
    }
    let col_sq = a * a + c * c;
    let s2 = smax - col_sq;
    if s2 < 0 {
        return;
    }
    // Particular solution of a·d − b·c = 1, then re-centre it so (b₀, d₀)
    // is the member of its family closest to the origin.
    let mut d0 = s;
    let mut b0 = -t;
    let shift = ((a as i128 * b0 as i128 + c as i128 * d0 as i128) as f64 / col_sq as f64).round()
        as i64;
    b0 -= shift * a;
    d0 -= shift * c;

    // (b₀ + k·a)² + (d₀ + k·c)² ≤ s2 is a quadratic inequality in k.
    let aa = col_sq as f64;
    let bb = (a as i128 * b0 as i128 + c as i128 * d0 as i128) as f64;
    let cc = (b0 as i128 * b0 as i128 + d0 as i128 * d0 as i128 - s2 as i128) as f64;
    let disc = bb * bb - aa * cc;
    if disc < 0.0 {
        return;
    }
    let root = disc.sqrt();
    let klo = ((-bb - root) / aa).floor() as i64 - 1;
    let khi = ((-bb + root) / aa).ceil() as i64 + 1;
    for k in klo..=khi {
        let b = b0 + k * a;
        let d = d0 + k * c;
        if (b as i128 * b as i128 + d as i128 * d as i128) > s2 as i128 {
            continue;
        }
        let m = IntMatrix { a, b, c, d };
        debug_assert_eq!(m.det(), 1);
        if m.is_canonical() {
            f(m);
        }
    }
}

/// Visits every canonical element whose first-column entry `a` is as given.
/// Together with `a ∈ [−⌊√(smax−1)⌋, ⌊√(smax−1)⌋]` this partitions the ball,
/// which is how large sweeps are split across workers.
pub fn visit_column_slice(smax: i64, a: i64, f: &mut impl FnMut(IntMatrix)) {
    let rem = smax - 1 - a * a; // the second column contributes at least 1
    if rem < 0 {
        return;
    }
    let cmax = isqrt(rem);
    for c in -cmax..=cmax {
        visit_column(smax, a, c, f);
    }
}

/// Visits every canonical element of the radius-R ball, sequentially.
pub fn visit_ball(radius: f64, f: &mut impl FnMut(IntMatrix)) {
    let smax = ball_entry_bound(radius);
    let amax = isqrt(smax - 1);
    for a in -amax..=amax {
        visit_column_slice(smax, a, f);
    }
}

fn sort_integer_elements(elements: &mut [OrbitElement]) {
    elements.sort_unstable_by_key(|e| {
        let m = e.exact.expect("integer enumeration always stores exact matrices");
        (m.entry_square_sum(), m.a, m.b, m.c, m.d)
    });
}

/// All distinct elements (canonical signs) of the group with
/// hdist(x₀, g·x₀) ≤ radius, sorted by displacement then entries.
pub fn enumerate_ball(
    spec: &GroupSpec,
    radius: f64,
    budget: &EnumerationBudget,
) -> Result<Vec<OrbitElement>> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidConfig(format!("ball radius must be positive, got {radius}")));
    }
    if radius > budget.radius_cap {
        return Err(Error::InvalidConfig(format!(
            "ball radius {radius} exceeds the configured cap {}",
            budget.radius_cap
        )));
    }
    match spec.kind() {
        GroupKind::Psl2z | GroupKind::Congruence(_) => {
            let predicted = predicted_ball_count(radius);
            if predicted > budget.element_cap {
                return Err(Error::BudgetExceeded { predicted, cap: budget.element_cap });
            }
            let mut out = Vec::new();
            let mut overflow = false;
            visit_ball(radius, &mut |m| {
                if overflow {
                    return;
                }
                if spec.accepts(&m) {
                    if out.len() as u64 >= budget.element_cap {
                        overflow = true;
                        return;
                    }
                    out.push(OrbitElement::from_int_matrix(m).expect("entries are ball-bounded"));
                }
            });
            if overflow {
                return Err(Error::BudgetExceeded {
                    predicted: predicted.max(budget.element_cap + 1),
                    cap: budget.element_cap,
                });
            }
            sort_integer_elements(&mut out);
            Ok(out)
        }
        GroupKind::Quaternion { a, b } => {
            // Entries of a displacement-R element are bounded by
            // E = √(2·cosh R); coordinates follow from the matrix shape.
            let e = (2.0 * radius.cosh()).sqrt();
            let xb = e.ceil() as i64;
            let yb = (e / (a as f64).sqrt()).ceil() as i64;
            let zb = (e * (1.0 + 1.0 / b as f64) / 2.0).ceil() as i64;
            let tb = (e * (1.0 + 1.0 / b as f64) / (2.0 * (a as f64).sqrt())).ceil() as i64;
            let mut out = quaternion_box_sweep(a, b, xb, yb, zb, tb, None, budget)?;
            out.retain(|el| el.displacement <= radius + 1e-12);
            Ok(out)
        }
    }
}

/// Powers γ₀ⁿ of a single hyperbolic element with displacement ≤ radius
/// (the cyclic group ⟨γ₀⟩ restricted to the ball), canonical signs.
pub fn enumerate_cyclic(gamma0: &IntMatrix, radius: f64) -> Result<Vec<OrbitElement>> {
    if gamma0.trace().abs() <= 2 {
        return Err(Error::NotHyperbolic { trace: gamma0.trace() as f64 });
    }
    let mut out = vec![OrbitElement::from_int_matrix(IntMatrix::identity())?];
    for dir in [1i32, -1] {
        let step = if dir == 1 { *gamma0 } else { gamma0.inverse()? };
        let mut acc = step;
        loop {
            let canon = acc.canonical();
            if canon.displacement() > radius {
                break;
            }
            out.push(OrbitElement::from_int_matrix(canon)?);
            acc = acc.mul(&step)?;
        }
    }
    sort_integer_elements(&mut out);
    Ok(out)
}

/// Sign-canonical filter for quaternion quadruples: trace 2x > 0, ties
/// broken by the lower-left entry b(z + t√a) > 0, then by y√a > 0.
fn quadruple_is_canonical(qa: i64, x: i64, y: i64, z: i64, t: i64) -> bool {
    if x != 0 {
        return x > 0;
    }
    // sign of z + t√a, exact (a is never a perfect square here).
    let z2 = z as i128 * z as i128;
    let at2 = qa as i128 * t as i128 * t as i128;
    let sign_c = if z == 0 && t == 0 {
        0
    } else if z >= 0 && t >= 0 {
        1
    } else if z <= 0 && t <= 0 {
        -1
    } else if z > 0 {
        // t < 0: positive iff z² > a·t²
        if z2 > at2 {
            1
        } else {
            -1
        }
    } else {
        // z < 0, t > 0: positive iff a·t² > z²
        if at2 > z2 {
            1
        } else {
            -1
        }
    };
    if sign_c != 0 {
        return sign_c > 0;
    }
    y > 0
}

fn quaternion_element(qa: i64, qb: i64, x: i64, y: i64, z: i64, t: i64) -> Result<OrbitElement> {
    let sa = (qa as f64).sqrt();
    let e11 = x as f64 + y as f64 * sa;
    let e12 = z as f64 - t as f64 * sa;
    let e21 = qb as f64 * (z as f64 + t as f64 * sa);
    let e22 = x as f64 - y as f64 * sa;
    let g = Isometry::new(e11, e12, e21, e22)?;
    let sumsq = e11 * e11 + e12 * e12 + e21 * e21 + e22 * e22;
    let displacement = if sumsq <= 2.0 { 0.0 } else { (sumsq / 2.0).acosh() };
    Ok(OrbitElement {
        g,
        exact: None,
        coords: Some([x, y, z, t]),
        displacement,
        f_integral: None,
    })
}

/// Core quaternion sweep over |y| ≤ yb, |z| ≤ zb, |t| ≤ tb, solving
/// x² = 1 + a·y² + b·z² − ab·t² and keeping |x| ≤ xb. When `max_coord` is
/// set, quadruples are additionally restricted to the box max|·| ≤ B.
fn quaternion_box_sweep(
    qa: i64,
    qb: i64,
    xb: i64,
    yb: i64,
    zb: i64,
    tb: i64,
    max_coord: Option<i64>,
    budget: &EnumerationBudget,
) -> Result<Vec<OrbitElement>> {
    let iterations = (2 * yb + 1) as u64 * (2 * zb + 1) as u64 * (2 * tb + 1) as u64;
    if iterations > budget.element_cap {
        return Err(Error::BudgetExceeded { predicted: iterations, cap: budget.element_cap });
    }
    let mut out = Vec::new();
    for y in -yb..=yb {
        let ay2 = qa as i128 * (y * y) as i128;
        for z in -zb..=zb {
            let bz2 = qb as i128 * (z * z) as i128;
            for t in -tb..=tb {
                let rhs = 1 + ay2 + bz2 - qa as i128 * qb as i128 * (t * t) as i128;
                if rhs < 0 {
                    continue;
                }
                let rhs64 = match i64::try_from(rhs) {
                    Ok(v) => v,
                    Err(_) => continue, // x would dwarf every coordinate bound
                };
                let x = isqrt(rhs64);
                if x * x != rhs64 || x > xb {
                    continue;
                }
                if let Some(bound) = max_coord {
                    if x > bound || y.abs() > bound || z.abs() > bound || t.abs() > bound {
                        continue;
                    }
                }
                // x ≥ 0 from isqrt; emit the canonical representative of
                // {±(x,y,z,t)}. For x > 0 that is the +x quadruple; for
                // x = 0 the loop visits both (0,y,z,t) and (0,−y,−z,−t)
                // and the canonical filter keeps exactly one.
                if quadruple_is_canonical(qa, x, y, z, t) {
                    out.push(quaternion_element(qa, qb, x, y, z, t)?);
                }
            }
        }
    }
    out.sort_unstable_by(|l, r| {
        l.displacement
            .total_cmp(&r.displacement)
            .then_with(|| l.coords.unwrap().cmp(&r.coords.unwrap()))
    });
    Ok(out)
}

/// Solutions of the Γ_{a,b} norm form within max|x,y,z,t| ≤ B, deduplicated
/// up to sign, sorted by displacement then coordinates.
pub fn enumerate_quaternion(
    qa: i64,
    qb: i64,
    coord_bound: i64,
    budget: &EnumerationBudget,
) -> Result<Vec<OrbitElement>> {
    // Constructing the spec re-checks the division-algebra invariant.
    let _ = GroupSpec::quaternion(qa, qb)?;
    if coord_bound < 0 {
        return Err(Error::InvalidConfig(format!(
            "coordinate bound must be nonnegative, got {coord_bound}"
        )));
    }
    quaternion_box_sweep(
        qa,
        qb,
        coord_bound,
        coord_bound,
        coord_bound,
        coord_bound,
        Some(coord_bound),
        budget,
    )
}

/// Small norm-form solutions used as cached seeds on a validated GroupSpec.
pub(crate) fn quaternion_seed_solutions(qa: i64, qb: i64, coord_bound: i64) -> Vec<[i64; 4]> {
    let budget = EnumerationBudget::default();
    quaternion_box_sweep(
        qa,
        qb,
        coord_bound,
        coord_bound,
        coord_bound,
        coord_bound,
        Some(coord_bound),
        &budget,
    )
    .map(|els| els.into_iter().filter_map(|e| e.coords).collect())
    .unwrap_or_default()
}

/// Elements grouped by |trace|.
#[derive(Clone, Debug)]
pub struct TraceClass {
    /// |tr| as an exact integer (2|x| for quaternion elements, |a + d| for
    /// integer matrices).
    pub abs_trace: i64,
    pub elements: Vec<OrbitElement>,
}

/// Trace-window enumeration result. `coordinate_bound` echoes the truncation
/// so consumers can assess how complete each trace class is.
#[derive(Clone, Debug)]
pub struct TraceEnumeration {
    pub coordinate_bound: i64,
    pub classes: Vec<TraceClass>,
}

impl TraceEnumeration {
    pub fn total_elements(&self) -> usize {
        self.classes.iter().map(|c| c.elements.len()).sum()
    }
}

/// All enumerated elements (within coordinate bound B) with 2 < |tr| ≤ s,
/// grouped by |tr|. Returns empty classes when s ≤ 2.
pub fn enumerate_by_trace(
    spec: &GroupSpec,
    s: f64,
    coord_bound: i64,
    budget: &EnumerationBudget,
) -> Result<TraceEnumeration> {
    let mut grouped: std::collections::BTreeMap<i64, Vec<OrbitElement>> =
        std::collections::BTreeMap::new();
    if s > 2.0 {
        match spec.kind() {
            GroupKind::Quaternion { a, b } => {
                for el in enumerate_quaternion(a, b, coord_bound, budget)? {
                    let tr = 2 * el.coords.expect("quaternion elements carry coords")[0].abs();
                    if tr > 2 && (tr as f64) <= s {
                        grouped.entry(tr).or_default().push(el);
                    }
                }
            }
            GroupKind::Psl2z | GroupKind::Congruence(_) if coord_bound >= 1 => {
                // Entries bounded by B means square sum ≤ 4B²; enumerate the
                // matching ball and filter to the coordinate box.
                let radius = (2.0 * (coord_bound as f64).powi(2)).acosh();
                let relaxed = EnumerationBudget {
                    radius_cap: budget.radius_cap.max(radius),
                    element_cap: budget.element_cap,
                };
                for el in enumerate_ball(spec, radius, &relaxed)? {
                    let m = el.exact.expect("integer enumeration stores exact matrices");
                    let within = m.a.abs() <= coord_bound
                        && m.b.abs() <= coord_bound
                        && m.c.abs() <= coord_bound
                        && m.d.abs() <= coord_bound;
                    let tr = m.trace().unsigned_abs() as i64;
                    if within && tr > 2 && (tr as f64) <= s {
                        grouped.entry(tr).or_default().push(el);
                    }
                }
            }
            // A coordinate bound below 1 admits no determinant-1 matrix.
            GroupKind::Psl2z | GroupKind::Congruence(_) => {}
        }
    }
    Ok(TraceEnumeration {
        coordinate_bound: coord_bound,
        classes: grouped
            .into_iter()
            .map(|(abs_trace, elements)| TraceClass { abs_trace, elements })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psl2z() -> GroupSpec {
        GroupSpec::psl2z()
    }

    /// Literal (a, b, c)-sweep oracle: solve for d, keep canonical signs.
    fn brute_force_ball(radius: f64) -> Vec<IntMatrix> {
        let smax = ball_entry_bound(radius);
        let bound = isqrt(smax);
        let mut out = Vec::new();
        for a in -bound..=bound {
            for b in -bound..=bound {
                for c in -bound..=bound {
                    if a == 0 {
                        // d free; need −bc = 1.
                        if b * c == -1 {
                            for d in -bound..=bound {
                                let m = IntMatrix { a, b, c, d };
                                if m.entry_square_sum() <= smax as i128 && m.is_canonical() {
                                    out.push(m);
                                }
                            }
                        }
                    } else {
                        let num = 1 + b * c;
                        if num % a == 0 {
                            let d = num / a;
                            let m = IntMatrix { a, b, c, d };
                            if m.entry_square_sum() <= smax as i128 && m.is_canonical() {
                                out.push(m);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    #[test]
    fn tiny_ball_is_the_base_point_stabilizer() {
        // The base point i is fixed by the order-2 rotation [[0,−1],[1,0]],
        // which therefore has displacement exactly 0 and belongs to every
        // ball; discreteness rules out anything else below radius ~0.96.
        let ball = enumerate_ball(&psl2z(), 0.1, &EnumerationBudget::default()).unwrap();
        let got: Vec<IntMatrix> = ball.iter().map(|e| e.exact.unwrap()).collect();
        let rotation = IntMatrix { a: 0, b: -1, c: 1, d: 0 };
        // Both have square sum 2; the tie breaks lexicographically.
        assert_eq!(got, vec![rotation, IntMatrix::identity()]);
        assert!(ball.iter().all(|e| e.displacement == 0.0));
    }

    #[test]
    fn ball_matches_the_brute_force_sweep() {
        for radius in [1.5, 3.0] {
            let mut ours: Vec<IntMatrix> =
                enumerate_ball(&psl2z(), radius, &EnumerationBudget::default())
                    .unwrap()
                    .into_iter()
                    .map(|e| e.exact.unwrap())
                    .collect();
            ours.sort_unstable();
            let oracle = brute_force_ball(radius);
            assert_eq!(ours, oracle, "ball mismatch at radius {radius}");
        }
    }

    #[test]
    fn ball_has_no_duplicates_and_is_sorted() {
        let ball = enumerate_ball(&psl2z(), 6.0, &EnumerationBudget::default()).unwrap();
        let mut seen = std::collections::HashSet::new();
        for el in &ball {
            let m = el.exact.unwrap();
            assert!(m.is_canonical());
            assert!(seen.insert(m), "duplicate element {m}");
            assert!(el.displacement <= 6.0 + 1e-12);
        }
        for pair in ball.windows(2) {
            assert!(pair[0].displacement <= pair[1].displacement + 1e-12);
        }
    }

    #[test]
    fn displacement_matches_recomputation() {
        use crate::geometry::{hdist, HPoint};
        let ball = enumerate_ball(&psl2z(), 4.0, &EnumerationBudget::default()).unwrap();
        for el in &ball {
            let image = el.g.apply(HPoint::base());
            let again = hdist(HPoint::base(), image);
            assert!(
                (again - el.displacement).abs() < 1e-9,
                "displacement drift for {:?}: {} vs {}",
                el.exact,
                again,
                el.displacement
            );
        }
    }

    #[test]
    fn congruence_ball_is_the_filtered_subgroup() {
        let full = enumerate_ball(&psl2z(), 5.0, &EnumerationBudget::default()).unwrap();
        let gamma2 = GroupSpec::congruence(2).unwrap();
        let sub = enumerate_ball(&gamma2, 5.0, &EnumerationBudget::default()).unwrap();
        let expected: Vec<IntMatrix> = full
            .iter()
            .map(|e| e.exact.unwrap())
            .filter(|m| gamma2.accepts(m))
            .collect();
        let got: Vec<IntMatrix> = sub.iter().map(|e| e.exact.unwrap()).collect();
        assert_eq!(got, expected);
        assert!(!sub.is_empty());
        assert!(sub.len() < full.len());
    }

    #[test]
    fn radius_and_element_caps_are_enforced() {
        let err = enumerate_ball(&psl2z(), 15.0, &EnumerationBudget::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
        let tight = EnumerationBudget { radius_cap: 14.0, element_cap: 10 };
        let err = enumerate_ball(&psl2z(), 8.0, &tight).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn cyclic_enumeration_walks_both_directions() {
        let golden = IntMatrix::new(2, 1, 1, 1).unwrap();
        let cyclic = enumerate_cyclic(&golden, 8.0).unwrap();
        // ℓ₀ = 2 arcosh(3/2) ≈ 1.9248; displacement of γ₀ⁿ from i grows as
        // |n|·ℓ₀ (i lies on the axis), so radius 8 holds n ∈ {−4,…,4}.
        assert_eq!(cyclic.len(), 9);
        let lengths: Vec<f64> = cyclic.iter().map(|e| e.displacement).collect();
        let l0 = 2.0 * 1.5f64.acosh();
        for (i, len) in lengths.iter().enumerate() {
            let n = (i + 1) / 2; // sorted: id, γ±1, γ±2, …
            assert!(
                (len - n as f64 * l0).abs() < 1e-9,
                "power {n} displacement {len}"
            );
        }
    }

    #[test]
    fn quaternion_sweep_matches_direct_brute_force() {
        let budget = EnumerationBudget::default();
        let ours = enumerate_quaternion(2, 3, 10, &budget).unwrap();
        // Independent O(B⁴) check: every quadruple in the box.
        let mut oracle = Vec::new();
        for x in -10i64..=10 {
            for y in -10i64..=10 {
                for z in -10i64..=10 {
                    for t in -10i64..=10 {
                        if x * x - 2 * y * y - 3 * z * z + 6 * t * t == 1
                            && quadruple_is_canonical(2, x, y, z, t)
                        {
                            oracle.push([x, y, z, t]);
                        }
                    }
                }
            }
        }
        let mut got: Vec<[i64; 4]> = ours.iter().map(|e| e.coords.unwrap()).collect();
        got.sort_unstable();
        oracle.sort_unstable();
        assert_eq!(got, oracle);
    }

    #[test]
    fn quaternion_elements_have_unit_determinant_and_norm() {
        let ours = enumerate_quaternion(2, 3, 8, &EnumerationBudget::default()).unwrap();
        assert!(ours.iter().any(|e| e.coords == Some([1, 0, 0, 0])));
        let mut seen = std::collections::HashSet::new();
        for el in &ours {
            let [x, y, z, t] = el.coords.unwrap();
            assert_eq!(x * x - 2 * y * y - 3 * z * z + 6 * t * t, 1);
            let det = el.g.a * el.g.d - el.g.b * el.g.c;
            assert!((det - 1.0).abs() < 1e-9);
            assert!(seen.insert([x, y, z, t]), "duplicate quadruple");
            assert!(
                quadruple_is_canonical(2, x, y, z, t),
                "non-canonical quadruple {:?}",
                el.coords
            );
        }
    }

    #[test]
    fn quaternion_ball_respects_the_radius() {
        let ball = enumerate_ball(
            &GroupSpec::quaternion(2, 3).unwrap(),
            4.0,
            &EnumerationBudget::default(),
        )
        .unwrap();
        assert!(!ball.is_empty());
        for el in &ball {
            assert!(el.displacement <= 4.0 + 1e-9);
        }
        // The identity is the unique displacement-0 element.
        assert_eq!(ball.iter().filter(|e| e.displacement == 0.0).count(), 1);
    }

    #[test]
    fn trace_window_is_a_filter_of_the_box_enumeration() {
        let budget = EnumerationBudget::default();
        let spec = GroupSpec::quaternion(2, 3).unwrap();
        let by_trace = enumerate_by_trace(&spec, 10.0, 20, &budget).unwrap();
        assert_eq!(by_trace.coordinate_bound, 20);
        let full = enumerate_quaternion(2, 3, 20, &budget).unwrap();
        let expected: std::collections::HashSet<[i64; 4]> = full
            .iter()
            .filter_map(|e| e.coords)
            .filter(|&[x, ..]| 2 * x.abs() > 2 && 2 * x.abs() <= 10)
            .collect();
        let mut got = std::collections::HashSet::new();
        for class in &by_trace.classes {
            assert!(class.abs_trace > 2 && class.abs_trace <= 10);
            for el in &class.elements {
                let coords = el.coords.unwrap();
                assert_eq!(2 * coords[0].abs(), class.abs_trace);
                got.insert(coords);
            }
        }
        assert_eq!(got, expected);
        assert!(!got.is_empty());
    }

    #[test]
    fn trace_window_at_two_is_empty() {
        let spec = GroupSpec::quaternion(2, 3).unwrap();
        let by_trace =
            enumerate_by_trace(&spec, 2.0, 20, &EnumerationBudget::default()).unwrap();
        assert!(by_trace.classes.is_empty());
    }

    #[test]
    fn psl2z_trace_window_matches_ball_filter() {
        let spec = psl2z();
        let by_trace = enumerate_by_trace(&spec, 6.0, 5, &EnumerationBudget::default()).unwrap();
        assert!(!by_trace.classes.is_empty());
        for class in &by_trace.classes {
            for el in &class.elements {
                let m = el.exact.unwrap();
                assert!(m.trace().abs() > 2 && m.trace().abs() <= 6);
                assert!(m.a.abs() <= 5 && m.b.abs() <= 5 && m.c.abs() <= 5 && m.d.abs() <= 5);
            }
        }
        // The golden element [[2,1],[1,1]] has trace 3 and fits in the box.
        assert!(by_trace
            .classes
            .iter()
            .any(|c| c.abs_trace == 3
                && c.elements.iter().any(|e| e.exact.unwrap() == IntMatrix::new(2, 1, 1, 1).unwrap())));
    }

    #[test]
    fn ball_growth_rate_is_near_one() {
        // ln N(R) should grow with slope ≈ δ = 1 for the modular group.
        let budget = EnumerationBudget::default();
        let n8 = enumerate_ball(&psl2z(), 8.0, &budget).unwrap().len() as f64;
        let n11 = enumerate_ball(&psl2z(), 11.0, &budget).unwrap().len() as f64;
        let slope = (n11.ln() - n8.ln()) / 3.0;
        assert!(
            (0.85..=1.15).contains(&slope),
            "orbital growth slope {slope} out of range (N8 = {n8}, N11 = {n11})"
        );
    }
}
