//! Geodesic line integrals, periods, and Gibbs cocycles.
//!
//! Constant parts of a potential integrate exactly (`c · length`); only tube
//! parts go through numeric quadrature. The checked integrator is composite
//! midpoint with step halving: starting from [`LineQuadrature::step`], the
//! step is halved until two consecutive refinements agree within
//! [`LineQuadrature::tolerance`], and the refined value is returned. If the
//! check never passes the integral reports
//! [`Error::QuadratureNonConvergent`].

use crate::geometry::{
    hdist, ray_point, through_points, Boundary, GeodesicLine, HPoint, Isometry, IsometryClass,
};
use crate::thermo::potential::{Potential, TubeBump};
use crate::{Error, Result};

/// Default truncation depth for Gibbs cocycles.
pub const COCYCLE_TRUNCATION_DEFAULT: f64 = 20.0;

/// A cocycle whose `T` vs `T−2` truncations disagree by more than this is
/// reported as non-convergent.
const COCYCLE_ERROR_TOLERANCE: f64 = 1e-4;

/// Maximum number of step halvings before the checked integrator gives up.
const MAX_HALVINGS: u32 = 8;

/// Fixed step used for bulk orbit weights and Birkhoff averages, where the
/// per-segment halving check would dominate the runtime. Accuracy is
/// cross-validated against the checked integrator in tests.
pub(crate) const BATCH_STEP: f64 = 0.05;

/// Step and refinement tolerance for checked line integrals.
#[derive(Clone, Copy, Debug)]
pub struct LineQuadrature {
    /// Initial midpoint step along the geodesic.
    pub step: f64,
    /// Allowed difference between consecutive step halvings.
    pub tolerance: f64,
}

impl Default for LineQuadrature {
    fn default() -> Self {
        LineQuadrature {
            step: 1e-2,
            tolerance: 1e-6,
        }
    }
}

fn bump_sum(bumps: &[&TubeBump], p: HPoint) -> f64 {
    let mut v = 0.0;
    for b in bumps {
        v += b.value(p);
    }
    v
}

/// Composite midpoint with a fixed step over `[t0, t1]` of `line`.
fn bump_integral_fixed(
    bumps: &[&TubeBump],
    line: &GeodesicLine,
    t0: f64,
    t1: f64,
    step: f64,
) -> f64 {
    let len = t1 - t0;
    let n = ((len / step).ceil() as usize).max(1);
    let h = len / n as f64;
    let mut acc = 0.0;
    for k in 0..n {
        acc += bump_sum(bumps, line.point_at(t0 + (k as f64 + 0.5) * h));
    }
    acc * h
}

/// Midpoint integration with step halving until two refinements agree.
fn bump_integral_checked(
    bumps: &[&TubeBump],
    line: &GeodesicLine,
    t0: f64,
    t1: f64,
    quad: &LineQuadrature,
) -> Result<f64> {
    let mut step = quad.step;
    let mut prev = bump_integral_fixed(bumps, line, t0, t1, step);
    let mut delta = f64::INFINITY;
    for _ in 0..MAX_HALVINGS {
        step *= 0.5;
        let cur = bump_integral_fixed(bumps, line, t0, t1, step);
        delta = (cur - prev).abs();
        if delta <= quad.tolerance {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNonConvergent { delta })
}

/// Checked integral of the tube parts over the segment `[x, y]`;
/// the caller adds the exact constant part.
fn segment_bumps_checked(
    bumps: &[&TubeBump],
    x: HPoint,
    y: HPoint,
    quad: &LineQuadrature,
) -> Result<f64> {
    if hdist(x, y) <= 1e-14 {
        return Ok(0.0);
    }
    let line = through_points(x, y)?;
    bump_integral_checked(bumps, &line, line.time_of(x), line.time_of(y), quad)
}

/// Fixed-step integral of the tube parts over `[x, y]` (bulk path).
pub(crate) fn segment_bumps_fixed(bumps: &[&TubeBump], x: HPoint, y: HPoint, step: f64) -> f64 {
    if hdist(x, y) <= 1e-14 {
        return 0.0;
    }
    let line = match through_points(x, y) {
        Ok(line) => line,
        Err(_) => return 0.0,
    };
    bump_integral_fixed(bumps, &line, line.time_of(x), line.time_of(y), step)
}

fn check_quadrature(quad: &LineQuadrature) -> Result<()> {
    if !(quad.step > 0.0) || !quad.step.is_finite() || !(quad.tolerance > 0.0) {
        return Err(Error::InvalidConfig(
            "quadrature step and tolerance must be positive".into(),
        ));
    }
    Ok(())
}

/// `∫_x^y F` along the geodesic segment from `x` to `y` (0 when `x = y`).
pub fn line_integral(f: &Potential, x: HPoint, y: HPoint, quad: &LineQuadrature) -> Result<f64> {
    check_quadrature(quad)?;
    let d = hdist(x, y);
    if d <= 0.0 {
        return Ok(0.0);
    }
    let (c, bumps) = f.split();
    let mut total = c * d;
    if !bumps.is_empty() {
        total += segment_bumps_checked(&bumps, x, y, quad)?;
    }
    Ok(total)
}

/// Period of a hyperbolic `gamma` for `f`: the integral of `f` over one
/// fundamental segment `[p, γ·p]` of the translation axis.
pub fn period(f: &Potential, gamma: &Isometry, quad: &LineQuadrature) -> Result<f64> {
    if gamma.classify() != IsometryClass::Hyperbolic {
        return Err(Error::NotHyperbolic {
            trace: gamma.trace(),
        });
    }
    let axis = gamma.axis()?;
    let p = axis.closest_point(HPoint::base());
    line_integral(f, p, gamma.apply(p), quad)
}

/// Cyclic-subgroup exponent: the larger of the two direction-averaged
/// periods of `f` along the axis of `gamma0`, divided by the translation
/// length.
pub fn delta0_cyclic(f: &Potential, gamma0: &Isometry, quad: &LineQuadrature) -> Result<f64> {
    if gamma0.classify() != IsometryClass::Hyperbolic {
        return Err(Error::NotHyperbolic {
            trace: gamma0.trace(),
        });
    }
    let ell = gamma0.translation_length()?;
    let axis = gamma0.axis()?;
    let p = axis.closest_point(HPoint::base());
    let forward = line_integral(f, p, gamma0.apply(p), quad)?;
    let backward = line_integral(f, p, gamma0.inverse().apply(p), quad)?;
    Ok(forward.max(backward) / ell)
}

/// Truncated Gibbs cocycle value with its truncation depth and an error
/// estimate from comparing depth `T` against `T − 2`.
#[derive(Clone, Copy, Debug)]
pub struct CocycleValue {
    pub value: f64,
    pub truncation: f64,
    pub error: f64,
}

/// One truncation level: `∫_y^{z_T}(F−δ) − ∫_x^{z_T}(F−δ)` where `z_T` is the
/// point at distance `T` from `x` along the ray toward `ξ` (so
/// `d(x, z_T) = T` exactly).
fn cocycle_truncated(
    f: &Potential,
    delta: f64,
    xi: Boundary,
    x: HPoint,
    y: HPoint,
    t: f64,
    quad: &LineQuadrature,
) -> Result<f64> {
    let z = ray_point(x, xi, t);
    let (c, bumps) = f.split();
    let mut value = (c - delta) * (hdist(y, z) - t);
    if !bumps.is_empty() {
        value += segment_bumps_checked(&bumps, y, z, quad)?
            - segment_bumps_checked(&bumps, x, z, quad)?;
    }
    Ok(value)
}

/// Gibbs cocycle `C_ξ(x, y)` for the normalized potential `F − δ`, truncated
/// at ray depth `t_trunc ≥ 5`.
pub fn gibbs_cocycle(
    f: &Potential,
    delta: f64,
    xi: Boundary,
    x: HPoint,
    y: HPoint,
    t_trunc: f64,
    quad: &LineQuadrature,
) -> Result<CocycleValue> {
    check_quadrature(quad)?;
    if !delta.is_finite() {
        return Err(Error::InvalidConfig("cocycle exponent must be finite".into()));
    }
    if !(t_trunc >= 5.0) || !t_trunc.is_finite() {
        return Err(Error::InvalidConfig(
            "cocycle truncation must be finite and at least 5".into(),
        ));
    }
    if x == y {
        return Ok(CocycleValue {
            value: 0.0,
            truncation: t_trunc,
            error: 0.0,
        });
    }
    let c_t = cocycle_truncated(f, delta, xi, x, y, t_trunc, quad)?;
    let c_prev = cocycle_truncated(f, delta, xi, x, y, t_trunc - 2.0, quad)?;
    let error = (c_t - c_prev).abs();
    if error > COCYCLE_ERROR_TOLERANCE {
        return Err(Error::NonConvergent {
            error,
            tolerance: COCYCLE_ERROR_TOLERANCE,
        });
    }
    Ok(CocycleValue {
        value: c_t,
        truncation: t_trunc,
        error,
    })
}

/// Radon–Nikodym derivative `d(g⁻¹)_*μ / dμ (ξ) = exp(−C_ξ(g⁻¹x₀, x₀))` of
/// the Gibbs/Patterson family for `F − δ`, using the default cocycle
/// truncation.
pub fn rn_derivative(
    f: &Potential,
    delta: f64,
    g: &Isometry,
    xi: Boundary,
    quad: &LineQuadrature,
) -> Result<f64> {
    let base = HPoint::base();
    let c = gibbs_cocycle(
        f,
        delta,
        xi,
        g.inverse().apply(base),
        base,
        COCYCLE_TRUNCATION_DEFAULT,
        quad,
    )?;
    Ok((-c.value).exp())
}

/// `(1/T) ∫_0^T F(ray(t)) dt` along the ray from the base point toward `xi`,
/// with the constant part exact and tube parts at the bulk step.
pub(crate) fn birkhoff_average(f: &Potential, xi: Boundary, t: f64, step: f64) -> f64 {
    let (c, bumps) = f.split();
    if bumps.is_empty() {
        return c;
    }
    let base = HPoint::base();
    let n = ((t / step).ceil() as usize).max(1);
    let h = t / n as f64;
    let mut acc = 0.0;
    for k in 0..n {
        acc += bump_sum(&bumps, ray_point(base, xi, (k as f64 + 0.5) * h));
    }
    c + acc * h / t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::busemann;
    use crate::groups::{enumerate_ball, EnumerationBudget, GroupSpec};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn golden() -> Isometry {
        Isometry::new(2.0, 1.0, 1.0, 1.0).unwrap()
    }

    fn golden_tube(depth: f64) -> Potential {
        Potential::tube(&GroupSpec::psl2z(), &golden(), depth).unwrap()
    }

    fn quad() -> LineQuadrature {
        LineQuadrature::default()
    }

    fn random_point(rng: &mut StdRng) -> HPoint {
        HPoint {
            u: rng.gen_range(-2.0..2.0),
            v: rng.gen_range(0.2..4.0),
        }
    }

    #[test]
    fn constant_potential_integrates_exactly() {
        let f = Potential::constant(1.7).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..30 {
            let (x, y) = (random_point(&mut rng), random_point(&mut rng));
            let d = hdist(x, y);
            let got = line_integral(&f, x, y, &quad()).unwrap();
            assert!((got - 1.7 * d).abs() <= 1e-12 * (1.0 + d));
        }
    }

    #[test]
    fn coincident_endpoints_integrate_to_zero() {
        let f = golden_tube(0.5);
        let p = HPoint { u: 0.3, v: 1.4 };
        assert_eq!(line_integral(&f, p, p, &quad()).unwrap(), 0.0);
    }

    #[test]
    fn tube_integral_is_flip_symmetric() {
        let f = golden_tube(0.5);
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..10 {
            let (x, y) = (random_point(&mut rng), random_point(&mut rng));
            let fwd = line_integral(&f, x, y, &quad()).unwrap();
            let bwd = line_integral(&f, y, x, &quad()).unwrap();
            assert!((fwd - bwd).abs() < 1e-6, "flip asymmetry: {fwd} vs {bwd}");
        }
    }

    #[test]
    fn tube_integral_matches_fine_step_oracle() {
        let f = golden_tube(0.5);
        let (_, bumps) = f.split();
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..4 {
            let x = random_point(&mut rng);
            let y = random_point(&mut rng);
            if hdist(x, y) < 0.1 {
                continue;
            }
            let line = through_points(x, y).unwrap();
            let oracle = bump_integral_fixed(&bumps, &line, line.time_of(x), line.time_of(y), 1e-4);
            let got = line_integral(&f, x, y, &quad()).unwrap();
            assert!(
                (got - oracle).abs() < 1e-5,
                "quadrature off: {got} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn integral_is_additive_along_a_geodesic() {
        let f = golden_tube(0.4).plus_constant(0.2).unwrap();
        let base = HPoint::base();
        let xi = Boundary::Finite(0.77);
        let x = ray_point(base, xi, 0.1);
        let y = ray_point(base, xi, 1.4);
        let z = ray_point(base, xi, 3.0);
        let whole = line_integral(&f, x, z, &quad()).unwrap();
        let first = line_integral(&f, x, y, &quad()).unwrap();
        let second = line_integral(&f, y, z, &quad()).unwrap();
        assert!(
            (whole - first - second).abs() < 1e-6,
            "additivity violated: {whole} vs {}",
            first + second
        );
    }

    #[test]
    fn period_of_zero_potential_vanishes() {
        assert_eq!(period(&Potential::zero(), &golden(), &quad()).unwrap(), 0.0);
    }

    #[test]
    fn period_shifts_by_constant_times_length() {
        let f = golden_tube(0.5);
        let g = f.clone().plus_constant(0.3).unwrap();
        let ell = golden().translation_length().unwrap();
        let pf = period(&f, &golden(), &quad()).unwrap();
        let pg = period(&g, &golden(), &quad()).unwrap();
        assert!((pg - pf - 0.3 * ell).abs() < 1e-9);
    }

    #[test]
    fn period_of_tube_on_its_own_axis_vanishes() {
        let f = golden_tube(0.5);
        let p = period(&f, &golden(), &quad()).unwrap();
        assert!(p.abs() < 1e-6, "period on own axis: {p}");
    }

    #[test]
    fn period_rejects_non_hyperbolic() {
        let rot = Isometry::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            period(&Potential::zero(), &rot, &quad()),
            Err(Error::NotHyperbolic { .. })
        ));
    }

    #[test]
    fn cyclic_exponent_of_constants() {
        assert_eq!(
            delta0_cyclic(&Potential::zero(), &golden(), &quad()).unwrap(),
            0.0
        );
        let c = delta0_cyclic(&Potential::constant(0.8).unwrap(), &golden(), &quad()).unwrap();
        assert!((c - 0.8).abs() < 1e-12);
    }

    #[test]
    fn cocycle_vanishes_at_equal_points() {
        let f = golden_tube(0.5);
        let p = HPoint { u: -0.4, v: 2.2 };
        let c = gibbs_cocycle(&f, 0.7, Boundary::Finite(0.3), p, p, 20.0, &quad()).unwrap();
        assert_eq!(c.value, 0.0);
        assert_eq!(c.error, 0.0);
    }

    #[test]
    fn cocycle_of_zero_potential_is_the_busemann_function() {
        let f = Potential::zero();
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..20 {
            let x = random_point(&mut rng);
            let y = random_point(&mut rng);
            let xi = Boundary::Finite(rng.gen_range(-3.0..3.0));
            let c = gibbs_cocycle(&f, 1.0, xi, x, y, 20.0, &quad()).unwrap();
            let beta = busemann(xi, x, y);
            assert!(
                (c.value - beta).abs() < 1e-6,
                "cocycle {} vs busemann {}",
                c.value,
                beta
            );
        }
    }

    #[test]
    fn cocycle_is_invariant_under_matched_constant_shift() {
        let f = golden_tube(0.5);
        let g = f.clone().plus_constant(0.6).unwrap();
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..8 {
            let x = random_point(&mut rng);
            let y = random_point(&mut rng);
            let xi = Boundary::Finite(rng.gen_range(-2.0..2.0));
            let a = gibbs_cocycle(&f, 0.9, xi, x, y, 20.0, &quad()).unwrap();
            let b = gibbs_cocycle(&g, 1.5, xi, x, y, 20.0, &quad()).unwrap();
            assert!(
                (a.value - b.value).abs() < 1e-9,
                "shift not cancelled: {} vs {}",
                a.value,
                b.value
            );
        }
    }

    #[test]
    fn cocycle_identity_over_three_points() {
        let f = golden_tube(0.5);
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..6 {
            let x = random_point(&mut rng);
            let y = random_point(&mut rng);
            let z = random_point(&mut rng);
            let xi = Boundary::Finite(rng.gen_range(-2.0..2.0));
            let cxz = gibbs_cocycle(&f, 0.8, xi, x, z, 20.0, &quad()).unwrap();
            let cxy = gibbs_cocycle(&f, 0.8, xi, x, y, 20.0, &quad()).unwrap();
            let cyz = gibbs_cocycle(&f, 0.8, xi, y, z, 20.0, &quad()).unwrap();
            let tol = cxz.error + cxy.error + cyz.error + 1e-6;
            assert!(
                (cxz.value - cxy.value - cyz.value).abs() <= tol,
                "cocycle identity violated"
            );
        }
    }

    #[test]
    fn cocycle_is_equivariant_under_the_group() {
        let f = golden_tube(0.5);
        let moves =
            enumerate_ball(&GroupSpec::psl2z(), 3.0, &EnumerationBudget::default()).unwrap();
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..6 {
            let x = random_point(&mut rng);
            let y = random_point(&mut rng);
            let xi = Boundary::Finite(rng.gen_range(-2.0..2.0));
            let g = moves[rng.gen_range(0..moves.len())].g;
            let plain = gibbs_cocycle(&f, 0.8, xi, x, y, 20.0, &quad()).unwrap();
            let moved = gibbs_cocycle(
                &f,
                0.8,
                g.boundary_apply(xi),
                g.apply(x),
                g.apply(y),
                20.0,
                &quad(),
            )
            .unwrap();
            assert!(
                (plain.value - moved.value).abs() < 1e-5,
                "not equivariant: {} vs {}",
                plain.value,
                moved.value
            );
        }
    }

    #[test]
    fn rn_derivative_of_identity_is_one() {
        let f = golden_tube(0.5);
        let id = Isometry::identity();
        let r = rn_derivative(&f, 0.9, &id, Boundary::Finite(0.4), &quad()).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn rn_derivative_of_zero_potential_is_exp_busemann() {
        let g = golden();
        let xi = Boundary::Finite(-0.7);
        let base = HPoint::base();
        let r = rn_derivative(&Potential::zero(), 1.0, &g, xi, &quad()).unwrap();
        let beta = busemann(xi, g.inverse().apply(base), base);
        assert!((r - (-beta).exp()).abs() < 1e-6 * (-beta).exp().max(1.0));
    }

    #[test]
    fn log_rn_derivative_at_attracting_point_is_the_normalized_period() {
        // With the potential replaced by F − δ̂, the log derivative at γ⁺
        // equals the period of F − δ̂ over one loop of the axis.
        let f = golden_tube(0.3);
        let delta_hat = 0.9;
        let g = golden();
        let (plus, _) = g.fixed_points().unwrap();
        let r = rn_derivative(&f, delta_hat, &g, plus, &quad()).unwrap();
        let shifted = f.clone().plus_constant(-delta_hat).unwrap();
        let per = period(&shifted, &g, &quad()).unwrap();
        assert!(
            (r.ln() - per).abs() < 1e-3,
            "ln rn = {} vs normalized period {}",
            r.ln(),
            per
        );
    }

    #[test]
    fn birkhoff_average_of_constant_is_exact() {
        let f = Potential::constant(-0.45).unwrap();
        assert_eq!(birkhoff_average(&f, Boundary::Finite(0.2), 12.0, 0.05), -0.45);
    }

    #[test]
    fn rejects_bad_truncation_and_quadrature() {
        let f = Potential::zero();
        let p = HPoint::base();
        let q = HPoint { u: 1.0, v: 1.0 };
        assert!(gibbs_cocycle(&f, 1.0, Boundary::Finite(0.0), p, q, 4.0, &quad()).is_err());
        let bad = LineQuadrature {
            step: 0.0,
            tolerance: 1e-6,
        };
        assert!(line_integral(&f, p, q, &bad).is_err());
    }
}
