//! Shrinking-target rate functions φ with values in (0, 1].

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fixed constants of the doubling-type admissibility check: a rate is
/// admissible when doubling the argument never shrinks φ below
/// `DOUBLING_FLOOR` times its previous value. The parametric families below
/// satisfy this for every valid parameter; table rates are checked sample by
/// sample on their own grid.
pub(crate) const DOUBLING_RATIO: f64 = 0.5;
pub(crate) const DOUBLING_FLOOR: f64 = 0.01;

/// A nonincreasing rate function `φ : (0, ∞) → (0, 1]` controlling how fast
/// shrinking targets shrink.
///
/// * `PowerLog(s)`: `φ(t) = min{1, ln(t+e)^{−s}}` — the slowly varying
///   family; `s = 0` gives `φ ≡ 1`.
/// * `Power(ε)`: `φ(t) = min{1, t^{−ε}}`.
/// * `Table`: piecewise log-log interpolation through positive samples,
///   clamped to the first/last value outside the grid.
/// * `Scaled`: `λ·φ` with `λ ∈ (0, 1]`, for sensitivity experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RateFunction {
    PowerLog { s: f64 },
    Power { eps: f64 },
    Table { samples: Vec<(f64, f64)> },
    Scaled { base: Box<RateFunction>, lambda: f64 },
}

impl RateFunction {
    /// `φ(t) = min{1, ln(t+e)^{−s}}`.
    pub fn power_log(s: f64) -> Result<Self> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "power-log rate needs a finite exponent s ≥ 0, got {s}"
            )));
        }
        Ok(Self::PowerLog { s })
    }

    /// `φ(t) = min{1, t^{−ε}}`.
    pub fn power(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "power rate needs a finite exponent ε ≥ 0, got {eps}"
            )));
        }
        Ok(Self::Power { eps })
    }

    /// Tabulated rate through `(t, φ(t))` samples with strictly increasing
    /// positive abscissae and values in (0, 1].
    pub fn table(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidConfig("table rate needs at least one sample".into()));
        }
        for window in samples.windows(2) {
            if !(window[1].0 > window[0].0) {
                return Err(Error::InvalidConfig(format!(
                    "table abscissae must strictly increase, got {} then {}",
                    window[0].0, window[1].0
                )));
            }
        }
        for &(t, v) in &samples {
            if !(t > 0.0) || !t.is_finite() || !(v > 0.0) || v > 1.0 {
                return Err(Error::InvalidConfig(format!(
                    "table samples need t > 0 and φ ∈ (0, 1], got ({t}, {v})"
                )));
            }
        }
        Ok(Self::Table { samples })
    }

    /// `λ·φ` with `λ ∈ (0, 1]`.
    pub fn scaled(self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || lambda > 1.0 || !lambda.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "scale factor must lie in (0, 1], got {lambda}"
            )));
        }
        Ok(Self::Scaled { base: Box::new(self), lambda })
    }

    /// `φ(t)`; always in (0, 1] for valid variants and `t > 0`.
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::PowerLog { s } => {
                let l = (t + std::f64::consts::E).ln();
                l.powf(-s).min(1.0)
            }
            Self::Power { eps } => t.powf(-eps).min(1.0),
            Self::Table { samples } => {
                if t <= samples[0].0 {
                    return samples[0].1;
                }
                if t >= samples[samples.len() - 1].0 {
                    return samples[samples.len() - 1].1;
                }
                let i = samples.partition_point(|&(u, _)| u <= t);
                let (t0, v0) = samples[i - 1];
                let (t1, v1) = samples[i];
                // Log-log interpolation keeps values positive and makes
                // power-law tables exact between their own samples.
                let w = (t.ln() - t0.ln()) / (t1.ln() - t0.ln());
                (v0.ln() + w * (v1.ln() - v0.ln())).exp()
            }
            Self::Scaled { base, lambda } => lambda * base.value(t),
        }
    }

    /// Doubling-type admissibility: halving the argument scale (going from
    /// `t` to any `s ∈ [t, t/DOUBLING_RATIO]`) never shrinks φ below
    /// `DOUBLING_FLOOR · φ(t)`. The parametric families satisfy this for all
    /// valid parameters (the power-log ratio tends to 1, the power ratio is
    /// the constant `2^{−ε}` and `DOUBLING_FLOOR = 0.01` admits `ε` up to
    /// `log₂ 100 ≈ 6.6`); tables are checked on their own grid.
    pub fn is_admissible(&self) -> bool {
        match self {
            Self::PowerLog { s } => s.is_finite() && *s >= 0.0,
            Self::Power { eps } => {
                eps.is_finite() && *eps >= 0.0 && DOUBLING_RATIO.powf(*eps) >= DOUBLING_FLOOR
            }
            Self::Table { samples } => {
                // Between grid neighbours, bound the log-log slope so that a
                // doubling of t costs at most the admissibility floor.
                let max_drop = DOUBLING_FLOOR.ln().abs();
                samples.windows(2).all(|w| {
                    let (t0, v0) = w[0];
                    let (t1, v1) = w[1];
                    let octaves = (t1 / t0).log2();
                    (v0 / v1).ln() <= max_drop * octaves.max(f64::EPSILON)
                })
            }
            Self::Scaled { base, .. } => base.is_admissible(),
        }
    }

    /// Compact `family:parameter` label used in report echoes.
    pub fn label(&self) -> String {
        match self {
            Self::PowerLog { s } => format!("powerlog:{s}"),
            Self::Power { eps } => format!("power:{eps}"),
            Self::Table { samples } => format!("table:{}", samples.len()),
            Self::Scaled { base, lambda } => format!("scaled:{lambda}:{}", base.label()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_log_matches_its_closed_form() {
        let phi = RateFunction::power_log(1.5).unwrap();
        for t in [0.1, 1.0, 7.0, 1e4] {
            let expect = (t + std::f64::consts::E).ln().powf(-1.5).min(1.0);
            assert!((phi.value(t) - expect).abs() <= 1e-15);
            assert!(phi.value(t) > 0.0 && phi.value(t) <= 1.0);
        }
        // s = 0 is the constant rate 1.
        let one = RateFunction::power_log(0.0).unwrap();
        for t in [0.2, 3.0, 1e6] {
            assert_eq!(one.value(t), 1.0);
        }
    }

    #[test]
    fn power_clamps_to_one_below_unit_argument() {
        let phi = RateFunction::power(0.5).unwrap();
        assert_eq!(phi.value(0.3), 1.0);
        assert!((phi.value(4.0) - 0.5).abs() <= 1e-15);
    }

    #[test]
    fn table_interpolates_power_laws_exactly_on_the_grid() {
        // Samples of t^{-1/2}: log-log interpolation reproduces the law
        // between samples up to float rounding.
        let samples: Vec<(f64, f64)> =
            [1.0f64, 4.0, 16.0, 64.0].iter().map(|&t| (t, t.powf(-0.5).min(1.0))).collect();
        let phi = RateFunction::table(samples).unwrap();
        for t in [2.0, 7.5, 30.0] {
            assert!((phi.value(t) - t.powf(-0.5)).abs() <= 1e-12, "at t = {t}");
        }
        // Clamped outside the grid.
        assert_eq!(phi.value(0.5), 1.0);
        assert_eq!(phi.value(1e3), 64f64.powf(-0.5));
    }

    #[test]
    fn admissibility_flags_fast_decay_tables() {
        let gentle = RateFunction::table(vec![(1.0, 1.0), (2.0, 0.5), (4.0, 0.25)]).unwrap();
        assert!(gentle.is_admissible());
        // A drop by 10⁴ across one doubling violates the doubling condition.
        let cliff = RateFunction::table(vec![(1.0, 1.0), (2.0, 1e-4)]).unwrap();
        assert!(!cliff.is_admissible());
        assert!(RateFunction::power_log(3.0).unwrap().is_admissible());
        assert!(RateFunction::power(1.0).unwrap().is_admissible());
        assert!(!RateFunction::power(9.0).unwrap().is_admissible());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(RateFunction::power_log(-1.0).is_err());
        assert!(RateFunction::power(f64::NAN).is_err());
        assert!(RateFunction::table(vec![]).is_err());
        assert!(RateFunction::table(vec![(1.0, 1.5)]).is_err());
        assert!(RateFunction::table(vec![(2.0, 0.5), (1.0, 0.5)]).is_err());
        assert!(RateFunction::power(0.5).unwrap().scaled(0.0).is_err());
        assert!(RateFunction::power(0.5).unwrap().scaled(1.5).is_err());
    }

    #[test]
    fn scaling_multiplies_values_pointwise() {
        let base = RateFunction::power_log(1.0).unwrap();
        let half = base.clone().scaled(0.5).unwrap();
        for t in [0.7, 3.0, 1e5] {
            assert_eq!(half.value(t), 0.5 * base.value(t));
        }
        assert!(half.is_admissible());
    }
}
