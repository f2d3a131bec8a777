//! Deterministic boundary sampling.
//!
//! Every sample draws from its own counter-based RNG stream keyed by
//! `(seed, sample index)`: stream `i` of a ChaCha8 generator seeded with
//! `seed`. Parallel experiments can therefore evaluate samples in any order
//! (or not at all) without perturbing the values of the others.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Boundary;
use crate::groups::{EnumerationBudget, GroupSpec};
use crate::thermo::{
    critical_exponent, patterson_empirical, EmpiricalPattersonMeasure, Potential, WeightedOrbit,
};
use crate::{Error, Result};

/// What to sample boundary points from.
#[derive(Clone, Copy, Debug)]
pub enum SampleSpec<'a> {
    /// Uniform (Lebesgue) on the real interval `(a, b)`.
    LebesgueWindow(f64, f64),
    /// Atoms of an empirical boundary measure, proportionally to weight.
    Empirical(&'a EmpiricalPattersonMeasure),
}

/// The dedicated RNG stream of sample `index` under `seed`.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `n` boundary points drawn from `spec`, deterministically in `(seed,
/// index)`: the k-th output only ever depends on `seed` and `k`.
pub fn sample_boundary(spec: SampleSpec<'_>, n: usize, seed: u64) -> Result<Vec<Boundary>> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1".into()));
    }
    match spec {
        SampleSpec::LebesgueWindow(a, b) => {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidConfig(format!(
                    "Lebesgue window must be a finite nonempty interval, got ({a}, {b})"
                )));
            }
            Ok((0..n)
                .map(|i| {
                    let u: f64 = sample_stream(seed, i as u64).gen();
                    Boundary::Finite(a + (b - a) * u)
                })
                .collect())
        }
        SampleSpec::Empirical(measure) => {
            let atoms = measure.atoms();
            // Cumulative weights once; each sample is then one uniform draw
            // and a binary search.
            let mut cumulative = Vec::with_capacity(atoms.len());
            let mut total = 0.0;
            for atom in atoms {
                total += atom.weight;
                cumulative.push(total);
            }
            if !(total > 0.0) {
                return Err(Error::InvalidConfig(
                    "empirical sampling needs a measure with positive mass".into(),
                ));
            }
            Ok((0..n)
                .map(|i| {
                    let u: f64 = sample_stream(seed, i as u64).gen();
                    let target = u * total;
                    let k = cumulative.partition_point(|&c| c <= target);
                    atoms[k.min(atoms.len() - 1)].xi
                })
                .collect())
        }
    }
}

/// Window-restricted sample abscissae for an experiment: Lebesgue on the
/// window for constant potentials (their boundary measure class is
/// Lebesgue), atoms of an empirical boundary measure conditioned on the
/// window otherwise. Returns the abscissae and a provenance label for the
/// report echo. Each sample is a deterministic function of `(seed, index)`.
pub(crate) fn draw_window_abscissae(
    spec: &GroupSpec,
    potential: &Potential,
    window: (f64, f64),
    n: usize,
    seed: u64,
    patterson_radius: f64,
    budget: &EnumerationBudget,
) -> Result<(Vec<f64>, String)> {
    let (wa, wb) = window;
    if potential.as_constant().is_some() {
        let xs = (0..n)
            .map(|i| {
                let u: f64 = sample_stream(seed, i as u64).gen();
                wa + (wb - wa) * u
            })
            .collect();
        return Ok((xs, "lebesgue".to_string()));
    }

    let radius = patterson_radius;
    let weighted = WeightedOrbit::from_ball(spec, radius, potential, budget)?;
    let fit = critical_exponent(&weighted, (radius * 0.5, radius), 0.5)?;
    let s = fit.delta_hat + 0.05;
    let measure = patterson_empirical(&weighted, s, radius)?;
    let label = format!("patterson:s={s},T={radius}");

    let atoms = measure.atoms();
    let mut cumulative = Vec::with_capacity(atoms.len());
    let mut total = 0.0;
    for atom in atoms {
        total += atom.weight;
        cumulative.push(total);
    }
    let xs = (0..n)
        .map(|i| {
            let mut rng = sample_stream(seed, i as u64);
            // Condition on the window by per-stream rejection; each sample
            // stays a deterministic function of (seed, index).
            for _ in 0..100_000 {
                let target: f64 = rng.gen::<f64>() * total;
                let k = cumulative.partition_point(|&c| c <= target);
                if let Boundary::Finite(x) = atoms[k.min(atoms.len() - 1)].xi {
                    if x >= wa && x <= wb {
                        return Ok(x);
                    }
                }
            }
            Err(Error::InvalidConfig(format!(
                "empirical measure has negligible mass on the window ({wa}, {wb})"
            )))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((xs, label))
}
