//! Configuration: JSON config files, spec-string parsing, and the
//! flag-over-file precedence rules.
//!
//! Precedence, highest first: command-line flag, config-file field,
//! built-in default. Config files are validated against the
//! `spiralis/config/1` schema and reject unknown keys.

use std::path::PathBuf;

use serde::Deserialize;
use spiralis::groups::{EnumerationBudget, GroupSpec, IntMatrix};
use spiralis::lab::RateFunction;
use spiralis::thermo::Potential;
use spiralis::{Error, Result};

/// Schema tag a config file must carry.
pub const CONFIG_SCHEMA: &str = "spiralis/config/1";

/// Raw config file contents; every field is optional except the schema.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: String,
    /// When present, must name the invoked subcommand.
    pub experiment: Option<String>,
    pub group: Option<String>,
    pub potential: Option<String>,
    pub gamma0: Option<String>,
    pub phi: Option<String>,
    pub seed: Option<u64>,
    pub tmax: Option<f64>,
    pub samples: Option<usize>,
    pub out: Option<String>,
    pub plot: Option<String>,
    pub budgets: Option<BudgetConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    pub radius_cap: Option<f64>,
    pub element_cap: Option<u64>,
    pub time_cap_seconds: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &std::path::Path) -> Result<ConfigFile> {
        let bytes = std::fs::read(path)?;
        let config: ConfigFile = serde_json::from_slice(&bytes)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        if config.schema != CONFIG_SCHEMA {
            return Err(Error::InvalidConfig(format!(
                "unsupported config schema {:?}, expected {CONFIG_SCHEMA:?}",
                config.schema
            )));
        }
        if let Some(budgets) = &config.budgets {
            for (name, value) in [
                ("radius_cap", budgets.radius_cap),
                ("time_cap_seconds", budgets.time_cap_seconds),
            ] {
                if let Some(v) = value {
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(Error::InvalidConfig(format!(
                            "budget {name} must be positive and finite, got {v}"
                        )));
                    }
                }
            }
            if budgets.element_cap == Some(0) {
                return Err(Error::InvalidConfig(
                    "budget element_cap must be positive".into(),
                ));
            }
        }
        Ok(config)
    }
}

/// Flag values merged over config-file values; `None` means "use the
/// subcommand default".
#[derive(Debug, Default)]
pub struct Settings {
    pub group: Option<String>,
    pub potential: Option<String>,
    pub gamma0: Option<String>,
    pub phi: Option<String>,
    pub seed: Option<u64>,
    pub tmax: Option<f64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub radius_cap: Option<f64>,
    pub element_cap: Option<u64>,
    pub time_cap_seconds: Option<f64>,
}

impl Settings {
    /// Fill unset fields from a config file.
    pub fn merge_config(&mut self, config: ConfigFile, subcommand: &str) -> Result<()> {
        if let Some(experiment) = &config.experiment {
            if experiment != subcommand {
                return Err(Error::InvalidConfig(format!(
                    "config is for experiment {experiment:?} but the {subcommand:?} subcommand was invoked"
                )));
            }
        }
        fill(&mut self.group, config.group);
        fill(&mut self.potential, config.potential);
        fill(&mut self.gamma0, config.gamma0);
        fill(&mut self.phi, config.phi);
        fill(&mut self.seed, config.seed);
        fill(&mut self.tmax, config.tmax);
        fill(&mut self.samples, config.samples);
        fill(&mut self.out, config.out.map(PathBuf::from));
        fill(&mut self.plot, config.plot.map(PathBuf::from));
        if let Some(budgets) = config.budgets {
            fill(&mut self.radius_cap, budgets.radius_cap);
            fill(&mut self.element_cap, budgets.element_cap);
            fill(&mut self.time_cap_seconds, budgets.time_cap_seconds);
        }
        Ok(())
    }

    pub fn group_required(&self) -> Result<GroupSpec> {
        match &self.group {
            Some(spec) => parse_group(spec),
            None => Err(Error::InvalidConfig(
                "a group is required: pass --group or set \"group\" in the config".into(),
            )),
        }
    }

    pub fn group_or_modular(&self) -> Result<GroupSpec> {
        match &self.group {
            Some(spec) => parse_group(spec),
            None => Ok(GroupSpec::psl2z()),
        }
    }

    pub fn gamma0_or_golden(&self) -> Result<IntMatrix> {
        match &self.gamma0 {
            Some(spec) => parse_gamma0(spec),
            None => IntMatrix::new(2, 1, 1, 1),
        }
    }

    /// Resolve the potential string against `group` (tube potentials wrap
    /// the axis of `gamma0` invariantly over the group).
    pub fn potential_or_zero(&self, group: &GroupSpec) -> Result<Potential> {
        match &self.potential {
            Some(spec) => parse_potential(spec, group, &self.gamma0_or_golden()?),
            None => Ok(Potential::zero()),
        }
    }

    pub fn phi_required(&self) -> Result<RateFunction> {
        match &self.phi {
            Some(spec) => parse_phi(spec),
            None => Err(Error::InvalidConfig(
                "a rate function is required: pass --phi or set \"phi\" in the config".into(),
            )),
        }
    }

    pub fn tmax_required(&self) -> Result<f64> {
        match self.tmax {
            Some(t) if t.is_finite() && t > 0.0 => Ok(t),
            Some(t) => Err(Error::InvalidConfig(format!(
                "tmax must be positive and finite, got {t}"
            ))),
            None => Err(Error::InvalidConfig(
                "a horizon is required: pass --tmax or set \"tmax\" in the config".into(),
            )),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    pub fn budget(&self) -> Result<EnumerationBudget> {
        let budget = EnumerationBudget {
            radius_cap: self.radius_cap.unwrap_or(20.0),
            element_cap: self.element_cap.unwrap_or(400_000_000),
        };
        if !(budget.radius_cap > 0.0) || !budget.radius_cap.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "budget radius_cap must be positive and finite, got {}",
                budget.radius_cap
            )));
        }
        if budget.element_cap == 0 {
            return Err(Error::InvalidConfig("budget element_cap must be positive".into()));
        }
        Ok(budget)
    }
}

fn fill<T>(slot: &mut Option<T>, value: Option<T>) {
    if slot.is_none() {
        *slot = value;
    }
}

/// `psl2z`, `congruence:N`, or `quaternion:a,b`.
pub fn parse_group(spec: &str) -> Result<GroupSpec> {
    if spec == "psl2z" {
        return Ok(GroupSpec::psl2z());
    }
    if let Some(level) = spec.strip_prefix("congruence:") {
        let level: i64 = level
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad congruence level in {spec:?}")))?;
        return GroupSpec::congruence(level);
    }
    if let Some(pair) = spec.strip_prefix("quaternion:") {
        let parts = parse_i64_list(pair)?;
        if parts.len() != 2 {
            return Err(Error::InvalidConfig(format!(
                "quaternion group needs two parameters a,b, got {spec:?}"
            )));
        }
        return GroupSpec::quaternion(parts[0], parts[1]);
    }
    Err(Error::InvalidConfig(format!(
        "unknown group {spec:?}; expected psl2z, congruence:N, or quaternion:a,b"
    )))
}

/// `zero`, `const:c`, or `tube:K`.
pub fn parse_potential(spec: &str, group: &GroupSpec, gamma0: &IntMatrix) -> Result<Potential> {
    if spec == "zero" {
        return Ok(Potential::zero());
    }
    if let Some(c) = spec.strip_prefix("const:") {
        let c: f64 = c
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad constant in {spec:?}")))?;
        return Potential::constant(c);
    }
    if let Some(k) = spec.strip_prefix("tube:") {
        let k: f64 = k
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad tube depth in {spec:?}")))?;
        return Potential::tube(group, &gamma0.to_isometry()?, k);
    }
    Err(Error::InvalidConfig(format!(
        "unknown potential {spec:?}; expected zero, const:c, or tube:K"
    )))
}

/// `golden` or four integers `a,b,c,d`.
pub fn parse_gamma0(spec: &str) -> Result<IntMatrix> {
    if spec == "golden" {
        return IntMatrix::new(2, 1, 1, 1);
    }
    let parts = parse_i64_list(spec)?;
    if parts.len() != 4 {
        return Err(Error::InvalidConfig(format!(
            "gamma0 needs four integers a,b,c,d or the preset \"golden\", got {spec:?}"
        )));
    }
    IntMatrix::new(parts[0], parts[1], parts[2], parts[3])
}

/// `powerlog:s` or `power:eps`.
pub fn parse_phi(spec: &str) -> Result<RateFunction> {
    if let Some(s) = spec.strip_prefix("powerlog:") {
        let s: f64 = s
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad power-log exponent in {spec:?}")))?;
        return RateFunction::power_log(s);
    }
    if let Some(eps) = spec.strip_prefix("power:") {
        let eps: f64 = eps
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad power exponent in {spec:?}")))?;
        return RateFunction::power(eps);
    }
    Err(Error::InvalidConfig(format!(
        "unknown rate function {spec:?}; expected powerlog:s or power:eps"
    )))
}

pub fn parse_i64_list(spec: &str) -> Result<Vec<i64>> {
    spec.split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidConfig(format!("bad integer {part:?} in {spec:?}")))
        })
        .collect()
}

pub fn parse_f64_list(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("bad number {part:?} in {spec:?}")))
        })
        .collect()
}

pub fn parse_usize_list(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("bad count {part:?} in {spec:?}")))
        })
        .collect()
}

/// `lo,hi` with `lo < hi`.
pub fn parse_pair(spec: &str) -> Result<(f64, f64)> {
    let parts = parse_f64_list(spec)?;
    if parts.len() != 2 || !(parts[0] < parts[1]) {
        return Err(Error::InvalidConfig(format!(
            "expected an ordered pair lo,hi, got {spec:?}"
        )));
    }
    Ok((parts[0], parts[1]))
}
