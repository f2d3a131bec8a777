//! Experiment reports: a settings echo, per-sample traces, aggregate
//! quantiles, and a verdict, serialized to byte-stable JSON.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Schema tag stamped into every report.
pub const REPORT_SCHEMA: &str = "spiralis/report/1";

/// Statistical verdict of a two-branch experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "DIVERGENT-CONSISTENT")]
    DivergentConsistent,
    #[serde(rename = "CONVERGENT-CONSISTENT")]
    ConvergentConsistent,
    #[serde(rename = "CONSISTENT")]
    Consistent,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::DivergentConsistent => "DIVERGENT-CONSISTENT",
            Verdict::ConvergentConsistent => "CONVERGENT-CONSISTENT",
            Verdict::Consistent => "CONSISTENT",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        f.write_str(s)
    }
}

/// One sample's statistic evaluated along the experiment grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleTrace {
    pub index: usize,
    pub values: Vec<f64>,
}

/// Aggregate quantiles of the per-sample statistics at one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub at: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
}

/// A complete, reproducible experiment record. Field order, `Vec` ordering,
/// and the absence of any map type make `to_json_bytes` deterministic; the
/// per-sample RNG streams make the contents deterministic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    /// Experiment family: `"khintchine"`, `"loglaw"`, or `"cf-runs"`.
    pub kind: String,
    /// Ordered echo of every setting that influenced the run.
    pub settings: Vec<(String, String)>,
    /// Pre-registered verdict constants, echoed so the report is
    /// self-describing.
    pub thresholds: Vec<(String, f64)>,
    /// Grid the per-sample statistics are evaluated on (schedule of
    /// complexity cutoffs, times, or digit counts).
    pub grid: Vec<f64>,
    pub per_sample: Vec<SampleTrace>,
    /// One row per grid point; empty when there are no samples.
    pub quantiles: Vec<QuantileRow>,
    /// `None` when the experiment ran on zero samples.
    pub verdict: Option<Verdict>,
}

impl ExperimentReport {
    pub fn new(kind: &str) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_owned(),
            kind: kind.to_owned(),
            settings: Vec::new(),
            thresholds: Vec::new(),
            grid: Vec::new(),
            per_sample: Vec::new(),
            quantiles: Vec::new(),
            verdict: None,
        }
    }

    pub fn setting(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.settings.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn threshold(&mut self, key: &str, value: f64) -> &mut Self {
        self.thresholds.push((key.to_owned(), value));
        self
    }

    /// Fills `quantiles` from `per_sample` (one row per grid point).
    /// Quantiles use the nearest-rank-with-averaging convention: the median
    /// of an even count averages the two central order statistics; q05/q95
    /// take the order statistic at ⌊q·(n−1) + 0.5⌋.
    pub fn summarize(&mut self) {
        self.quantiles.clear();
        if self.per_sample.is_empty() {
            return;
        }
        for (k, &at) in self.grid.iter().enumerate() {
            let mut column: Vec<f64> =
                self.per_sample.iter().map(|trace| trace.values[k]).collect();
            column.sort_by(f64::total_cmp);
            self.quantiles.push(QuantileRow {
                at,
                q05: rank_quantile(&column, 0.05),
                q50: median_sorted(&column),
                q95: rank_quantile(&column, 0.95),
            });
        }
    }

    /// Medians along the grid (empty when there are no samples).
    pub fn medians(&self) -> Vec<f64> {
        self.quantiles.iter().map(|row| row.q50).collect()
    }

    /// Byte-stable JSON (pretty-printed, trailing newline).
    pub fn to_json_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self).map_err(Error::from)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self> {
        let report: Self = serde_json::from_slice(bytes).map_err(Error::from)?;
        if report.schema != REPORT_SCHEMA {
            return Err(Error::InvalidConfig(format!(
                "unsupported report schema {:?}, expected {REPORT_SCHEMA:?}",
                report.schema
            )));
        }
        Ok(report)
    }
}

/// Median of an already sorted nonempty slice.
pub(crate) fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Nearest-rank quantile of an already sorted nonempty slice.
pub(crate) fn rank_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let idx = (q * (n - 1) as f64 + 0.5).floor() as usize;
    sorted[idx.min(n - 1)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_report() -> ExperimentReport {
        let mut report = ExperimentReport::new("khintchine");
        report.setting("group", "psl2z").setting("seed", 7_u64);
        report.threshold("divergent_drop", 5.0);
        report.grid = vec![6.0, 8.0];
        report.per_sample = vec![
            SampleTrace { index: 0, values: vec![1.0, 0.5] },
            SampleTrace { index: 1, values: vec![3.0, 1.5] },
            SampleTrace { index: 2, values: vec![2.0, 1.0] },
        ];
        report.summarize();
        report.verdict = Some(Verdict::Inconclusive);
        report
    }

    #[test]
    fn quantiles_follow_the_frozen_conventions() {
        let report = toy_report();
        assert_eq!(report.quantiles.len(), 2);
        assert_eq!(report.quantiles[0].q50, 2.0);
        assert_eq!(report.quantiles[1].q50, 1.0);
        assert_eq!(report.quantiles[0].q05, 1.0);
        assert_eq!(report.quantiles[0].q95, 3.0);
        // Even count: the median averages the central pair.
        let mut even = toy_report();
        even.per_sample.push(SampleTrace { index: 3, values: vec![4.0, 2.0] });
        even.summarize();
        assert_eq!(even.quantiles[0].q50, 2.5);
    }

    #[test]
    fn json_round_trips_and_is_byte_stable() {
        let report = toy_report();
        let bytes = report.to_json_bytes().unwrap();
        assert_eq!(bytes, report.to_json_bytes().unwrap());
        let back = ExperimentReport::from_json_bytes(&bytes).unwrap();
        assert_eq!(back, report);
        assert!(bytes.ends_with(b"\n"));
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("\"schema\": \"spiralis/report/1\""));
        assert!(text.contains("\"INCONCLUSIVE\""));
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let mut report = toy_report();
        report.schema = "spiralis/report/0".into();
        let bytes = serde_json::to_vec(&report).unwrap();
        assert!(ExperimentReport::from_json_bytes(&bytes).is_err());
    }

    #[test]
    fn empty_report_has_no_verdict_and_no_quantiles() {
        let mut report = ExperimentReport::new("khintchine");
        report.grid = vec![6.0, 8.0];
        report.summarize();
        assert!(report.quantiles.is_empty());
        assert!(report.per_sample.is_empty());
        assert_eq!(report.verdict, None);
    }
}
