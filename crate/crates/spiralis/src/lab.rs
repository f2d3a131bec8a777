//! Reproducible end-to-end experiments on the modular surface and its
//! relatives: shrinking-target approximation statistics, tube-penetration
//! profiles along boundary rays, and a continued-fraction fast path that
//! reaches time scales the geometric sweep cannot.
//!
//! Every experiment follows the same discipline:
//!
//! * randomness comes from counter-based per-sample streams keyed by
//!   `(seed, sample index)`, so worker count and scheduling never reorder it;
//! * per-sample work may run in parallel, but results are merged by sample
//!   index and reduced sequentially;
//! * outputs are [`ExperimentReport`] values whose JSON serialization is
//!   byte-identical across runs and across `SPIRALIS_THREADS` settings;
//! * verdict thresholds are fixed constants echoed into the report, never
//!   tuned per run.

mod cf;
mod khintchine;
mod penetration;
mod rate;
mod report;
mod sample;

pub use cf::{
    cf_digits, cf_fast_penetrations, cf_random_digits, convergents, longest_one_run, CfInput,
    CfPenetration, CF_MAX_DIGITS, GOLDEN_LOG, RANDOM_REFRESH_BLOCK,
};
pub use khintchine::{
    khintchine_experiment, khintchine_statistic, KhintchineSettings, KHINTCHINE_CONVERGENT_FLOOR,
    KHINTCHINE_DIVERGENT_DROP,
};
pub use penetration::{
    loglaw_experiment, penetration_profile, AxisLifts, LoglawPath, LoglawSettings,
    PenetrationEvent, LOGLAW_BAND,
};
pub use rate::RateFunction;
pub use report::{ExperimentReport, QuantileRow, SampleTrace, Verdict, REPORT_SCHEMA};
pub use sample::{sample_boundary, sample_stream, SampleSpec};
