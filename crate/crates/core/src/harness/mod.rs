//! Seeded property-verification suites.
//!
//! Each suite draws independent trials from a per-trial random stream, checks
//! one family of inequalities and reports a signed slack per trial (negative
//! means the inequality failed). Every suite also has a deliberately weakened
//! variant that must fail, which shows that the check can detect errors.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::g17;

pub mod oracle;
pub mod sampling;
mod suites;

pub use suites::{remainder_bound, SUITES};

/// Parameters of a suite run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Inclusive dimension range; `None` uses the suite's own default.
    pub dim: Option<(usize, usize)>,
    /// Dirichlet concentration for sampled spectra.
    pub concentration: f64,
    pub trials: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            dim: None,
            concentration: 1.0,
            trials: 1000,
        }
    }
}

impl SamplerConfig {
    pub fn new(seed: u64, trials: usize) -> Self {
        SamplerConfig {
            seed,
            trials,
            ..SamplerConfig::default()
        }
    }
}

/// Result of a single trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Margin of the checked inequality; negative is a violation.
    pub slack: f64,
    /// The sampled inputs, flattened.
    pub inputs: Vec<f64>,
    /// Optional side statistic collected by the suite.
    pub observation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub offset: u64,
    pub digest: u64,
    pub slack: f64,
}

/// Aggregate of the per-trial side statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observation {
    pub label: &'static str,
    /// Trials that reported the statistic.
    pub count: usize,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub suite: String,
    pub weakened: bool,
    pub trials: usize,
    /// Sorted by offset.
    pub violations: Vec<Violation>,
    pub worst_slack: f64,
    pub observation: Option<Observation>,
    pub runtime_secs: f64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// One `key=value` line; the runtime is included only on request so the
    /// line is reproducible byte for byte.
    pub fn render(&self, timing: bool) -> String {
        let mut line = format!(
            "suite={} trials={} violations={} worst_slack={}",
            self.suite,
            self.trials,
            self.violations.len(),
            g17(self.worst_slack)
        );
        if self.weakened {
            line.push_str(" weakened=true");
        }
        if let Some(obs) = &self.observation {
            line.push_str(&format!(
                " {}_count={} {}_max={}",
                obs.label,
                obs.count,
                obs.label,
                g17(obs.max)
            ));
        }
        if let Some(v) = self.violations.first() {
            line.push_str(&format!(
                " first_offset={} first_digest={:016x}",
                v.offset, v.digest
            ));
        }
        if timing {
            line.push_str(&format!(" runtime={:.3}s", self.runtime_secs));
        }
        line
    }
}

/// FNV-1a over the bit patterns of `inputs`.
pub fn digest(inputs: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for x in inputs {
        for b in x.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Names of all suites, in run order.
pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

fn find_suite(name: &str) -> Result<&'static suites::Suite> {
    SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownSuite(name.to_string()))
}

fn run(name: &str, cfg: &SamplerConfig, weakened: bool) -> Result<PropertyReport> {
    run_with(name, cfg, weakened, |suite, offset| suite.trial(cfg, offset, weakened))
}

fn run_with(
    name: &str,
    cfg: &SamplerConfig,
    weakened: bool,
    trial: impl Fn(&suites::Suite, u64) -> Outcome + Sync,
) -> Result<PropertyReport> {
    let suite = find_suite(name)?;
    let start = Instant::now();
    let outcomes: Vec<(u64, Outcome)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|offset| (offset, trial(suite, offset)))
        .collect();
    let mut violations = Vec::new();
    let mut worst_slack = f64::INFINITY;
    let mut observation = suite.observation.map(|label| Observation {
        label,
        count: 0,
        max: f64::NEG_INFINITY,
    });
    for (offset, o) in &outcomes {
        // NaN slack counts as a violation
        if !(o.slack >= 0.0) {
            violations.push(Violation {
                offset: *offset,
                digest: digest(&o.inputs),
                slack: o.slack,
            });
        }
        worst_slack = if o.slack.is_nan() {
            f64::NAN
        } else {
            worst_slack.min(o.slack)
        };
        if let (Some(obs), Some(v)) = (observation.as_mut(), o.observation) {
            obs.count += 1;
            obs.max = obs.max.max(v);
        }
    }
    Ok(PropertyReport {
        suite: suite.name.to_string(),
        weakened,
        trials: cfg.trials,
        violations,
        worst_slack,
        observation,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

/// Runs the named suite.
pub fn run_suite(name: &str, cfg: &SamplerConfig) -> Result<PropertyReport> {
    run(name, cfg, false)
}

/// Runs the named suite with its deliberately weakened inequality.
pub fn run_suite_weakened(name: &str, cfg: &SamplerConfig) -> Result<PropertyReport> {
    run(name, cfg, true)
}

/// Runs the named suite with the continuity and subadditivity constants
/// multiplied by `scale`; other suites ignore the scale. A report with
/// `scale != 1` is marked as weakened.
pub fn run_suite_scaled(name: &str, cfg: &SamplerConfig, scale: f64) -> Result<PropertyReport> {
    run_with(name, cfg, scale != 1.0, |suite, offset| {
        suite.trial_scaled(cfg, offset, false, scale)
    })
}

/// Regenerates one trial of a run from its seed offset.
pub fn replay(name: &str, cfg: &SamplerConfig, offset: u64, weakened: bool) -> Result<Outcome> {
    Ok(find_suite(name)?.trial(cfg, offset, weakened))
}
