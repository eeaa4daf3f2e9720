//! Oracle harness: exact enumeration, quadrature, finite differences and
//! Monte-Carlo checks of every identity the distributions rely on.

pub mod checks;
pub mod enumerate;
pub mod jacobian;
pub mod quadrature;
pub mod stats;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::GammaMixtureParams;
use crate::error::{contract, Error};
use crate::rng::RngStream;

/// How a report's statistic is judged against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Error-type statistic; passes when `statistic <= threshold`.
    AtMost,
    /// p-value; passes when `statistic > threshold`.
    Above,
    /// Negative control p-value; passes when `statistic < threshold`.
    Below,
}

impl Comparison {
    pub fn holds(self, statistic: f64, threshold: f64) -> bool {
        match self {
            Comparison::AtMost => statistic <= threshold,
            Comparison::Above => statistic > threshold,
            Comparison::Below => statistic < threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub outcome: Outcome,
    pub passed: bool,
    pub sample_size: u64,
    pub seed: u64,
    pub stream: u64,
    /// Set when the reported result comes from the enlarged re-run.
    pub rerun: bool,
}

impl CheckReport {
    pub fn new(
        name: impl Into<String>,
        statistic: f64,
        threshold: f64,
        comparison: Comparison,
        sample_size: u64,
    ) -> Self {
        let passed = comparison.holds(statistic, threshold);
        CheckReport {
            name: name.into(),
            statistic,
            threshold,
            comparison,
            outcome: if passed { Outcome::Pass } else { Outcome::Fail },
            passed,
            sample_size,
            seed: 0,
            stream: 0,
            rerun: false,
        }
    }

    pub fn inconclusive(mut self) -> Self {
        self.outcome = Outcome::Inconclusive;
        self.passed = false;
        self
    }

    /// Multiplies an error-type threshold and re-judges.
    pub fn scale_threshold(mut self, factor: f64) -> Self {
        if self.comparison == Comparison::AtMost && self.outcome != Outcome::Inconclusive {
            self.threshold *= factor;
            self.passed = self.comparison.holds(self.statistic, self.threshold);
            self.outcome = if self.passed { Outcome::Pass } else { Outcome::Fail };
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    /// Monte-Carlo sample size per statistical check.
    pub fn trials(self) -> u64 {
        match self {
            Level::Quick => 10_000,
            Level::Full => 100_000,
        }
    }

    /// Largest total count in exact enumerations.
    pub fn max_total(self) -> u64 {
        match self {
            Level::Quick => 8,
            Level::Full => 12,
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(contract(format!("unknown level '{other}', expected quick or full"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Quick => "quick",
            Level::Full => "full",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub level: Level,
    /// Multiplier on every error-type threshold. Values below one tighten the
    /// checks; tiny values make the exact identities fail, which the negative
    /// tests use.
    pub tolerance_scale: f64,
}

impl VerifyConfig {
    pub fn new(seed: u64, level: Level) -> Self {
        VerifyConfig { seed, level, tolerance_scale: 1.0 }
    }
}

#[derive(Clone, Copy)]
struct Budget {
    trials: u64,
    max_m: u64,
}

type CheckFn = Box<dyn Fn(&mut RngStream, Budget) -> CheckReport + Send + Sync>;

struct Task {
    statistical: bool,
    run: CheckFn,
}

fn exact<F>(f: F) -> Task
where
    F: Fn(&mut RngStream, Budget) -> CheckReport + Send + Sync + 'static,
{
    Task { statistical: false, run: Box::new(f) }
}

fn statistical<F>(f: F) -> Task
where
    F: Fn(&mut RngStream, Budget) -> CheckReport + Send + Sync + 'static,
{
    Task { statistical: true, run: Box::new(f) }
}

fn mixture(shapes: &[f64], scale: f64) -> GammaMixtureParams {
    GammaMixtureParams::new(shapes.to_vec(), scale).expect("valid fixed parameters")
}

fn tasks() -> Vec<Task> {
    use checks::*;
    let mut out = vec![
        exact(|rng, _| check_transform_density_pointwise(Chart::Ratio, 2..=6, 1000, rng)),
        exact(|rng, _| check_transform_density_pointwise(Chart::LogRatio, 2..=6, 1000, rng)),
        exact(|rng, _| check_jacobian_finite_difference(Chart::Ratio, 2..=6, 100, rng)),
        exact(|rng, _| check_jacobian_finite_difference(Chart::LogRatio, 2..=6, 100, rng)),
        exact(|rng, _| check_round_trips(2..=8, 1000, rng)),
        statistical(|rng, b| check_transform_density_ks([1.0, 1.0], Chart::Ratio, b.trials, rng)),
        statistical(|rng, b| check_transform_density_ks([2.0, 3.0], Chart::LogRatio, b.trials, rng)),
        exact(|rng, b| check_multinomial_normalization(4, b.max_m, 20, rng)),
        exact(|rng, b| check_dm_normalization(4, b.max_m, 20, rng)),
    ];
    for r in [
        vec![1.0, 1.0, 1.0],
        vec![2.0, 1.5, 1.5],
        vec![0.4, 2.2],
        vec![0.3, 1.0, 2.5, 4.0],
        vec![1.7, 0.6, 0.9, 3.1, 0.2],
    ] {
        out.push(exact(move |_, b| check_beta_binomial_merge(&r, b.max_m)));
    }
    for (total, theta) in [(2.0, 1.0), (0.5, 3.0), (5.0, 0.2), (1.3, 0.7), (10.0, 2.0)] {
        out.push(statistical(move |rng, b| check_nb_mixture(total, theta, b.trials, rng)));
    }
    out.push(statistical(|rng, b| check_conditional_multinomial(&[1.0, 1.0], 2, b.trials, rng)));
    out.push(statistical(|rng, b| check_conditional_multinomial(&[2.0, 1.0, 1.0], 3, b.trials, rng)));
    out.push(statistical(|rng, b| {
        check_pi_independent_of_s(&mixture(&[1.0, 1.0], 1.0), b.trials, rng)
    }));
    out.push(statistical(|rng, b| {
        check_pi_independent_of_s(&mixture(&[3.0, 2.0], 0.5), b.trials, rng)
    }));
    out.push(statistical(|rng, b| {
        check_pi_dependence_control(&mixture(&[1.0, 1.0], 1.0), b.trials, rng)
    }));
    for (r, m) in [(vec![1.0, 1.0, 1.0], 2), (vec![2.0, 1.0], 5), (vec![0.5, 1.5, 3.0], 4)] {
        out.push(statistical(move |rng, b| check_dm_integral(&r, m, b.trials, rng)));
    }
    for (r, theta, c) in [
        (vec![1.0, 1.0], 1.0, 0),
        (vec![2.0, 0.5, 1.5], 3.0, 1),
        (vec![0.7, 4.0], 0.2, 0),
    ] {
        out.push(exact(move |_, _| check_normalized_nb_mass(&mixture(&r, theta), c)));
    }
    out.push(exact(|_, _| check_normalized_nb_values(&mixture(&[1.0, 1.0], 1.0), 0, 50)));
    out.push(exact(|_, _| check_nb_truncated_sum(2.5, 0.3, 500)));
    out.push(statistical(|rng, b| check_gamma_exponential(2.0, b.trials, rng)));
    out.push(statistical(|rng, b| check_gamma_common_scale(0.7, 1.5, b.trials, rng)));
    out.push(statistical(|rng, b| check_poisson_superposition(1.3, 2.9, b.trials, rng)));
    out.push(statistical(|rng, b| {
        check_hierarchy_total(&mixture(&[0.8, 1.7, 2.5], 0.9), b.trials, rng)
    }));
    out
}

/// Offset added to the stream index for the enlarged re-run.
const RERUN_STREAM_OFFSET: u64 = 1 << 32;
const RERUN_FACTOR: u64 = 10;

/// Runs every check with default tolerances.
pub fn run_all(seed: u64, level: Level) -> Vec<CheckReport> {
    run_all_with(VerifyConfig::new(seed, level))
}

/// Runs every check in parallel. Check `i` draws from substream `i` of the
/// seed, so the output is identical for any thread count. A failed
/// statistical check is re-run once with ten times the samples on a fresh
/// substream, and that result is reported.
pub fn run_all_with(config: VerifyConfig) -> Vec<CheckReport> {
    let budget = Budget {
        trials: config.level.trials(),
        max_m: config.level.max_total(),
    };
    let root = RngStream::new(config.seed);
    tasks()
        .into_par_iter()
        .enumerate()
        .map(|(i, task)| {
            let stream = i as u64;
            let mut report = (task.run)(&mut root.substream(stream), budget)
                .scale_threshold(config.tolerance_scale);
            let mut used = stream;
            if task.statistical && report.outcome == Outcome::Fail {
                used = stream + RERUN_STREAM_OFFSET;
                let bigger = Budget { trials: budget.trials * RERUN_FACTOR, ..budget };
                report = (task.run)(&mut root.substream(used), bigger)
                    .scale_threshold(config.tolerance_scale);
                report.rerun = true;
            }
            report.seed = config.seed;
            report.stream = used;
            report
        })
        .collect()
}
