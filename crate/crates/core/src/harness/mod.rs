//! Seeded experiments over set families, exponent fits, and certificate
//! verification.

mod config;
mod experiments;
mod family;
mod fit;
mod output;
pub mod prng;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{Experiment, ExperimentConfig, Family};
pub use family::generate_set;
pub use fit::{fit_exponent, ExponentFit};
pub use output::{to_csv, to_json, KEY_COLUMNS, SCHEMA};

use crate::error::{Error, Result};
use crate::field::make_field;
use experiments::{columns, fit_targets, measure, TrialCtx};
use prng::trial_seed;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(u128),
    Float(f64),
    Bool(bool),
    /// Not computed: outside a budget, or not defined for this input.
    Missing,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub family: Family,
    pub size: usize,
    pub trial: u32,
    /// Seed of this trial's generator.
    pub seed: u64,
    /// Raw encodings of the generated set.
    pub set: Vec<u32>,
    pub values: Vec<(&'static str, Value)>,
}

impl TrialResult {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.iter().find(|(k, _)| *k == name).map(|(_, v)| v)
    }

    /// Names of `_ok` columns that came out false.
    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.values
            .iter()
            .filter(|(k, v)| k.ends_with("_ok") && *v == Value::Bool(false))
            .map(|(k, _)| *k)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub experiment: Experiment,
    pub columns: Vec<&'static str>,
    /// Sorted by (family as listed in the config, size, trial).
    pub rows: Vec<TrialResult>,
    pub fits: Vec<ExponentFit>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub experiments: Vec<ExperimentOutput>,
}

impl RunOutput {
    pub fn certificate_failures(&self) -> usize {
        self.experiments
            .iter()
            .flat_map(|e| &e.rows)
            .map(|r| r.failed_checks().len())
            .sum()
    }
}

/// Runs every experiment of the config. Trials run in parallel; output order
/// does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let experiments = cfg
        .experiment
        .iter()
        .map(|&e| run_one(cfg, e))
        .collect::<Result<_>>()?;
    Ok(RunOutput {
        config: cfg.clone(),
        experiments,
    })
}

fn run_one(cfg: &ExperimentConfig, exp: Experiment) -> Result<ExperimentOutput> {
    let field = make_field(cfg.p, cfg.n)?;
    let mut jobs = Vec::new();
    for (fi, &family) in cfg.family.iter().enumerate() {
        for &size in &cfg.sizes {
            for trial in 0..cfg.trials {
                jobs.push((fi, family, size, trial));
            }
        }
    }
    jobs.sort_by_key(|&(fi, _, size, trial)| (fi, size, trial));
    jobs.dedup();
    let rows = jobs
        .par_iter()
        .map(|&(_, family, size, trial)| {
            let seed = trial_seed(cfg.seed, size, trial);
            let ctx = TrialCtx {
                budgets: &cfg.budgets,
                family,
                size,
                seed,
                exclude_zero: cfg.exclude_zero,
                k: cfg.k,
            };
            let with_context = |e: Error| Error::Trial {
                family: family.name().to_string(),
                size,
                trial: trial as usize,
                cause: Box::new(e),
            };
            let set = generate_set(family, size, seed, &field, cfg.exclude_zero).map_err(with_context)?;
            let values = measure(exp, &set, &ctx).map_err(with_context)?;
            Ok(TrialResult {
                family,
                size,
                trial,
                seed,
                set: set.raw(),
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut fits = Vec::new();
    for &family in &cfg.family {
        for &(quantity, reference) in fit_targets(exp) {
            let samples: Vec<(usize, u128)> = rows
                .iter()
                .filter(|r| r.family == family)
                .filter_map(|r| match r.get(quantity) {
                    Some(Value::Int(v)) => Some((r.size, *v)),
                    _ => None,
                })
                .collect();
            fits.extend(fit_exponent(family, quantity, &samples, reference));
        }
    }
    Ok(ExperimentOutput {
        experiment: exp,
        columns: columns(exp).to_vec(),
        rows,
        fits,
    })
}

/// A false certificate, with everything needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub experiment: Experiment,
    pub check: &'static str,
    pub p: u64,
    pub n: u32,
    pub family: Family,
    pub size: usize,
    pub trial: u32,
    pub seed: u64,
    pub set: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub checks_run: u64,
    /// Checks not applicable or outside budget for a given input.
    pub skipped: u64,
    pub failures: Vec<Failure>,
}

/// Runs the config and tallies every `_ok` column. Failed certificates are
/// data; invalid configs and precondition violations are errors.
pub fn verify_suite(cfg: &ExperimentConfig) -> Result<VerifySummary> {
    let run = run_experiment(cfg)?;
    let mut summary = VerifySummary::default();
    for exp in &run.experiments {
        for row in &exp.rows {
            for (name, v) in &row.values {
                if !name.ends_with("_ok") {
                    continue;
                }
                match v {
                    Value::Bool(true) => summary.checks_run += 1,
                    Value::Bool(false) => {
                        summary.checks_run += 1;
                        summary.failures.push(Failure {
                            experiment: exp.experiment,
                            check: name,
                            p: cfg.p,
                            n: cfg.n,
                            family: row.family,
                            size: row.size,
                            trial: row.trial,
                            seed: row.seed,
                            set: row.set.clone(),
                        });
                    }
                    _ => summary.skipped += 1,
                }
            }
        }
    }
    Ok(summary)
}

/// Desk-scale configuration exercising every experiment.
pub fn default_verify_config() -> ExperimentConfig {
    ExperimentConfig {
        p: 101,
        n: 1,
        family: vec![Family::Interval, Family::UniformRandom, Family::GeometricProgression],
        sizes: vec![2, 3, 4, 5],
        trials: 2,
        seed: 20_240_601,
        experiment: Experiment::ALL.to_vec(),
        budgets: Default::default(),
        exclude_zero: true,
        k: 2,
    }
}
