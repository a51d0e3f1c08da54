//! Parallel execution of independent seeded runs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::de::{self, RunRecord};
use crate::error::{Error, Result};
use crate::objective::{Problem, TestFunction};
use crate::obl::Opposition;
use crate::stats::{format_mean_std, mean_std};

use super::config::{checkpoint_nfes, ExperimentConfig};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "OBDE_WORKERS";

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::config(WORKERS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub function: String,
    pub dimension: usize,
    pub algorithm: String,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    /// `MEAN (STD DEV)` display cell.
    pub cell: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
}

struct Job<'a> {
    problem: &'a TestFunction,
    algorithm: &'a str,
    run: usize,
}

/// Runs every (function, dimension, algorithm, run) combination.
///
/// Each run is fully determined by its seed `base_seed + run`, so the
/// records do not depend on `workers`; they are returned sorted by
/// function, dimension, algorithm and run.
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentResult> {
    config.validate()?;
    let mut problems = Vec::new();
    for f in &config.functions {
        for &d in &config.dimensions {
            problems.push(TestFunction::from_name(f, d, config.problem_seed)?);
        }
    }
    let jobs: Vec<Job<'_>> = problems
        .iter()
        .flat_map(|p| {
            config.algorithms.iter().flat_map(move |a| {
                (0..config.runs).map(move |run| Job {
                    problem: p,
                    algorithm: a,
                    run,
                })
            })
        })
        .collect();

    let execute = |job: &Job<'_>| -> Result<RunRecord> {
        let budget = config.budget_for(job.problem.dim());
        let seed = config.base_seed.wrapping_add(job.run as u64);
        let de_cfg = config.de_config(seed, budget)?;
        let spec = config.algorithm(job.algorithm)?;
        let mut strategy = spec.strategy()?;
        let checkpoints = checkpoint_nfes(&config.checkpoints, budget);
        let mut rec = de::run(
            &de_cfg,
            job.problem,
            strategy.as_mut().map(|s| s as &mut dyn Opposition),
            &checkpoints,
        )?;
        rec.run = job.run;
        rec.algorithm = spec.label;
        if !config.record_wall_time {
            rec.wall_ms = 0.0;
        }
        Ok(rec)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::config(WORKERS_ENV, e.to_string()))?;
    let mut records = pool.install(|| jobs.par_iter().map(execute).collect::<Result<Vec<_>>>())?;
    records.sort_by(|a, b| {
        (&a.function, a.dimension, &a.algorithm, a.run).cmp(&(&b.function, b.dimension, &b.algorithm, b.run))
    });
    let summary = summarize(&records)?;
    Ok(ExperimentResult { records, summary })
}

/// Mean and sample standard deviation of final FEVs per function, dimension
/// and algorithm.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>> {
    let mut groups: BTreeMap<(&str, usize, &str), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.function.as_str(), r.dimension, r.algorithm.as_str()))
            .or_default()
            .push(r.final_fev);
    }
    groups
        .into_iter()
        .map(|((function, dimension, algorithm), v)| {
            let (mean, std) = mean_std(&v)?;
            Ok(SummaryRow {
                function: function.to_string(),
                dimension,
                algorithm: algorithm.to_string(),
                runs: v.len(),
                mean,
                std,
                cell: format_mean_std(mean, std),
            })
        })
        .collect()
}
