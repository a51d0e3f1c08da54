//! Algorithm-complexity measurement in the CEC style:
//! `T0` is a fixed arithmetic loop, `T1` the cost of 200000 bare function
//! evaluations, `T2` the mean of five complete runs with a 200000-evaluation
//! budget, and the reported complexity is `(T2 - T1) / T0`.

use std::hint::black_box;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bounds::random_point;
use crate::de::{self, DeConfig};
use crate::error::Result;
use crate::objective::Problem;
use crate::obl::{OblStrategy, Opposition};
use crate::rng::RngStream;

pub const TIMING_EVALUATIONS: u64 = 200_000;
pub const TIMING_RUNS: usize = 5;

/// The CEC reference loop.
pub fn t0_loop() -> Duration {
    let start = Instant::now();
    let mut x = black_box(0.55f64);
    for _ in 0..1_000_000 {
        x += x;
        x /= 2.0;
        x *= x;
        x = x.sqrt();
        x = x.ln();
        x = x.exp();
        x /= x + 2.0;
        x = black_box(x);
    }
    black_box(x);
    start.elapsed()
}

/// Time of `n` evaluations at uniformly random points (generated outside the timer).
pub fn t1_evaluations(problem: &dyn Problem, n: u64, seed: u64) -> Duration {
    let mut rng = RngStream::new(seed);
    let points: Vec<Vec<f64>> = (0..1024).map(|_| random_point(problem.bounds(), &mut rng)).collect();
    let start = Instant::now();
    let mut acc = 0.0;
    for i in 0..n as usize {
        acc += problem.value(black_box(&points[i % points.len()]));
    }
    black_box(acc);
    start.elapsed()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub t0_ms: f64,
    pub t1_ms: f64,
    pub t2_ms: f64,
    pub complexity: f64,
}

impl TimingReport {
    pub fn new(t0: Duration, t1: Duration, t2: Duration) -> Self {
        let ms = |d: Duration| d.as_secs_f64() * 1e3;
        Self {
            t0_ms: ms(t0),
            t1_ms: ms(t1),
            t2_ms: ms(t2),
            complexity: (ms(t2) - ms(t1)) / ms(t0),
        }
    }
}

/// Mean wall time of `runs` complete runs of `de_config` with an optional
/// opposition layer (cloned fresh per run), seeds `seed, seed + 1, ...`.
pub fn t2_runs(
    de_config: &DeConfig,
    problem: &dyn Problem,
    strategy: Option<&OblStrategy>,
    runs: usize,
) -> Result<Duration> {
    let mut total = Duration::ZERO;
    for r in 0..runs {
        let cfg = DeConfig {
            seed: de_config.seed + r as u64,
            ..de_config.clone()
        };
        let mut s = strategy.cloned();
        let start = Instant::now();
        black_box(de::run(&cfg, problem, s.as_mut().map(|s| s as &mut dyn Opposition), &[])?);
        total += start.elapsed();
    }
    Ok(total / runs.max(1) as u32)
}

/// Full protocol with the standard evaluation count and run count.
pub fn timing_protocol(
    de_config: &DeConfig,
    problem: &dyn Problem,
    strategy: Option<&OblStrategy>,
) -> Result<TimingReport> {
    let cfg = DeConfig {
        budget_max: TIMING_EVALUATIONS,
        ..de_config.clone()
    };
    let t0 = t0_loop();
    let t1 = t1_evaluations(problem, TIMING_EVALUATIONS, cfg.seed);
    let t2 = t2_runs(&cfg, problem, strategy, TIMING_RUNS)?;
    Ok(TimingReport::new(t0, t1, t2))
}
