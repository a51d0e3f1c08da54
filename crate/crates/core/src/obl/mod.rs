//! Opposition-based learning strategies that plug into the DE engine.
//!
//! A strategy is consulted twice: once on the initial population (static
//! bounds) and then, per generation, with probability given by its jumping
//! policy. Generation jumps reflect over the dynamic population interval by
//! default ([`JumpInterval`]); the beta schemes' `normDiv` is always measured
//! against the static search box.

pub mod beta;
pub mod jumping;
pub mod opposite;
pub mod phases;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::crossover::CrossoverKind;
use crate::diversity::DiversityKind;
use crate::error::{Error, Result};
use crate::objective::Evaluator;
use crate::population::Population;
use crate::rng::{RandomSource, RngStream};

pub use beta::{
    beta_opposite, beta_opposite_with, concave_params, concave_spread, convex_params,
    convex_spread, partial_opposite, BetaOppositeParams, BetaShape,
};
pub use jumping::{JumpSchedule, JumpingPolicy};
pub use opposite::{
    current_optimum_opposite, generalized_opposite, quasi_opposite, quasi_reflected,
    type1_opposite,
};
pub use phases::{
    comma_processed, merge_phase, merge_truncate, mu_comma_lambda_phase, mu_plus_lambda_phase,
    JumpReport, PartialChange, PhaseKind,
};

/// Default diversity threshold of the beta selection switch.
pub const DEFAULT_DT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OblVariant {
    Obl,
    Qobl,
    Qrobl,
    Coobl,
    Gobl,
    BetaCobl,
    IBetaCobl,
}

impl OblVariant {
    pub const ALL: [OblVariant; 7] = [
        OblVariant::Obl,
        OblVariant::Qobl,
        OblVariant::Qrobl,
        OblVariant::Coobl,
        OblVariant::Gobl,
        OblVariant::BetaCobl,
        OblVariant::IBetaCobl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OblVariant::Obl => "obl",
            OblVariant::Qobl => "qobl",
            OblVariant::Qrobl => "qrobl",
            OblVariant::Coobl => "coobl",
            OblVariant::Gobl => "gobl",
            OblVariant::BetaCobl => "betacobl",
            OblVariant::IBetaCobl => "ibetacobl",
        }
    }

    pub fn is_beta(self) -> bool {
        matches!(self, OblVariant::BetaCobl | OblVariant::IBetaCobl)
    }
}

impl fmt::Display for OblVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OblVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OblVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::config("obl.variant", format!("unknown variant `{s}`")))
    }
}

/// Interval that generation jumps compute opposites over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpInterval {
    /// The problem bounds.
    Static,
    /// Per-dimension extent `[min, max]` of the current population.
    #[default]
    Dynamic,
}

impl JumpInterval {
    pub fn name(self) -> &'static str {
        match self {
            JumpInterval::Static => "static",
            JumpInterval::Dynamic => "dynamic",
        }
    }
}

impl fmt::Display for JumpInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JumpInterval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(JumpInterval::Static),
            "dynamic" => Ok(JumpInterval::Dynamic),
            other => Err(Error::config("obl.interval", format!("unknown interval `{other}`"))),
        }
    }
}

/// Which jump a strategy is asked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpStage {
    /// Opposition applied to the freshly initialized population.
    Initialization,
    /// Generation jumping.
    Generation,
}

/// Contract between the DE engine and an opposition layer.
pub trait Opposition {
    fn name(&self) -> String;

    /// Probability of jumping at budget fraction `progress`.
    fn jump_probability(&self, progress: f64) -> f64;

    /// Runs one jump on an evaluated population. A jump whose cost does not
    /// fit the remaining budget fails with [`Error::BudgetExhausted`] and
    /// leaves everything unchanged.
    fn apply(
        &mut self,
        pop: &mut Population,
        eval: &mut Evaluator<'_>,
        rng: &mut RngStream,
        stage: JumpStage,
    ) -> Result<JumpReport>;

    /// Clears per-run state.
    fn reset(&mut self) {}
}

/// Configuration of an opposition layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OblConfig {
    pub variant: OblVariant,
    pub policy: JumpingPolicy,
    /// Recombination for the beta schemes' partial dimensional change.
    pub crossover: CrossoverKind,
    /// Measure behind `normDiv` in the beta schemes.
    pub diversity: DiversityKind,
    /// Diversity threshold DT of the (μ+λ)/(μ,λ) switch.
    pub threshold: f64,
    /// Interval for generation jumps; initialization always uses the bounds.
    #[serde(default)]
    pub interval: JumpInterval,
}

impl OblConfig {
    /// Variant with its customary pairing and a constant 0.05 jumping rate.
    pub fn new(variant: OblVariant) -> Self {
        let (crossover, diversity) = match variant {
            OblVariant::IBetaCobl => (CrossoverKind::multiple_exponential(), DiversityKind::Linear),
            _ => (CrossoverKind::Binomial, DiversityKind::MinDistance),
        };
        Self {
            variant,
            policy: JumpingPolicy::default(),
            crossover,
            diversity,
            threshold: DEFAULT_DT,
            interval: JumpInterval::default(),
        }
    }

    pub fn with_policy(mut self, policy: JumpingPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_crossover(mut self, crossover: CrossoverKind) -> Self {
        self.crossover = crossover;
        self
    }

    pub fn with_diversity(mut self, diversity: DiversityKind) -> Self {
        self.diversity = diversity;
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_interval(mut self, interval: JumpInterval) -> Self {
        self.interval = interval;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.policy.validate()?;
        if !(self.threshold >= 0.0) || !self.threshold.is_finite() {
            return Err(Error::parameter("DT", format!("must be finite and >= 0, got {}", self.threshold)));
        }
        if let CrossoverKind::MultipleExponential { segment_len } = self.crossover {
            if !(segment_len > 0.0) || !segment_len.is_finite() {
                return Err(Error::parameter("T", format!("must be > 0, got {segment_len}")));
            }
        }
        Ok(())
    }
}

/// The stock [`Opposition`] implementation for every [`OblVariant`].
#[derive(Debug, Clone)]
pub struct OblStrategy {
    config: OblConfig,
    schedule: JumpSchedule,
    label: String,
}

impl OblStrategy {
    pub fn new(config: OblConfig) -> Result<Self> {
        config.validate()?;
        let label = config.variant.name().to_string();
        Ok(Self {
            schedule: JumpSchedule::new(config.policy),
            config,
            label,
        })
    }

    /// Overrides the name reported in run records.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn config(&self) -> &OblConfig {
        &self.config
    }

    pub fn schedule(&self) -> &JumpSchedule {
        &self.schedule
    }
}

impl Opposition for OblStrategy {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn jump_probability(&self, progress: f64) -> f64 {
        self.schedule.probability(progress)
    }

    fn apply(
        &mut self,
        pop: &mut Population,
        eval: &mut Evaluator<'_>,
        rng: &mut RngStream,
        stage: JumpStage,
    ) -> Result<JumpReport> {
        let report = apply_strategy(&self.config, pop, eval, rng, stage)?;
        if stage == JumpStage::Generation {
            self.schedule.record(report.success_rate());
        }
        Ok(report)
    }

    fn reset(&mut self) {
        self.schedule.reset();
    }
}

/// Population extent as bounds. Dimensions in which every member agrees
/// have no interval to sample from and fall back to the static range.
pub fn population_interval(pop: &Population, bounds: &Bounds) -> Result<Bounds> {
    let (mut lo, mut hi) = pop.extent();
    for j in 0..lo.len() {
        if !(lo[j] < hi[j]) {
            lo[j] = bounds.lower()[j];
            hi[j] = bounds.upper()[j];
        }
    }
    Bounds::new(lo, hi)
}

/// One jump of the configured variant.
///
/// Beta schemes measure `normDiv` and take the (μ+λ) phase when it exceeds
/// DT, the (μ,λ) phase otherwise. Classic variants build one opposite per
/// member and merge.
pub fn apply_strategy<R: RandomSource + ?Sized>(
    config: &OblConfig,
    pop: &mut Population,
    eval: &mut Evaluator<'_>,
    rng: &mut R,
    stage: JumpStage,
) -> Result<JumpReport> {
    let bounds: &Bounds = eval.bounds();
    if pop.dim() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            found: pop.dim(),
        });
    }
    let dynamic = stage == JumpStage::Generation && config.interval == JumpInterval::Dynamic;
    if config.variant.is_beta() {
        let norm_div = config.diversity.norm_div(pop, bounds)?;
        let change = PartialChange::new(config.crossover);
        let interval = if dynamic { population_interval(pop, bounds)? } else { bounds.clone() };
        return if norm_div > config.threshold {
            mu_plus_lambda_phase(pop, eval, &interval, norm_div, &change, rng)
        } else {
            mu_comma_lambda_phase(pop, eval, &interval, norm_div, &change, rng)
        };
    }
    let (lo, hi) = if dynamic {
        pop.extent()
    } else {
        (bounds.lower().to_vec(), bounds.upper().to_vec())
    };
    match config.variant {
        OblVariant::Obl => merge_phase(pop, eval, |_, x| {
            let mut o = type1_opposite(x, &lo, &hi);
            bounds.clamp_in_place(&mut o);
            o
        }),
        OblVariant::Qobl => merge_phase(pop, eval, |_, x| {
            let mut o = quasi_opposite(x, &lo, &hi, rng);
            bounds.clamp_in_place(&mut o);
            o
        }),
        OblVariant::Qrobl => merge_phase(pop, eval, |_, x| {
            let mut o = quasi_reflected(x, &lo, &hi, rng);
            bounds.clamp_in_place(&mut o);
            o
        }),
        OblVariant::Coobl => {
            let best = pop.best().ok_or(Error::Unevaluated)?.genome.clone();
            merge_phase(pop, eval, |_, x| current_optimum_opposite(x, &best, bounds))
        }
        OblVariant::Gobl => {
            let k = rng.uniform01();
            merge_phase(pop, eval, |_, x| generalized_opposite(x, &lo, &hi, k, bounds))
        }
        OblVariant::BetaCobl | OblVariant::IBetaCobl => unreachable!("handled above"),
    }
}
