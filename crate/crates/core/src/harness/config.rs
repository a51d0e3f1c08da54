//! Experiment configuration: a flat `key = value` text format with dotted
//! namespaces, and the named algorithm presets it refers to.
//!
//! ```text
//! # lines starting with '#' are comments; lists are comma separated
//! experiment.algorithms = de, ibetacobl
//! experiment.functions = shifted-rotated-rastrigin
//! experiment.dimensions = 30
//! experiment.runs = 51
//! de.F = 0.5
//! obl.jr = 0.05
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::crossover::{CrossoverKind, DEFAULT_SEGMENT_LEN};
use crate::de::DeConfig;
use crate::diversity::DiversityKind;
use crate::error::{Error, Result};
use crate::objective::TestFunction;
use crate::obl::{JumpInterval, JumpingPolicy, OblConfig, OblStrategy, OblVariant, DEFAULT_DT};

/// Every preset name accepted in `experiment.algorithms`.
pub const PRESETS: [&str; 12] = [
    "de",
    "obl",
    "qobl",
    "qrobl",
    "coobl",
    "gobl",
    "obltvjr",
    "oblpgj",
    "betacobl",
    "betacobl_linear1",
    "betacobl_linear2",
    "ibetacobl",
];

/// Number of logarithmically spaced convergence checkpoints.
pub const CHECKPOINT_COUNT: usize = 16;

/// Budget fractions `10^(-2 + 2k/15)`, k = 0..15, from 0.01 to 1.
pub fn default_checkpoint_fractions() -> Vec<f64> {
    (0..CHECKPOINT_COUNT)
        .map(|k| {
            if k + 1 == CHECKPOINT_COUNT {
                1.0
            } else {
                10f64.powf(-2.0 + 2.0 * k as f64 / (CHECKPOINT_COUNT - 1) as f64)
            }
        })
        .collect()
}

/// NFE counts for `fractions` of `budget` (rounded, at least 1).
pub fn checkpoint_nfes(fractions: &[f64], budget: u64) -> Vec<u64> {
    fractions
        .iter()
        .map(|f| ((f * budget as f64).round() as u64).clamp(1, budget))
        .collect()
}

/// Policy keys shared by the opposition presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OblSettings {
    /// `constant`, `linear` or `protective`; applies to presets without a
    /// policy of their own.
    pub policy: String,
    pub jr: f64,
    pub jr_max: f64,
    pub jr_min: f64,
    pub protective_rate: f64,
    pub window: usize,
    pub threshold: f64,
    pub segment_len: f64,
    /// Overrides for the beta presets' partial-change crossover and diversity.
    pub crossover: Option<String>,
    pub diversity: Option<String>,
    pub interval: JumpInterval,
}

impl Default for OblSettings {
    fn default() -> Self {
        Self {
            policy: "constant".into(),
            jr: 0.05,
            jr_max: 0.3,
            jr_min: 0.0,
            protective_rate: 0.3,
            window: 3,
            threshold: DEFAULT_DT,
            segment_len: DEFAULT_SEGMENT_LEN,
            crossover: None,
            diversity: None,
            interval: JumpInterval::default(),
        }
    }
}

impl OblSettings {
    fn policy(&self) -> Result<JumpingPolicy> {
        let p = match self.policy.as_str() {
            "constant" => JumpingPolicy::Constant { rate: self.jr },
            "linear" => self.linear(),
            "protective" => self.protective(),
            other => return Err(Error::config("obl.policy", format!("unknown policy `{other}`"))),
        };
        p.validate().map_err(|e| Error::config("obl.policy", e.to_string()))?;
        Ok(p)
    }

    fn linear(&self) -> JumpingPolicy {
        JumpingPolicy::LinearDecreasing {
            start: self.jr_max,
            end: self.jr_min,
        }
    }

    fn protective(&self) -> JumpingPolicy {
        JumpingPolicy::Protective {
            rate: self.protective_rate,
            window: self.window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeSettings {
    pub f: f64,
    pub cr: f64,
    pub np: usize,
    pub crossover: String,
}

impl Default for DeSettings {
    fn default() -> Self {
        Self {
            f: 0.5,
            cr: 0.9,
            np: 100,
            crossover: "binomial".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub de: DeSettings,
    pub obl: OblSettings,
    pub algorithms: Vec<String>,
    pub functions: Vec<String>,
    pub dimensions: Vec<usize>,
    pub runs: usize,
    /// Evaluation budget; `None` means 10000·D.
    pub budget: Option<u64>,
    pub base_seed: u64,
    /// Seed for the shift vectors and rotations of the test functions.
    pub problem_seed: u64,
    pub checkpoints: Vec<f64>,
    /// When false, wall times are recorded as zero so output is reproducible byte for byte.
    pub record_wall_time: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            de: DeSettings::default(),
            obl: OblSettings::default(),
            algorithms: vec!["de".into(), "ibetacobl".into()],
            functions: vec!["shifted-rotated-rastrigin".into()],
            dimensions: vec![30],
            runs: 51,
            budget: None,
            base_seed: 1,
            problem_seed: 2017,
            checkpoints: default_checkpoint_fractions(),
            record_wall_time: true,
        }
    }
}

/// A preset resolved against the config: a label and an optional opposition layer.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub label: String,
    pub obl: Option<OblConfig>,
}

impl AlgorithmSpec {
    pub fn strategy(&self) -> Result<Option<OblStrategy>> {
        self.obl
            .clone()
            .map(|c| OblStrategy::new(c).map(|s| s.with_label(self.label.clone())))
            .transpose()
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn parse_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(Error::config(key, format!("expected a boolean, got `{other}`"))),
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    /// Parses key=value text on top of the defaults.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `key = value`, got `{line}`", n + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Sets one key; unknown keys are configuration errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "de.F" => self.de.f = parse_num(key, value)?,
            "de.CR" => self.de.cr = parse_num(key, value)?,
            "de.NP" => self.de.np = parse_num(key, value)?,
            "de.crossover" => self.de.crossover = value.to_string(),
            "obl.policy" => self.obl.policy = value.to_string(),
            "obl.jr" => self.obl.jr = parse_num(key, value)?,
            "obl.jr_max" => self.obl.jr_max = parse_num(key, value)?,
            "obl.jr_min" => self.obl.jr_min = parse_num(key, value)?,
            "obl.protective_rate" => self.obl.protective_rate = parse_num(key, value)?,
            "obl.window" => self.obl.window = parse_num(key, value)?,
            "obl.dt" => self.obl.threshold = parse_num(key, value)?,
            "obl.t" => self.obl.segment_len = parse_num(key, value)?,
            "obl.crossover" => self.obl.crossover = Some(value.to_string()).filter(|v| !v.is_empty()),
            "obl.diversity" => self.obl.diversity = Some(value.to_string()).filter(|v| !v.is_empty()),
            "obl.interval" => self.obl.interval = value.parse()?,
            "experiment.algorithms" => self.algorithms = parse_list(value),
            "experiment.functions" => self.functions = parse_list(value),
            "experiment.dimensions" => {
                self.dimensions = parse_list(value)
                    .iter()
                    .map(|v| parse_num(key, v))
                    .collect::<Result<_>>()?
            }
            "experiment.runs" => self.runs = parse_num(key, value)?,
            "experiment.budget" => {
                self.budget = match value {
                    "" | "auto" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "experiment.base_seed" => self.base_seed = parse_num(key, value)?,
            "problem.seed" => self.problem_seed = parse_num(key, value)?,
            "experiment.checkpoints" => {
                self.checkpoints = parse_list(value)
                    .iter()
                    .map(|v| parse_num(key, v))
                    .collect::<Result<_>>()?
            }
            "output.timing" => self.record_wall_time = parse_bool(key, value)?,
            other => return Err(Error::config(other, "unknown key")),
        }
        Ok(())
    }

    /// Every key with its current value; parses back to an equal config.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("experiment.algorithms", self.algorithms.join(", "));
        put("experiment.functions", self.functions.join(", "));
        put("experiment.dimensions", join(&self.dimensions));
        put("experiment.runs", self.runs.to_string());
        put("experiment.budget", self.budget.map_or("auto".into(), |b| b.to_string()));
        put("experiment.base_seed", self.base_seed.to_string());
        put("experiment.checkpoints", join(&self.checkpoints));
        put("problem.seed", self.problem_seed.to_string());
        put("output.timing", self.record_wall_time.to_string());
        put("de.F", self.de.f.to_string());
        put("de.CR", self.de.cr.to_string());
        put("de.NP", self.de.np.to_string());
        put("de.crossover", self.de.crossover.clone());
        put("obl.policy", self.obl.policy.clone());
        put("obl.jr", self.obl.jr.to_string());
        put("obl.jr_max", self.obl.jr_max.to_string());
        put("obl.jr_min", self.obl.jr_min.to_string());
        put("obl.protective_rate", self.obl.protective_rate.to_string());
        put("obl.window", self.obl.window.to_string());
        put("obl.dt", self.obl.threshold.to_string());
        put("obl.t", self.obl.segment_len.to_string());
        put("obl.crossover", self.obl.crossover.clone().unwrap_or_default());
        put("obl.diversity", self.obl.diversity.clone().unwrap_or_default());
        put("obl.interval", self.obl.interval.to_string());
        s
    }

    pub fn budget_for(&self, dim: usize) -> u64 {
        self.budget.unwrap_or(10_000 * dim as u64)
    }

    pub fn de_config(&self, seed: u64, budget_max: u64) -> Result<DeConfig> {
        let crossover = CrossoverKind::parse(&self.de.crossover, self.obl.segment_len)
            .map_err(|e| Error::config("de.crossover", e.to_string()))?;
        let cfg = DeConfig {
            f: self.de.f,
            cr: self.de.cr,
            np: self.de.np,
            crossover,
            seed,
            budget_max,
            target_fev: None,
        };
        cfg.validate().map_err(|e| Error::config("de", e.to_string()))?;
        Ok(cfg)
    }

    /// Resolves a preset name.
    pub fn algorithm(&self, name: &str) -> Result<AlgorithmSpec> {
        let o = &self.obl;
        let base = |variant| -> Result<OblConfig> {
            let mut c = OblConfig::new(variant)
                .with_threshold(o.threshold)
                .with_interval(o.interval);
            if let CrossoverKind::MultipleExponential { .. } = c.crossover {
                c.crossover = CrossoverKind::MultipleExponential {
                    segment_len: o.segment_len,
                };
            }
            Ok(c.with_policy(o.policy()?))
        };
        let beta_overrides = |mut c: OblConfig| -> Result<OblConfig> {
            if let Some(x) = &o.crossover {
                c.crossover = CrossoverKind::parse(x, o.segment_len)
                    .map_err(|e| Error::config("obl.crossover", e.to_string()))?;
            }
            if let Some(d) = &o.diversity {
                c.diversity = DiversityKind::parse(d)?;
            }
            Ok(c)
        };
        let obl = match name {
            "de" => None,
            "obl" => Some(base(OblVariant::Obl)?),
            "qobl" => Some(base(OblVariant::Qobl)?),
            "qrobl" => Some(base(OblVariant::Qrobl)?),
            "coobl" => Some(base(OblVariant::Coobl)?),
            "gobl" => Some(base(OblVariant::Gobl)?),
            "obltvjr" => Some(base(OblVariant::Obl)?.with_policy(o.linear())),
            "oblpgj" => Some(base(OblVariant::Obl)?.with_policy(o.protective())),
            "betacobl" => Some(beta_overrides(base(OblVariant::BetaCobl)?)?),
            "ibetacobl" => Some(beta_overrides(base(OblVariant::IBetaCobl)?)?),
            "betacobl_linear1" => {
                Some(base(OblVariant::BetaCobl)?.with_diversity(DiversityKind::CenterBased))
            }
            "betacobl_linear2" => Some(base(OblVariant::BetaCobl)?.with_diversity(DiversityKind::Linear)),
            other => {
                return Err(Error::config(
                    "experiment.algorithms",
                    format!("unknown algorithm `{other}`"),
                ))
            }
        };
        if let Some(c) = &obl {
            c.validate().map_err(|e| Error::config("obl", e.to_string()))?;
        }
        Ok(AlgorithmSpec {
            label: name.to_string(),
            obl,
        })
    }

    /// Checks every name and parameter without running anything.
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::config("experiment.runs", "must be positive"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("experiment.algorithms", "empty list"));
        }
        if self.functions.is_empty() {
            return Err(Error::config("experiment.functions", "empty list"));
        }
        if self.dimensions.is_empty() || self.dimensions.contains(&0) {
            return Err(Error::config("experiment.dimensions", "need positive dimensions"));
        }
        if self.checkpoints.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
            return Err(Error::config("experiment.checkpoints", "fractions must lie in (0, 1]"));
        }
        for a in &self.algorithms {
            self.algorithm(a)?;
        }
        for &d in &self.dimensions {
            for f in &self.functions {
                TestFunction::from_name(f, d, self.problem_seed)?;
            }
            self.de_config(0, self.budget_for(d))?;
        }
        Ok(())
    }
}
