//! Jumping-rate schedules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the probability of an opposition jump evolves over a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpingPolicy {
    Constant { rate: f64 },
    /// Linear in consumed-budget fraction, from `start` down to `end`.
    LinearDecreasing { start: f64, end: f64 },
    /// Constant rate, switched off for good after `window` consecutive
    /// strict drops in jump success rate.
    Protective { rate: f64, window: usize },
}

impl Default for JumpingPolicy {
    fn default() -> Self {
        JumpingPolicy::Constant { rate: 0.05 }
    }
}

impl JumpingPolicy {
    pub fn linear_default() -> Self {
        JumpingPolicy::LinearDecreasing {
            start: 0.3,
            end: 0.0,
        }
    }

    pub fn protective_default() -> Self {
        JumpingPolicy::Protective {
            rate: 0.3,
            window: 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            JumpingPolicy::Constant { .. } => "constant",
            JumpingPolicy::LinearDecreasing { .. } => "linear",
            JumpingPolicy::Protective { .. } => "protective",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::parameter(name, format!("must lie in [0, 1], got {v}")))
            }
        };
        match *self {
            JumpingPolicy::Constant { rate } => check("J_r", rate),
            JumpingPolicy::LinearDecreasing { start, end } => {
                check("J_r max", start)?;
                check("J_r min", end)
            }
            JumpingPolicy::Protective { rate, window } => {
                check("J_r", rate)?;
                if window == 0 {
                    return Err(Error::parameter("window", "must be positive"));
                }
                Ok(())
            }
        }
    }
}

/// Mutable per-run state of a [`JumpingPolicy`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JumpSchedule {
    policy: JumpingPolicy,
    last_rate: Option<f64>,
    drops: usize,
    disabled: bool,
}

impl JumpSchedule {
    pub fn new(policy: JumpingPolicy) -> Self {
        Self {
            policy,
            last_rate: None,
            drops: 0,
            disabled: false,
        }
    }

    pub fn policy(&self) -> &JumpingPolicy {
        &self.policy
    }

    pub fn is_disabled(&self) -> bool {
        self.disabled
    }

    /// Jump probability at budget fraction `progress` in `[0, 1]`.
    pub fn probability(&self, progress: f64) -> f64 {
        if self.disabled {
            return 0.0;
        }
        match self.policy {
            JumpingPolicy::Constant { rate } | JumpingPolicy::Protective { rate, .. } => rate,
            JumpingPolicy::LinearDecreasing { start, end } => {
                let t = progress.clamp(0.0, 1.0);
                start + (end - start) * t
            }
        }
    }

    /// Feeds the success rate (accepted / offered opposites) of a
    /// generation jump.
    pub fn record(&mut self, success_rate: f64) {
        let JumpingPolicy::Protective { window, .. } = self.policy else {
            return;
        };
        if self.disabled {
            return;
        }
        match self.last_rate {
            Some(prev) if success_rate < prev => self.drops += 1,
            _ => self.drops = 0,
        }
        self.last_rate = Some(success_rate);
        if self.drops >= window {
            self.disabled = true;
        }
    }

    pub fn reset(&mut self) {
        *self = Self::new(self.policy);
    }
}
