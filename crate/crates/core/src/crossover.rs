//! Recombination operators shared by the DE engine and the partial
//! dimensional change of the beta opposition schemes.
//!
//! Each operator first builds a copy mask (`true` = take the mutant
//! coordinate) and then mixes target and mutant through it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Default length of the exchanged component for multiple exponential crossover.
pub const DEFAULT_SEGMENT_LEN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrossoverKind {
    Binomial,
    Exponential,
    /// Alternating circular runs from mutant and target; `segment_len` is T.
    MultipleExponential { segment_len: f64 },
}

impl CrossoverKind {
    pub fn multiple_exponential() -> Self {
        CrossoverKind::MultipleExponential {
            segment_len: DEFAULT_SEGMENT_LEN,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CrossoverKind::Binomial => "binomial",
            CrossoverKind::Exponential => "exponential",
            CrossoverKind::MultipleExponential { .. } => "multiple_exponential",
        }
    }

    pub fn parse(name: &str, segment_len: f64) -> Result<Self> {
        match name {
            "binomial" | "bin" => Ok(CrossoverKind::Binomial),
            "exponential" | "exp" => Ok(CrossoverKind::Exponential),
            "multiple_exponential" | "mexp" => {
                check_segment_len(segment_len)?;
                Ok(CrossoverKind::MultipleExponential { segment_len })
            }
            other => Err(Error::config(
                "crossover",
                format!("unknown crossover `{other}`"),
            )),
        }
    }

    /// Fills `mask` (length D) for crossover rate `cr`.
    pub fn fill_mask<R: RandomSource + ?Sized>(&self, cr: f64, rng: &mut R, mask: &mut [bool]) {
        match *self {
            CrossoverKind::Binomial => binomial_mask(cr, rng, mask),
            CrossoverKind::Exponential => exponential_mask(cr, rng, mask),
            CrossoverKind::MultipleExponential { segment_len } => {
                multiple_exponential_mask(cr, segment_len, rng, mask)
            }
        }
    }

    /// Trial vector built from `target` and `mutant`.
    pub fn apply<R: RandomSource + ?Sized>(
        &self,
        target: &[f64],
        mutant: &[f64],
        cr: f64,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        check_inputs(target, mutant, cr)?;
        if let CrossoverKind::MultipleExponential { segment_len } = self {
            check_segment_len(*segment_len)?;
        }
        let mut mask = vec![false; target.len()];
        self.fill_mask(cr, rng, &mut mask);
        Ok(mix(target, mutant, &mask))
    }
}

impl Default for CrossoverKind {
    fn default() -> Self {
        CrossoverKind::Binomial
    }
}

fn check_inputs(target: &[f64], mutant: &[f64], cr: f64) -> Result<()> {
    if target.len() != mutant.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            found: mutant.len(),
        });
    }
    if target.is_empty() {
        return Err(Error::parameter("dimension", "vectors must be non-empty"));
    }
    if !(0.0..=1.0).contains(&cr) {
        return Err(Error::parameter("CR", format!("must lie in [0, 1], got {cr}")));
    }
    Ok(())
}

fn check_segment_len(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::parameter("T", format!("must be > 0, got {t}")));
    }
    Ok(())
}

/// `out[j] = mutant[j]` where the mask is set, `target[j]` elsewhere.
pub fn mix(target: &[f64], mutant: &[f64], mask: &[bool]) -> Vec<f64> {
    target
        .iter()
        .zip(mutant)
        .zip(mask)
        .map(|((t, m), take)| if *take { *m } else { *t })
        .collect()
}

/// One forced index `j_rand`, then one uniform per coordinate.
pub fn binomial_mask<R: RandomSource + ?Sized>(cr: f64, rng: &mut R, mask: &mut [bool]) {
    let j_rand = rng.index_below(mask.len());
    for (j, m) in mask.iter_mut().enumerate() {
        let u = rng.uniform01();
        *m = u <= cr || j == j_rand;
    }
}

/// A single circular run starting at a uniform index, continued while
/// `rand <= CR`.
pub fn exponential_mask<R: RandomSource + ?Sized>(cr: f64, rng: &mut R, mask: &mut [bool]) {
    let d = mask.len();
    mask.iter_mut().for_each(|m| *m = false);
    let start = rng.index_below(d);
    let mut len = 0;
    loop {
        mask[(start + len) % d] = true;
        len += 1;
        if len >= d || rng.uniform01() > cr {
            break;
        }
    }
}

/// Derived constants of multiple exponential crossover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentRates {
    /// Expected size of a component copied from the mutant.
    pub mutant_len: f64,
    /// Expected size of a component copied from the target.
    pub target_len: f64,
    /// Continuation probability inside a mutant run.
    pub mutant_continue: f64,
    /// Continuation probability inside a target run.
    pub target_continue: f64,
}

impl SegmentRates {
    pub fn new(cr: f64, segment_len: f64) -> Self {
        let em = segment_len * cr;
        let es = segment_len * (1.0 - cr);
        Self {
            mutant_len: em,
            target_len: es,
            mutant_continue: em / (em + 1.0),
            target_continue: es / (es + 1.0),
        }
    }
}

/// Alternating mutant/target runs around the circle, starting with a mutant
/// run at a uniform index. Each run has length at least one and continues
/// with its own probability, giving mean lengths `E_m + 1` and `E_s + 1`.
///
/// `CR = 0` yields a single mutant coordinate; `CR = 1` the full mutant.
pub fn multiple_exponential_mask<R: RandomSource + ?Sized>(
    cr: f64,
    segment_len: f64,
    rng: &mut R,
    mask: &mut [bool],
) {
    let d = mask.len();
    if cr >= 1.0 {
        mask.iter_mut().for_each(|m| *m = true);
        return;
    }
    let start = rng.index_below(d);
    if cr <= 0.0 {
        mask.iter_mut().for_each(|m| *m = false);
        mask[start] = true;
        return;
    }
    let rates = SegmentRates::new(cr, segment_len);
    let log_p = [rates.mutant_continue.ln(), rates.target_continue.ln()];
    let mut assigned = 0;
    let mut j = start;
    let mut from_mutant = true;
    while assigned < d {
        // run length 1 + Geometric: P(extra >= k) = P(u <= p^k) = p^k
        let u = rng.uniform01();
        let extra = (u.ln() / log_p[usize::from(!from_mutant)]).floor();
        let len = if extra >= (d - assigned) as f64 { d - assigned } else { 1 + extra as usize };
        for _ in 0..len {
            mask[j] = from_mutant;
            j += 1;
            if j == d {
                j = 0;
            }
        }
        assigned += len;
        from_mutant = !from_mutant;
    }
}

pub fn binomial<R: RandomSource + ?Sized>(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    CrossoverKind::Binomial.apply(target, mutant, cr, rng)
}

pub fn exponential<R: RandomSource + ?Sized>(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    CrossoverKind::Exponential.apply(target, mutant, cr, rng)
}

pub fn multiple_exponential<R: RandomSource + ?Sized>(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    segment_len: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    CrossoverKind::MultipleExponential { segment_len }.apply(target, mutant, cr, rng)
}
