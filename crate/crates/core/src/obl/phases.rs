//! Selection phases of an opposition jump.
//!
//! Every phase reserves its whole evaluation cost before touching the
//! population, so a refused phase leaves both population and budget as
//! they were.

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::crossover::{mix, CrossoverKind};
use crate::error::{Error, Result};
use crate::objective::Evaluator;
use crate::population::{Individual, Population};
use crate::rng::RandomSource;

use super::beta::beta_opposite;
use super::opposite::type1_opposite;

/// Which selection a jump used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    /// Beta scheme, high diversity: keep the NP best of originals and 2·NP partial opposites.
    MuPlusLambda,
    /// Beta scheme, low diversity: guarded replacement of the worse half.
    MuCommaLambda,
    /// Classic variants: keep the NP best of originals and NP opposites.
    Merge,
}

/// Outcome of one opposition jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpReport {
    pub kind: PhaseKind,
    /// Objective evaluations consumed.
    pub evaluations: u64,
    /// Opposite candidates offered to selection.
    pub offered: u64,
    /// Opposite candidates that entered the population.
    pub accepted: u64,
    /// Diversity that drove the switch (beta schemes only).
    pub norm_div: Option<f64>,
}

impl JumpReport {
    pub fn success_rate(&self) -> f64 {
        if self.offered == 0 {
            0.0
        } else {
            self.accepted as f64 / self.offered as f64
        }
    }
}

/// Settings of the partial dimensional change shared by both beta phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialChange {
    pub crossover: CrossoverKind,
    /// Crossover rates for the two partial opposites.
    pub rates: [f64; 2],
}

impl PartialChange {
    pub fn new(crossover: CrossoverKind) -> Self {
        Self {
            crossover,
            rates: [0.1, 0.9],
        }
    }
}

/// Complete opposite for the beta schemes over `interval`; type-I when the
/// population has collapsed to a point (zero diversity).
fn complete_opposite<R: RandomSource + ?Sized>(
    x: &[f64],
    interval: &Bounds,
    norm_div: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if norm_div == 0.0 {
        return Ok(type1_opposite(x, interval.lower(), interval.upper()));
    }
    beta_opposite(x, interval, norm_div, rng)
}

/// Two partial opposites built from one complete opposite.
fn partial_pair<R: RandomSource + ?Sized>(
    x: &[f64],
    interval: &Bounds,
    norm_div: f64,
    change: &PartialChange,
    rng: &mut R,
) -> Result<[Vec<f64>; 2]> {
    let t = complete_opposite(x, interval, norm_div, rng)?;
    // same draws as two `partial_opposite` calls, with one mask buffer
    let mut mask = vec![false; x.len()];
    change.crossover.fill_mask(change.rates[0], rng, &mut mask);
    let p1 = mix(x, &t, &mask);
    change.crossover.fill_mask(change.rates[1], rng, &mut mask);
    let p2 = mix(x, &t, &mask);
    Ok([p1, p2])
}

fn evaluated_members(pop: &Population) -> Result<Vec<f64>> {
    pop.members.iter().map(Individual::fitness).collect()
}

/// Keeps the NP best of `pop` ∪ `candidates`. Originals win ties; surviving
/// originals keep their slots and the freed slots take the surviving
/// candidates in rank order. Returns the number of candidates accepted.
pub fn merge_truncate(pop: &mut Population, candidates: Vec<Individual>) -> Result<u64> {
    let np = pop.len();
    let orig = evaluated_members(pop)?;
    let cand: Vec<f64> = candidates
        .iter()
        .map(Individual::fitness)
        .collect::<Result<_>>()?;
    // pool index: originals first, so the stable sort favours them on ties
    let mut order: Vec<usize> = (0..np + cand.len()).collect();
    let value = |k: usize| if k < np { orig[k] } else { cand[k - np] };
    order.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
    let mut keep = vec![false; np];
    let mut incoming = Vec::new();
    for &k in &order[..np] {
        if k < np {
            keep[k] = true;
        } else {
            incoming.push(k - np);
        }
    }
    let accepted = incoming.len() as u64;
    let mut slots = keep.iter().enumerate().filter(|(_, &k)| !k).map(|(i, _)| i);
    let mut candidates: Vec<Option<Individual>> = candidates.into_iter().map(Some).collect();
    for c in incoming {
        let slot = slots.next().expect("one freed slot per incoming candidate");
        pop.members[slot] = candidates[c].take().expect("candidate used once");
    }
    Ok(accepted)
}

/// Beta (μ+λ) phase: 2·NP evaluations. Opposites are drawn over `interval`,
/// which must lie inside the problem bounds.
pub fn mu_plus_lambda_phase<R: RandomSource + ?Sized>(
    pop: &mut Population,
    eval: &mut Evaluator<'_>,
    interval: &Bounds,
    norm_div: f64,
    change: &PartialChange,
    rng: &mut R,
) -> Result<JumpReport> {
    let np = pop.len();
    let cost = 2 * np as u64;
    eval.reserve(cost)?;
    let mut low = Vec::with_capacity(np);
    let mut high = Vec::with_capacity(np);
    for i in 0..np {
        let [p1, p2] = partial_pair(&pop.members[i].genome, interval, norm_div, change, rng)?;
        let f1 = eval.evaluate(&p1)?;
        let f2 = eval.evaluate(&p2)?;
        low.push(Individual::evaluated(p1, f1));
        high.push(Individual::evaluated(p2, f2));
    }
    low.extend(high);
    let accepted = merge_truncate(pop, low)?;
    Ok(JumpReport {
        kind: PhaseKind::MuPlusLambda,
        evaluations: cost,
        offered: cost,
        accepted,
        norm_div: Some(norm_div),
    })
}

/// Number of members the (μ,λ) phase processes: the worse `⌈NP/2⌉`.
pub fn comma_processed(np: usize) -> usize {
    np - np / 2
}

/// Beta (μ,λ) phase: sorts, then offers each member of the worse half the
/// better of its two partial opposites. `2·⌈NP/2⌉` evaluations.
pub fn mu_comma_lambda_phase<R: RandomSource + ?Sized>(
    pop: &mut Population,
    eval: &mut Evaluator<'_>,
    interval: &Bounds,
    norm_div: f64,
    change: &PartialChange,
    rng: &mut R,
) -> Result<JumpReport> {
    let np = pop.len();
    let cost = 2 * comma_processed(np) as u64;
    eval.reserve(cost)?;
    pop.sort_by_fitness()?;
    let mut accepted = 0;
    for i in np / 2..np {
        let [p1, p2] = partial_pair(&pop.members[i].genome, interval, norm_div, change, rng)?;
        let f1 = eval.evaluate(&p1)?;
        let f2 = eval.evaluate(&p2)?;
        let (p, f) = if f1 <= f2 { (p1, f1) } else { (p2, f2) };
        if f <= pop.members[i].fitness()? {
            pop.members[i] = Individual::evaluated(p, f);
            accepted += 1;
        }
    }
    Ok(JumpReport {
        kind: PhaseKind::MuCommaLambda,
        evaluations: cost,
        offered: comma_processed(np) as u64,
        accepted,
        norm_div: Some(norm_div),
    })
}

/// Classic jump: one opposite per member from `opposite(i, genome)`,
/// NP evaluations, then merge and truncate.
pub fn merge_phase<F>(pop: &mut Population, eval: &mut Evaluator<'_>, mut opposite: F) -> Result<JumpReport>
where
    F: FnMut(usize, &[f64]) -> Vec<f64>,
{
    let np = pop.len();
    if np == 0 {
        return Err(Error::InsufficientPopulation { required: 1, found: 0 });
    }
    let cost = np as u64;
    eval.reserve(cost)?;
    let mut candidates = Vec::with_capacity(np);
    for i in 0..np {
        let o = opposite(i, &pop.members[i].genome);
        let f = eval.evaluate(&o)?;
        candidates.push(Individual::evaluated(o, f));
    }
    let accepted = merge_truncate(pop, candidates)?;
    Ok(JumpReport {
        kind: PhaseKind::Merge,
        evaluations: cost,
        offered: cost,
        accepted,
        norm_div: None,
    })
}
