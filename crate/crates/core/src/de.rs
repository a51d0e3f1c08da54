//! DE/rand/1 engine with an optional opposition layer.
//!
//! Generations are synchronous: all NP trials are built from the current
//! population and selection happens afterwards. The jump decision is drawn
//! once per generation; a jump replaces that generation's DE step.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{random_point, Bounds};
use crate::budget::EvaluationBudget;
use crate::crossover::{mix, CrossoverKind};
use crate::error::{Error, Result};
use crate::objective::{Evaluator, Problem};
use crate::obl::{JumpStage, Opposition, PhaseKind};
use crate::population::{Individual, Population};
use crate::rng::{RandomSource, RngStream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub f: f64,
    pub cr: f64,
    pub np: usize,
    pub crossover: CrossoverKind,
    pub seed: u64,
    pub budget_max: u64,
    /// Stop once the best FEV is at or below this value.
    pub target_fev: Option<f64>,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            f: 0.5,
            cr: 0.9,
            np: 100,
            crossover: CrossoverKind::Binomial,
            seed: 0,
            budget_max: 100_000,
            target_fev: None,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.f > 0.0) || !self.f.is_finite() {
            return Err(Error::parameter("F", format!("must be > 0, got {}", self.f)));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::parameter("CR", format!("must lie in [0, 1], got {}", self.cr)));
        }
        if self.np < 4 {
            return Err(Error::parameter("NP", format!("must be >= 4, got {}", self.np)));
        }
        if self.budget_max < self.np as u64 {
            return Err(Error::parameter(
                "budget_max",
                format!("must cover the initial population ({}), got {}", self.np, self.budget_max),
            ));
        }
        if let CrossoverKind::MultipleExponential { segment_len } = self.crossover {
            if !(segment_len > 0.0) || !segment_len.is_finite() {
                return Err(Error::parameter("T", format!("must be > 0, got {segment_len}")));
            }
        }
        Ok(())
    }
}

/// How many phases of each kind a run executed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCounts {
    pub de_generations: u64,
    pub mu_plus_lambda: u64,
    pub mu_comma_lambda: u64,
    pub merge: u64,
}

impl PhaseCounts {
    fn add(&mut self, kind: PhaseKind) {
        match kind {
            PhaseKind::MuPlusLambda => self.mu_plus_lambda += 1,
            PhaseKind::MuCommaLambda => self.mu_comma_lambda += 1,
            PhaseKind::Merge => self.merge += 1,
        }
    }

    pub fn jumps(&self) -> u64 {
        self.mu_plus_lambda + self.mu_comma_lambda + self.merge
    }
}

/// Result of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub function: String,
    pub dimension: usize,
    pub algorithm: String,
    /// NFE counts at which the trace was sampled.
    pub checkpoints: Vec<u64>,
    /// Best-so-far FEV at each checkpoint; non-increasing.
    pub checkpoint_fev: Vec<f64>,
    pub final_fev: f64,
    pub nfes: u64,
    pub wall_ms: f64,
    pub phases: PhaseCounts,
}

/// Three mutually distinct indices in `0..np`, all different from `target`.
pub fn donor_indices<R: RandomSource + ?Sized>(np: usize, target: usize, rng: &mut R) -> [usize; 3] {
    debug_assert!(np >= 4 && target < np);
    let mut r1 = rng.index_below(np);
    while r1 == target {
        r1 = rng.index_below(np);
    }
    let mut r2 = rng.index_below(np);
    while r2 == target || r2 == r1 {
        r2 = rng.index_below(np);
    }
    let mut r3 = rng.index_below(np);
    while r3 == target || r3 == r1 || r3 == r2 {
        r3 = rng.index_below(np);
    }
    [r1, r2, r3]
}

/// `x_r1 + F (x_r2 - x_r3)` projected onto the box.
pub fn mutate_rand1<R: RandomSource + ?Sized>(
    pop: &Population,
    target: usize,
    f: f64,
    bounds: &Bounds,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if pop.len() < 4 {
        return Err(Error::InsufficientPopulation {
            required: 4,
            found: pop.len(),
        });
    }
    if target >= pop.len() {
        return Err(Error::parameter("target", format!("index {target} out of range")));
    }
    bounds.check_len(&pop.members[0].genome)?;
    let [r1, r2, r3] = donor_indices(pop.len(), target, rng);
    Ok(difference_vector(pop, [r1, r2, r3], f, bounds))
}

fn difference_vector(pop: &Population, [r1, r2, r3]: [usize; 3], f: f64, bounds: &Bounds) -> Vec<f64> {
    let (a, b, c) = (&pop.members[r1].genome, &pop.members[r2].genome, &pop.members[r3].genome);
    let mut v: Vec<f64> = a.iter().zip(b).zip(c).map(|((a, b), c)| a + f * (b - c)).collect();
    bounds.clamp_in_place(&mut v);
    v
}

/// Greedy one-to-one selection; a tie goes to the trial.
pub fn select(target: Individual, trial: Individual) -> Result<Individual> {
    if trial.fitness()? <= target.fitness()? {
        Ok(trial)
    } else {
        Ok(target)
    }
}

/// NP uniform random members, all evaluated.
pub fn initialize<R: RandomSource + ?Sized>(
    np: usize,
    eval: &mut Evaluator<'_>,
    rng: &mut R,
) -> Result<Population> {
    eval.reserve(np as u64)?;
    let bounds = eval.bounds();
    let mut members = Vec::with_capacity(np);
    for _ in 0..np {
        let g = random_point(bounds, rng);
        let v = eval.evaluate(&g)?;
        members.push(Individual::evaluated(g, v));
    }
    Ok(Population::new(members))
}

/// One synchronous DE generation over the whole population; NP evaluations.
pub fn generation<R: RandomSource + ?Sized>(
    pop: &mut Population,
    config: &DeConfig,
    eval: &mut Evaluator<'_>,
    rng: &mut R,
) -> Result<()> {
    let np = pop.len();
    if np < 4 {
        return Err(Error::InsufficientPopulation { required: 4, found: np });
    }
    eval.reserve(np as u64)?;
    let bounds = eval.bounds();
    let mut mask = vec![false; pop.dim()];
    let mut trials = Vec::with_capacity(np);
    for i in 0..np {
        let donors = donor_indices(np, i, rng);
        let v = difference_vector(pop, donors, config.f, bounds);
        config.crossover.fill_mask(config.cr, rng, &mut mask);
        let u = mix(&pop.members[i].genome, &v, &mask);
        let fu = eval.evaluate(&u)?;
        trials.push(Individual::evaluated(u, fu));
    }
    for (slot, trial) in pop.members.iter_mut().zip(trials) {
        if trial.fitness()? <= slot.fitness()? {
            *slot = trial;
        }
    }
    pop.generation += 1;
    Ok(())
}

fn stop_on_budget<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::BudgetExhausted { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Full run until the budget cannot cover another phase.
pub fn run(
    config: &DeConfig,
    problem: &dyn Problem,
    mut obl: Option<&mut dyn Opposition>,
    checkpoints: &[u64],
) -> Result<RunRecord> {
    config.validate()?;
    let start = Instant::now();
    let mut rng = RngStream::new(config.seed);
    let budget = EvaluationBudget::new(config.budget_max)?;
    let mut eval = Evaluator::new(problem, budget).with_checkpoints(checkpoints.to_vec());
    let mut phases = PhaseCounts::default();
    if let Some(o) = obl.as_deref_mut() {
        o.reset();
    }

    let mut pop = initialize(config.np, &mut eval, &mut rng)?;
    if let Some(o) = obl.as_deref_mut() {
        if let Some(rep) = stop_on_budget(o.apply(&mut pop, &mut eval, &mut rng, JumpStage::Initialization))? {
            phases.add(rep.kind);
        }
    }

    let reached = |eval: &Evaluator<'_>| config.target_fev.is_some_and(|t| eval.best_fev() <= t);
    while !reached(&eval) {
        let jump = match obl.as_deref() {
            Some(o) => {
                let p = o.jump_probability(eval.budget().progress());
                let u = rng.uniform01();
                p > 0.0 && u <= p
            }
            None => false,
        };
        if jump {
            let o = obl.as_deref_mut().expect("jump implies a strategy");
            match stop_on_budget(o.apply(&mut pop, &mut eval, &mut rng, JumpStage::Generation))? {
                Some(rep) => phases.add(rep.kind),
                None => break,
            }
        } else {
            match stop_on_budget(generation(&mut pop, config, &mut eval, &mut rng))? {
                Some(()) => phases.de_generations += 1,
                None => break,
            }
        }
    }

    let final_fev = eval.best_fev();
    let (trace, budget) = eval.finish();
    Ok(RunRecord {
        run: 0,
        seed: config.seed,
        function: problem.name().to_string(),
        dimension: problem.dim(),
        algorithm: obl.map_or_else(|| "de".to_string(), |o| o.name()),
        checkpoints: checkpoints.to_vec(),
        checkpoint_fev: trace,
        final_fev,
        nfes: budget.used(),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        phases,
    })
}
