//! Benchmark objectives with known optima, shift/rotation transforms, the
//! function-error-value metric and the budget-charging evaluator.
//!
//! Functions are addressed by name: a base name (`sphere`, `rosenbrock`,
//! `rastrigin`, `ackley`, `griewank`, `schwefel-1.2`) optionally prefixed by
//! `shifted-` or `shifted-rotated-`. Shift vectors are drawn uniformly from
//! `[-80, 80]^D`; rotations are the Q factor of a seeded Gaussian matrix.
//! Both are regenerated from the problem seed, so persisting the seed
//! persists the instance.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::bounds::Bounds;
use crate::budget::EvaluationBudget;
use crate::error::{Error, Result};
use crate::rng::{RandomSource, RngStream};

/// Default search range on every axis.
pub const DEFAULT_RANGE: (f64, f64) = (-100.0, 100.0);
const SHIFT_RANGE: f64 = 80.0;

/// Anything the optimizer can minimize.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;
    fn bounds(&self) -> &Bounds;
    fn value(&self, x: &[f64]) -> f64;
    fn optimum_value(&self) -> f64;

    fn dim(&self) -> usize {
        self.bounds().dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseFunction {
    Sphere,
    Rosenbrock,
    Rastrigin,
    Ackley,
    Griewank,
    Schwefel12,
}

impl BaseFunction {
    pub const ALL: [BaseFunction; 6] = [
        BaseFunction::Sphere,
        BaseFunction::Rosenbrock,
        BaseFunction::Rastrigin,
        BaseFunction::Ackley,
        BaseFunction::Griewank,
        BaseFunction::Schwefel12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseFunction::Sphere => "sphere",
            BaseFunction::Rosenbrock => "rosenbrock",
            BaseFunction::Rastrigin => "rastrigin",
            BaseFunction::Ackley => "ackley",
            BaseFunction::Griewank => "griewank",
            BaseFunction::Schwefel12 => "schwefel-1.2",
        }
    }

    pub fn is_unimodal(self) -> bool {
        matches!(
            self,
            BaseFunction::Sphere | BaseFunction::Rosenbrock | BaseFunction::Schwefel12
        )
    }

    /// Minimizer of the untransformed function.
    pub fn optimum_location(self, dim: usize) -> Vec<f64> {
        match self {
            BaseFunction::Rosenbrock => vec![1.0; dim],
            _ => vec![0.0; dim],
        }
    }

    pub fn eval(self, z: &[f64]) -> f64 {
        match self {
            BaseFunction::Sphere => z.iter().map(|v| v * v).sum(),
            BaseFunction::Rosenbrock => z
                .windows(2)
                .map(|w| {
                    let a = w[1] - w[0] * w[0];
                    let b = w[0] - 1.0;
                    100.0 * a * a + b * b
                })
                .sum(),
            BaseFunction::Rastrigin => z
                .iter()
                .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
                .sum(),
            BaseFunction::Ackley => {
                let n = z.len() as f64;
                let sq = z.iter().map(|v| v * v).sum::<f64>() / n;
                let cs = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
                -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
            }
            BaseFunction::Griewank => {
                let s = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let p = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product::<f64>();
                s - p + 1.0
            }
            BaseFunction::Schwefel12 => {
                let mut prefix = 0.0;
                let mut total = 0.0;
                for v in z {
                    prefix += v;
                    total += prefix * prefix;
                }
                total
            }
        }
    }
}

impl FromStr for BaseFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseFunction::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::config("function", format!("unknown base function `{s}`")))
    }
}

/// Orthogonal matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    dim: usize,
    rows: Vec<f64>,
}

impl Rotation {
    /// Q factor of a QR decomposition of a seeded standard-Gaussian matrix,
    /// with column signs fixed so the draw is uniform over the orthogonal group.
    pub fn random<R: RandomSource + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let g = DMatrix::from_fn(dim, dim, |_, _| rng.standard_normal());
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for c in 0..dim {
            if r[(c, c)] < 0.0 {
                q.column_mut(c).neg_mut();
            }
        }
        let rows = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| q[(i, j)])
            .collect();
        Self { dim, rows }
    }

    pub fn identity(dim: usize) -> Self {
        let mut rows = vec![0.0; dim * dim];
        for i in 0..dim {
            rows[i * dim + i] = 1.0;
        }
        Self { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i * self.dim + j]
    }

    /// `out = M v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.rows.chunks_exact(self.dim)) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `out = Mᵀ v`.
    pub fn apply_transpose(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (vi, row) in v.iter().zip(self.rows.chunks_exact(self.dim)) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * vi;
            }
        }
    }

    /// Largest entry of `|MᵀM - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d).map(|k| self.get(k, i) * self.get(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// `z = M (x - o)`; the rotation is optional.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    pub shift: Vec<f64>,
    pub rotation: Option<Rotation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Plain,
    Shifted,
    ShiftedRotated,
}

/// A named benchmark instance.
#[derive(Debug, Clone)]
pub struct TestFunction {
    name: String,
    base: BaseFunction,
    bounds: Bounds,
    transform: Option<Transform>,
    optimum_value: f64,
}

impl TestFunction {
    pub fn new(base: BaseFunction, bounds: Bounds, transform: Option<Transform>) -> Result<Self> {
        if let Some(t) = &transform {
            bounds.check_len(&t.shift)?;
            if let Some(m) = &t.rotation {
                if m.dim() != bounds.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: bounds.dim(),
                        found: m.dim(),
                    });
                }
            }
        }
        let name = match &transform {
            None => base.name().to_string(),
            Some(Transform { rotation: None, .. }) => format!("shifted-{}", base.name()),
            Some(_) => format!("shifted-rotated-{}", base.name()),
        };
        Ok(Self {
            name,
            base,
            bounds,
            transform,
            optimum_value: 0.0,
        })
    }

    /// Untransformed function on the default `[-100, 100]^D` box.
    pub fn plain(base: BaseFunction, dim: usize) -> Result<Self> {
        let bounds = Bounds::uniform(dim, DEFAULT_RANGE.0, DEFAULT_RANGE.1)?;
        Self::new(base, bounds, None)
    }

    /// Resolves a registry name at dimension `dim`. Shift and rotation are
    /// drawn from a stream keyed by `(seed, base, dim)`.
    pub fn from_name(name: &str, dim: usize, seed: u64) -> Result<Self> {
        let (variant, base_name) = if let Some(rest) = name.strip_prefix("shifted-rotated-") {
            (Variant::ShiftedRotated, rest)
        } else if let Some(rest) = name.strip_prefix("shifted-") {
            (Variant::Shifted, rest)
        } else {
            (Variant::Plain, name)
        };
        let base: BaseFunction = base_name
            .parse()
            .map_err(|_| Error::config("function", format!("unknown function `{name}`")))?;
        if dim == 0 {
            return Err(Error::config("dimension", "must be at least 1"));
        }
        let bounds = Bounds::uniform(dim, DEFAULT_RANGE.0, DEFAULT_RANGE.1)?;
        let base_idx = BaseFunction::ALL.iter().position(|b| *b == base).unwrap() as u64;
        let mut rng = RngStream::new(
            seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add((base_idx << 32) ^ dim as u64),
        );
        let transform = match variant {
            Variant::Plain => None,
            Variant::Shifted | Variant::ShiftedRotated => {
                let shift = (0..dim)
                    .map(|_| rng.uniform(-SHIFT_RANGE, SHIFT_RANGE))
                    .collect();
                let rotation =
                    (variant == Variant::ShiftedRotated).then(|| Rotation::random(dim, &mut rng));
                Some(Transform { shift, rotation })
            }
        };
        Self::new(base, bounds, transform)
    }

    /// Every registry name for listing.
    pub fn registry_names() -> Vec<String> {
        let mut names = Vec::new();
        for b in BaseFunction::ALL {
            names.push(b.name().to_string());
            names.push(format!("shifted-{}", b.name()));
            names.push(format!("shifted-rotated-{}", b.name()));
        }
        names
    }

    pub fn base(&self) -> BaseFunction {
        self.base
    }

    pub fn transform(&self) -> Option<&Transform> {
        self.transform.as_ref()
    }

    /// Location of the global minimum in search-space coordinates.
    pub fn optimum_location(&self) -> Vec<f64> {
        let z_star = self.base.optimum_location(self.dim());
        match &self.transform {
            None => z_star,
            Some(t) => {
                let mut x = z_star.clone();
                if let Some(m) = &t.rotation {
                    m.apply_transpose(&z_star, &mut x);
                }
                x.iter_mut().zip(&t.shift).for_each(|(v, o)| *v += o);
                x
            }
        }
    }
}

impl Problem for TestFunction {
    fn name(&self) -> &str {
        &self.name
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn value(&self, x: &[f64]) -> f64 {
        match &self.transform {
            None => self.base.eval(x),
            Some(t) => {
                let shifted: Vec<f64> = x.iter().zip(&t.shift).map(|(a, o)| a - o).collect();
                match &t.rotation {
                    None => self.base.eval(&shifted),
                    Some(m) => {
                        let mut z = vec![0.0; shifted.len()];
                        m.apply(&shifted, &mut z);
                        self.base.eval(&z)
                    }
                }
            }
        }
    }

    fn optimum_value(&self) -> f64 {
        self.optimum_value
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (D={})", self.name, self.dim())
    }
}

/// Charges one evaluation and returns `f(x)`.
pub fn evaluate(f: &dyn Problem, x: &[f64], budget: &mut EvaluationBudget) -> Result<f64> {
    budget.charge()?;
    Ok(f.value(x))
}

/// Function error value: `best - f(x*)`.
pub fn fev(best_value: f64, f: &dyn Problem) -> f64 {
    best_value - f.optimum_value()
}

/// Budget-charging evaluator that tracks the best value seen and records
/// the best-so-far FEV whenever the evaluation count reaches a checkpoint.
pub struct Evaluator<'a> {
    problem: &'a dyn Problem,
    budget: EvaluationBudget,
    best: f64,
    checkpoints: Vec<u64>,
    trace: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a dyn Problem, budget: EvaluationBudget) -> Self {
        Self {
            problem,
            budget,
            best: f64::INFINITY,
            checkpoints: Vec::new(),
            trace: Vec::new(),
        }
    }

    /// Checkpoints are NFE counts; they are sorted before use.
    pub fn with_checkpoints(mut self, mut checkpoints: Vec<u64>) -> Self {
        checkpoints.sort_unstable();
        self.checkpoints = checkpoints;
        self
    }

    pub fn problem(&self) -> &'a dyn Problem {
        self.problem
    }

    pub fn bounds(&self) -> &'a Bounds {
        self.problem.bounds()
    }

    pub fn budget(&self) -> &EvaluationBudget {
        &self.budget
    }

    /// Fails unless `n` more evaluations fit in the budget.
    pub fn reserve(&self, n: u64) -> Result<()> {
        self.budget.reserve(n)
    }

    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let v = evaluate(self.problem, x, &mut self.budget)?;
        if v < self.best {
            self.best = v;
        }
        let used = self.budget.used();
        while self.trace.len() < self.checkpoints.len() && used >= self.checkpoints[self.trace.len()]
        {
            self.trace.push(self.best - self.problem.optimum_value());
        }
        Ok(v)
    }

    pub fn best_value(&self) -> f64 {
        self.best
    }

    pub fn best_fev(&self) -> f64 {
        fev(self.best, self.problem)
    }

    /// Checkpoint trace; checkpoints never reached repeat the final best FEV.
    pub fn finish(self) -> (Vec<f64>, EvaluationBudget) {
        let final_fev = self.best_fev();
        let mut trace = self.trace;
        trace.resize(self.checkpoints.len(), final_fev);
        (trace, self.budget)
    }
}
