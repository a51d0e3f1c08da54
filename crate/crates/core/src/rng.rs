//! Deterministic random-number contract.
//!
//! Every stochastic operator in the crate is generic over [`RandomSource`],
//! so tests can drive them with scripted draws while production code uses
//! [`RngStream`], a seeded xoshiro256++ generator.
//!
//! Gamma variates use the Marsaglia–Tsang squeeze/rejection method (with the
//! `U^(1/a)` boost for shapes below one, written as `exp(-E/a)` with `E`
//! standard exponential). Beta variates are the ratio `g1 / (g1 + g2)` of two
//! Gamma draws, re-drawn until strictly inside (0, 1).

use rand::{Rng, RngCore, SeedableRng};
use rand_distr::{Exp1, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

/// Version tag of the generator family and seeding scheme, echoed into
/// result metadata so published numbers can be tied to a generator.
pub const RNG_VERSION: &str = "xoshiro256++/splitmix64-seed/v1";

const MAX_BETA_REDRAWS: usize = 64;

/// Source of the primitive draws every operator consumes.
pub trait RandomSource {
    /// Uniform draw in `[0, 1)`.
    fn uniform01(&mut self) -> f64;

    /// Uniform index in `0..n`. `n` must be positive.
    fn index_below(&mut self, n: usize) -> usize;

    /// Draw from N(0, 1).
    fn standard_normal(&mut self) -> f64;

    /// Draw from Exp(1).
    fn standard_exponential(&mut self) -> f64 {
        -(1.0 - self.uniform01()).ln()
    }

    /// Uniform draw in `[lo, hi)`.
    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.uniform01() * (hi - lo)
    }

    /// Uniform integer in the inclusive range `[lo, hi]`.
    fn int_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.index_below((hi - lo + 1) as usize) as i64
    }

    /// Draw from N(mean, variance). Note the second argument is the variance.
    fn gaussian(&mut self, mean: f64, variance: f64) -> Result<f64> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::parameter("variance", format!("must be > 0, got {variance}")));
        }
        Ok(mean + variance.sqrt() * self.standard_normal())
    }

    /// Draw from Gamma(shape, 1).
    fn gamma(&mut self, shape: f64) -> Result<f64> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(Error::parameter("shape", format!("must be > 0, got {shape}")));
        }
        Ok(gamma_unchecked(self, shape))
    }

    /// Draw from Beta(alpha, beta), strictly inside `(0, 1)`.
    fn beta(&mut self, alpha: f64, beta: f64) -> Result<f64> {
        check_shapes(alpha, beta)?;
        Ok(beta_unchecked(self, alpha, beta))
    }
}

fn check_shapes(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(bad_shape("alpha", alpha));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(bad_shape("beta", beta));
    }
    Ok(())
}

#[cold]
fn bad_shape(name: &'static str, v: f64) -> Error {
    Error::parameter(name, format!("must be > 0, got {v}"))
}

fn gamma_unchecked<R: RandomSource + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    let (g, log_boost) = GammaShape::new(shape).parts(rng);
    g * log_boost.exp()
}

/// Marsaglia–Tsang constants for one shape, so that a shape shared by many
/// draws pays for its square root and divisions once.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GammaShape {
    d: f64,
    c: f64,
    /// `1 / shape` below one, where the boost applies; zero otherwise.
    inv_boost: f64,
}

impl GammaShape {
    #[inline]
    pub(crate) fn new(shape: f64) -> Self {
        let (base, inv_boost) = if shape < 1.0 { (shape + 1.0, 1.0 / shape) } else { (shape, 0.0) };
        let d = base - 1.0 / 3.0;
        Self {
            d,
            c: 1.0 / (9.0 * d).sqrt(),
            inv_boost,
        }
    }

    /// Gamma(shape) as `g * exp(log_boost)`; `log_boost` is zero for shapes
    /// of at least one, and `-E / shape` (the log of `U^(1/shape)`) below one.
    #[inline]
    fn parts<R: RandomSource + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let g = self.marsaglia_tsang(rng);
        if self.inv_boost > 0.0 {
            (g, -rng.standard_exponential() * self.inv_boost)
        } else {
            (g, 0.0)
        }
    }

    #[inline]
    fn marsaglia_tsang<R: RandomSource + ?Sized>(&self, rng: &mut R) -> f64 {
        let (d, c) = (self.d, self.c);
        loop {
            let x = rng.standard_normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = rng.uniform01();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d * v;
            }
            if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }
}

pub(crate) fn beta_unchecked<R: RandomSource + ?Sized>(rng: &mut R, alpha: f64, beta: f64) -> f64 {
    beta_from_shapes(rng, &GammaShape::new(alpha), &GammaShape::new(beta))
}

/// Beta draw from two prepared gamma shapes.
#[inline]
pub(crate) fn beta_from_shapes<R: RandomSource + ?Sized>(rng: &mut R, a: &GammaShape, b: &GammaShape) -> f64 {
    let mut last = 0.5;
    for _ in 0..MAX_BETA_REDRAWS {
        let (g1, b1) = a.parts(rng);
        let (g2, b2) = b.parts(rng);
        // g1 e^b1 / (g1 e^b1 + g2 e^b2), with a single exp
        let d = b2 - b1;
        let x = if d == 0.0 { g1 / (g1 + g2) } else { 1.0 / (1.0 + g2 / g1 * d.exp()) };
        if x > 0.0 && x < 1.0 {
            return x;
        }
        if x.is_finite() {
            last = x;
        }
    }
    // Only reachable for shapes so lopsided that every ratio rounds to an
    // endpoint; return the nearest interior float.
    last.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Seeded generator owned by exactly one run.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: Xoshiro256PlusPlus,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// Stream for run `index` of a farm seeded with `base`.
    pub fn for_run(base: u64, index: u64) -> Self {
        Self::new(base.wrapping_add(index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RandomSource for RngStream {
    #[inline]
    fn uniform01(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    fn index_below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    #[inline]
    fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    #[inline]
    fn standard_exponential(&mut self) -> f64 {
        self.inner.sample(Exp1)
    }
}

/// Replays fixed draws; used to force edge cases in operator tests.
///
/// Uniform, index and normal queues are independent. When a queue runs dry
/// it falls back to the embedded [`RngStream`].
#[derive(Debug, Clone)]
pub struct ScriptedSource {
    uniforms: std::collections::VecDeque<f64>,
    indices: std::collections::VecDeque<usize>,
    normals: std::collections::VecDeque<f64>,
    fallback: RngStream,
}

impl ScriptedSource {
    pub fn new() -> Self {
        Self {
            uniforms: Default::default(),
            indices: Default::default(),
            normals: Default::default(),
            fallback: RngStream::new(0),
        }
    }

    pub fn with_uniforms(mut self, u: impl IntoIterator<Item = f64>) -> Self {
        self.uniforms.extend(u);
        self
    }

    pub fn with_indices(mut self, i: impl IntoIterator<Item = usize>) -> Self {
        self.indices.extend(i);
        self
    }

    pub fn with_normals(mut self, z: impl IntoIterator<Item = f64>) -> Self {
        self.normals.extend(z);
        self
    }
}

impl Default for ScriptedSource {
    fn default() -> Self {
        Self::new()
    }
}

impl RandomSource for ScriptedSource {
    fn uniform01(&mut self) -> f64 {
        self.uniforms
            .pop_front()
            .unwrap_or_else(|| self.fallback.uniform01())
    }

    fn index_below(&mut self, n: usize) -> usize {
        match self.indices.pop_front() {
            Some(i) => {
                assert!(i < n, "scripted index {i} out of range 0..{n}");
                i
            }
            None => self.fallback.index_below(n),
        }
    }

    fn standard_normal(&mut self) -> f64 {
        self.normals
            .pop_front()
            .unwrap_or_else(|| self.fallback.standard_normal())
    }
}
