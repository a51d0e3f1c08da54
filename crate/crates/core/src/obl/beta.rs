//! Beta-distribution opposites.
//!
//! A concave beta (one interior peak) is centred on the normalized type-I
//! opposite; a convex one (U-shaped, both shapes below one) has its trough
//! on the original point. Both share the same mode/spread parameterization:
//!
//! ```text
//! peak  = ((s - 2) m + 1) / (s (1 - m))      if m < 0.5
//!         (2 - s) / s + (s - 1) / (s m)      otherwise
//! alpha = s * peak,  beta = s                if m < 0.5
//! alpha = s,         beta = s * peak         otherwise
//! ```

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::crossover::CrossoverKind;
use crate::error::{Error, Result};
use crate::rng::{beta_from_shapes, GammaShape, RandomSource};

/// Smallest concave spread; at exactly 1 the distribution degenerates to uniform.
pub const MIN_CONCAVE_SPREAD: f64 = 1.0 + 1e-6;
/// Spreads are capped here so that `alpha`/`beta` stay finite.
pub const MAX_SPREAD: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaShape {
    Concave,
    Convex,
}

/// Shape parameters of a single-coordinate beta opposite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaOppositeParams {
    pub mode: f64,
    pub spread: f64,
    pub peak: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl BetaOppositeParams {
    pub fn from_mode_spread(mode: f64, spread: f64) -> Self {
        // The free shape is written as `spread * peak` directly; expanding
        // `peak` first cancels catastrophically for huge spreads at the edges.
        let (peak, alpha, beta) = if mode < 0.5 {
            let alpha = (spread * mode + 1.0 - 2.0 * mode) / (1.0 - mode);
            (alpha / spread, alpha, spread)
        } else {
            let beta = (spread * (1.0 - mode) + 2.0 * mode - 1.0) / mode;
            (beta / spread, spread, beta)
        };
        Self {
            mode,
            spread,
            peak,
            alpha,
            beta,
        }
    }

    /// Concave parameters for coordinate `x` in `[lo, hi]` with a given spread.
    pub fn concave(x: f64, lo: f64, hi: f64, spread: f64) -> Self {
        Self::from_mode_spread((hi - x) / (hi - lo), spread)
    }

    /// Convex parameters for coordinate `x` in `[lo, hi]`.
    pub fn convex(x: f64, lo: f64, hi: f64, norm_div: f64) -> Self {
        Self::from_mode_spread((x - lo) / (hi - lo), convex_spread(norm_div))
    }

    /// `(alpha - 1) / (alpha + beta - 2)`: the mode of a concave beta and
    /// the anti-mode of a convex one.
    pub fn stationary_point(&self) -> f64 {
        (self.alpha - 1.0) / (self.alpha + self.beta - 2.0)
    }

    pub fn shape(&self) -> BetaShape {
        if self.spread > 1.0 {
            BetaShape::Concave
        } else {
            BetaShape::Convex
        }
    }
}

fn spread_div(norm_div: f64) -> Result<f64> {
    if !(norm_div >= 0.0) || !norm_div.is_finite() {
        return Err(Error::parameter("normDiv", format!("must be finite and >= 0, got {norm_div}")));
    }
    // Linear-time diversity can exceed one; the spread laws assume (0, 1].
    Ok(norm_div.min(1.0))
}

/// Concave spread `(1 / sqrt(normDiv))^(1 + N(0, 0.5))`, with the Gaussian
/// drawn once per call (once per individual). Fails on zero diversity.
pub fn concave_spread<R: RandomSource + ?Sized>(norm_div: f64, rng: &mut R) -> Result<f64> {
    let d = spread_div(norm_div)?;
    if d == 0.0 {
        return Err(Error::DiversityCollapse);
    }
    let z = rng.gaussian(0.0, 0.5)?;
    let s = (1.0 / d.sqrt()).powf(1.0 + z);
    Ok(if s.is_nan() {
        MIN_CONCAVE_SPREAD
    } else {
        s.clamp(MIN_CONCAVE_SPREAD, MAX_SPREAD)
    })
}

/// Convex spread `0.1 sqrt(normDiv) + 0.9`, in `[0.9, 1]`.
pub fn convex_spread(norm_div: f64) -> f64 {
    0.1 * norm_div.clamp(0.0, 1.0).sqrt() + 0.9
}

/// Concave parameters for one coordinate; draws the spread.
pub fn concave_params<R: RandomSource + ?Sized>(
    x: f64,
    lo: f64,
    hi: f64,
    norm_div: f64,
    rng: &mut R,
) -> Result<BetaOppositeParams> {
    let s = concave_spread(norm_div, rng)?;
    Ok(BetaOppositeParams::concave(x, lo, hi, s))
}

/// Convex parameters for one coordinate.
pub fn convex_params(x: f64, lo: f64, hi: f64, norm_div: f64) -> Result<BetaOppositeParams> {
    spread_div(norm_div)?;
    Ok(BetaOppositeParams::convex(x, lo, hi, norm_div))
}

/// Complete beta opposite of `x` with a given shape. The concave spread is
/// drawn once and shared by every coordinate of the individual.
pub fn beta_opposite_with<R: RandomSource + ?Sized>(
    x: &[f64],
    bounds: &Bounds,
    shape: BetaShape,
    norm_div: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    bounds.check_len(x)?;
    let spread = match shape {
        BetaShape::Concave => concave_spread(norm_div, rng)?,
        BetaShape::Convex => convex_spread(spread_div(norm_div)?),
    };
    let lo = bounds.lower();
    let hi = bounds.upper();
    // one shape of every coordinate equals the spread
    let fixed = GammaShape::new(spread);
    let valid = |v: f64| v > 0.0 && v.is_finite();
    let mut out = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let range = hi[j] - lo[j];
        let mode = match shape {
            BetaShape::Concave => (hi[j] - x[j]) / range,
            BetaShape::Convex => (x[j] - lo[j]) / range,
        };
        let p = BetaOppositeParams::from_mode_spread(mode, spread);
        // x inside the bounds and a positive finite spread keep both shapes positive
        let u = if !(valid(p.alpha) && valid(p.beta)) {
            rng.beta(p.alpha, p.beta)?
        } else if mode < 0.5 {
            beta_from_shapes(rng, &GammaShape::new(p.alpha), &fixed)
        } else {
            beta_from_shapes(rng, &fixed, &GammaShape::new(p.beta))
        };
        out.push(range * u + lo[j]);
    }
    Ok(out)
}

/// Complete beta opposite with the shape chosen by a fair coin:
/// a draw `<= 0.5` selects the concave beta.
pub fn beta_opposite<R: RandomSource + ?Sized>(
    x: &[f64],
    bounds: &Bounds,
    norm_div: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let shape = if rng.uniform01() <= 0.5 {
        BetaShape::Concave
    } else {
        BetaShape::Convex
    };
    beta_opposite_with(x, bounds, shape, norm_div, rng)
}

/// Partial opposite: crossover of `x` (target) with its complete opposite
/// (mutant) at rate `cr`.
pub fn partial_opposite<R: RandomSource + ?Sized>(
    x: &[f64],
    complete: &[f64],
    cr: f64,
    crossover: &CrossoverKind,
    rng: &mut R,
) -> Result<Vec<f64>> {
    crossover.apply(x, complete, cr, rng)
}
