//! Box constraints of the search space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Per-dimension lower and upper bounds, `min[j] < max[j]` for every `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl Bounds {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.is_empty() {
            return Err(Error::Bounds("dimension must be at least 1".into()));
        }
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                found: max.len(),
            });
        }
        for (j, (lo, hi)) in min.iter().zip(&max).enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Bounds(format!(
                    "dimension {j}: need finite min < max, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { min, max })
    }

    /// The same interval `[lo, hi]` in each of `dim` dimensions.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.min
    }

    pub fn upper(&self) -> &[f64] {
        &self.max
    }

    pub fn range(&self, j: usize) -> f64 {
        self.max[j] - self.min[j]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.min.iter().zip(&self.max))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    pub(crate) fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Projects `x` onto the box in place. Lengths must already match.
    #[inline]
    pub fn clamp_in_place(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.min).zip(&self.max) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

/// `x[j] = min[j] + u * (max[j] - min[j])` with a fresh `u` per dimension.
pub fn random_point<R: RandomSource + ?Sized>(bounds: &Bounds, rng: &mut R) -> Vec<f64> {
    bounds
        .min
        .iter()
        .zip(&bounds.max)
        .map(|(lo, hi)| lo + rng.uniform01() * (hi - lo))
        .collect()
}

/// Coordinate-wise projection onto the box. Feasible inputs come back unchanged.
pub fn clamp_to_bounds(x: &[f64], bounds: &Bounds) -> Result<Vec<f64>> {
    bounds.check_len(x)?;
    let mut out = x.to_vec();
    bounds.clamp_in_place(&mut out);
    Ok(out)
}
