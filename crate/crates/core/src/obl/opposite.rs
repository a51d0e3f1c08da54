//! Classic opposite-point operators.
//!
//! Interval arguments are per-dimension `lo`/`hi` slices so the same
//! operator serves both the static search box and the dynamic population
//! interval used during generation jumping.

use crate::bounds::Bounds;
use crate::rng::RandomSource;

/// Type-I opposite: `lo + hi - x`.
pub fn type1_opposite(x: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(lo.iter().zip(hi))
        .map(|(v, (a, b))| a + b - v)
        .collect()
}

/// Uniform draw between the interval centre and the type-I opposite.
pub fn quasi_opposite<R: RandomSource + ?Sized>(
    x: &[f64],
    lo: &[f64],
    hi: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    x.iter()
        .zip(lo.iter().zip(hi))
        .map(|(v, (a, b))| {
            let c = 0.5 * (a + b);
            let opp = a + b - v;
            c + rng.uniform01() * (opp - c)
        })
        .collect()
}

/// Uniform draw between the interval centre and the original point.
pub fn quasi_reflected<R: RandomSource + ?Sized>(
    x: &[f64],
    lo: &[f64],
    hi: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    x.iter()
        .zip(lo.iter().zip(hi))
        .map(|(v, (a, b))| {
            let c = 0.5 * (a + b);
            c + rng.uniform01() * (v - c)
        })
        .collect()
}

/// Reflection through the current best, `2 x_best - x`, projected onto the box.
pub fn current_optimum_opposite(x: &[f64], best: &[f64], bounds: &Bounds) -> Vec<f64> {
    let mut out: Vec<f64> = x.iter().zip(best).map(|(v, b)| 2.0 * b - v).collect();
    bounds.clamp_in_place(&mut out);
    out
}

/// Generalized opposite `k (a + b) - x` over the dynamic population interval
/// `[a, b]`, projected onto the box. `k` is shared by the whole jump.
pub fn generalized_opposite(
    x: &[f64],
    pop_min: &[f64],
    pop_max: &[f64],
    k: f64,
    bounds: &Bounds,
) -> Vec<f64> {
    let mut out: Vec<f64> = x
        .iter()
        .zip(pop_min.iter().zip(pop_max))
        .map(|(v, (a, b))| k * (a + b) - v)
        .collect();
    bounds.clamp_in_place(&mut out);
    out
}
