//! Population diversity measures.
//!
//! * [`min_distance_normdiv`]: mean nearest-neighbour distance under the
//!   range-normalized RMS metric; O(NP²·D). BetaCOBL's switch measure.
//! * [`power_mean_diversity`]: the general power-mean family it belongs to.
//! * [`pairwise_mean_naive`]: half the sum of all ordered pairwise distances.
//! * [`linear_diversity`]: the variance-based O(NP·D) measure; its
//!   range-normalized form drives iBetaCOBL.
//! * [`center_diversity`]: summed distance to the centroid.
//!
//! Per-dimension means and variances use Welford updates, so a fully
//! collocated population yields exactly zero.

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::population::Population;

/// Measure used as `normDiv` by the beta opposition schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiversityKind {
    /// Mean nearest-neighbour distance, range normalized.
    MinDistance,
    /// Variance-based linear-time measure with per-dimension range normalization.
    Linear,
    /// Mean range-normalized distance to the centroid.
    CenterBased,
}

impl DiversityKind {
    pub fn name(self) -> &'static str {
        match self {
            DiversityKind::MinDistance => "min_distance",
            DiversityKind::Linear => "linear",
            DiversityKind::CenterBased => "center",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "min_distance" | "min-distance" | "power_mean" => Ok(DiversityKind::MinDistance),
            "linear" => Ok(DiversityKind::Linear),
            "center" | "center_based" => Ok(DiversityKind::CenterBased),
            other => Err(Error::config(
                "obl.diversity",
                format!("unknown diversity measure `{other}`"),
            )),
        }
    }

    /// Normalized diversity of `pop` under this measure.
    pub fn norm_div(self, pop: &Population, bounds: &Bounds) -> Result<f64> {
        match self {
            DiversityKind::MinDistance => min_distance_normdiv(pop, bounds),
            DiversityKind::Linear => linear_diversity(pop, bounds, true),
            DiversityKind::CenterBased => normalized_center_diversity(pop, bounds),
        }
    }
}

fn require(pop: &Population, n: usize) -> Result<()> {
    if pop.len() < n {
        return Err(Error::InsufficientPopulation {
            required: n,
            found: pop.len(),
        });
    }
    Ok(())
}

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn inverse_ranges(pop: &Population, bounds: &Bounds) -> Result<Vec<f64>> {
    if pop.dim() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            found: pop.dim(),
        });
    }
    Ok((0..bounds.dim()).map(|j| 1.0 / bounds.range(j)).collect())
}

/// Range-normalized RMS distance between two points.
#[inline]
fn normalized_distance(a: &[f64], b: &[f64], inv_range: &[f64]) -> f64 {
    let s: f64 = a
        .iter()
        .zip(b)
        .zip(inv_range)
        .map(|((x, y), r)| {
            let t = (x - y) * r;
            t * t
        })
        .sum();
    (s / a.len() as f64).sqrt()
}

/// Mean over individuals of the distance to their nearest other member,
/// each distance range-normalized per dimension. Lies in `[0, 1]`.
pub fn min_distance_normdiv(pop: &Population, bounds: &Bounds) -> Result<f64> {
    require(pop, 2)?;
    let inv = inverse_ranges(pop, bounds)?;
    let members = &pop.members;
    let mut total = 0.0;
    for (i, xi) in members.iter().enumerate() {
        let mut nearest = f64::INFINITY;
        for (c, xc) in members.iter().enumerate() {
            if c == i {
                continue;
            }
            let d = normalized_distance(&xi.genome, &xc.genome, &inv);
            if d < nearest {
                nearest = d;
            }
        }
        total += nearest;
    }
    Ok(total / members.len() as f64)
}

/// Power-mean diversity `((1/NP) Σ_i d_i^a)^(1/b)` with
/// `d_i^a = (1/(NP-1)) Σ_j ‖x_i - x_j‖^a`.
///
/// The self-pair contributes zero when `a > 0`; it is skipped when `a < 0`.
/// `a = -∞` replaces `d_i^a` by the nearest-neighbour distance.
pub fn power_mean_diversity(pop: &Population, a: f64, b: f64) -> Result<f64> {
    require(pop, 2)?;
    if a == 0.0 || a.is_nan() || a == f64::INFINITY {
        return Err(Error::parameter("a", format!("must be non-zero or -inf, got {a}")));
    }
    if b == 0.0 || !b.is_finite() {
        return Err(Error::parameter("b", format!("must be finite and non-zero, got {b}")));
    }
    let np = pop.len();
    let members = &pop.members;
    let mut acc = 0.0;
    for (i, xi) in members.iter().enumerate() {
        let others = members
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, xj)| euclidean(&xi.genome, &xj.genome));
        let di = if a == f64::NEG_INFINITY {
            others.fold(f64::INFINITY, f64::min)
        } else {
            others.map(|d| d.powf(a)).sum::<f64>() / (np - 1) as f64
        };
        acc += di;
    }
    Ok((acc / np as f64).powf(1.0 / b))
}

/// `½ Σ_i Σ_j ‖x_i - x_j‖`, evaluated over unordered pairs.
pub fn pairwise_mean_naive(pop: &Population) -> Result<f64> {
    require(pop, 2)?;
    let m = &pop.members;
    let mut total = 0.0;
    for i in 0..m.len() {
        for j in (i + 1)..m.len() {
            total += euclidean(&m[i].genome, &m[j].genome);
        }
    }
    Ok(total)
}

/// Per-dimension Welford mean and population variance.
fn moments(pop: &Population) -> (Vec<f64>, Vec<f64>) {
    let d = pop.dim();
    let mut mean = vec![0.0; d];
    let mut m2 = vec![0.0; d];
    for (n, g) in pop.genomes().enumerate() {
        let k = (n + 1) as f64;
        for j in 0..d {
            let delta = g[j] - mean[j];
            mean[j] += delta / k;
            m2[j] += delta * (g[j] - mean[j]);
        }
    }
    let np = pop.len() as f64;
    let var = m2.into_iter().map(|s| (s / np).max(0.0)).collect();
    (mean, var)
}

/// `(1/D) sqrt(Σ_k [mean(x_k²) - mean(x_k)²])`; with `normalized` each
/// per-dimension variance is divided by `max_k - min_k` before summing.
/// O(NP·D).
pub fn linear_diversity(pop: &Population, bounds: &Bounds, normalized: bool) -> Result<f64> {
    require(pop, 1)?;
    let d = pop.dim();
    if normalized && d != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            found: d,
        });
    }
    let (_, var) = moments(pop);
    let sum: f64 = if normalized {
        var.iter()
            .enumerate()
            .map(|(k, v)| v / bounds.range(k))
            .sum()
    } else {
        var.iter().sum()
    };
    Ok(sum.sqrt() / d as f64)
}

/// `Σ_i ‖x_i - centroid‖`. O(NP·D).
pub fn center_diversity(pop: &Population) -> Result<f64> {
    require(pop, 1)?;
    let (centroid, _) = moments(pop);
    Ok(pop.genomes().map(|g| euclidean(g, &centroid)).sum())
}

/// Mean range-normalized RMS distance to the centroid, in `[0, 1]`.
pub fn normalized_center_diversity(pop: &Population, bounds: &Bounds) -> Result<f64> {
    require(pop, 1)?;
    let inv = inverse_ranges(pop, bounds)?;
    let (centroid, _) = moments(pop);
    let total: f64 = pop
        .genomes()
        .map(|g| normalized_distance(g, &centroid, &inv))
        .sum();
    Ok(total / pop.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::random_point;
    use crate::rng::RngStream;

    fn pop1(xs: &[f64]) -> Population {
        Population::from_genomes(xs.iter().map(|x| vec![*x]))
    }

    fn random_pop(np: usize, bounds: &Bounds, seed: u64) -> Population {
        let mut r = RngStream::new(seed);
        Population::from_genomes((0..np).map(|_| random_point(bounds, &mut r)))
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn identical_population_has_zero_diversity() {
        let b = Bounds::uniform(3, -100.0, 100.0).unwrap();
        let p = Population::from_genomes(vec![vec![0.1, -3.3, 71.7]; 9]);
        assert_eq!(min_distance_normdiv(&p, &b).unwrap(), 0.0);
        assert_eq!(power_mean_diversity(&p, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(power_mean_diversity(&p, 2.0, 0.5).unwrap(), 0.0);
        assert_eq!(pairwise_mean_naive(&p).unwrap(), 0.0);
        assert_eq!(linear_diversity(&p, &b, false).unwrap(), 0.0);
        assert_eq!(linear_diversity(&p, &b, true).unwrap(), 0.0);
        assert_eq!(center_diversity(&p).unwrap(), 0.0);
        assert_eq!(normalized_center_diversity(&p, &b).unwrap(), 0.0);
    }

    #[test]
    fn min_distance_hand_values() {
        let b = Bounds::uniform(1, 0.0, 1.0).unwrap();
        assert!(close(min_distance_normdiv(&pop1(&[0.0, 1.0]), &b).unwrap(), 1.0));
        let b = Bounds::uniform(1, 0.0, 10.0).unwrap();
        assert!(close(
            min_distance_normdiv(&pop1(&[0.0, 5.0, 10.0]), &b).unwrap(),
            0.5
        ));
        assert!(matches!(
            min_distance_normdiv(&pop1(&[1.0]), &b),
            Err(Error::InsufficientPopulation { required: 2, found: 1 })
        ));
    }

    #[test]
    fn power_mean_hand_values() {
        assert!(close(power_mean_diversity(&pop1(&[0.0, 2.0]), 1.0, 1.0).unwrap(), 2.0));
        // nearest neighbours of {0, 1, 100} are at distance 1, 1 and 99
        assert!(close(
            power_mean_diversity(&pop1(&[0.0, 1.0, 100.0]), f64::NEG_INFINITY, 1.0).unwrap(),
            101.0 / 3.0
        ));
        assert!(power_mean_diversity(&pop1(&[0.0, 1.0]), 0.0, 1.0).is_err());
        assert!(power_mean_diversity(&pop1(&[0.0, 1.0]), 1.0, 0.0).is_err());
    }

    #[test]
    fn power_mean_at_minus_infinity_matches_min_distance_on_unit_box() {
        // On [0,1] in one dimension the two definitions coincide.
        let b = Bounds::uniform(1, 0.0, 1.0).unwrap();
        let p = random_pop(30, &b, 4);
        let a = power_mean_diversity(&p, f64::NEG_INFINITY, 1.0).unwrap();
        let m = min_distance_normdiv(&p, &b).unwrap();
        assert!(close(a, m));
    }

    #[test]
    fn pairwise_hand_values_and_homogeneity() {
        assert!(close(pairwise_mean_naive(&pop1(&[0.0, 1.0])).unwrap(), 1.0));
        let b = Bounds::uniform(4, -5.0, 5.0).unwrap();
        let p = random_pop(20, &b, 1);
        let base = pairwise_mean_naive(&p).unwrap();
        let scaled = Population::from_genomes(
            p.genomes().map(|g| g.iter().map(|v| 3.5 * v).collect::<Vec<_>>()),
        );
        assert!(close(pairwise_mean_naive(&scaled).unwrap(), 3.5 * base));
    }

    #[test]
    fn linear_hand_values() {
        let b = Bounds::uniform(1, 0.0, 2.0).unwrap();
        assert!(close(linear_diversity(&pop1(&[0.0, 1.0]), &b, false).unwrap(), 0.5));
        assert!(close(
            linear_diversity(&pop1(&[0.0, 2.0]), &b, true).unwrap(),
            (0.5f64).sqrt()
        ));
        assert_eq!(linear_diversity(&pop1(&[1.3]), &b, true).unwrap(), 0.0);
        assert!(linear_diversity(&Population::default(), &b, false).is_err());
    }

    #[test]
    fn linear_positive_iff_not_collocated() {
        let b = Bounds::uniform(2, -1.0, 1.0).unwrap();
        let mut p = Population::from_genomes(vec![vec![0.25, 0.5]; 5]);
        assert_eq!(linear_diversity(&p, &b, true).unwrap(), 0.0);
        p.members[3].genome[1] = 0.5000001;
        assert!(linear_diversity(&p, &b, true).unwrap() > 0.0);
    }

    #[test]
    fn center_hand_values() {
        assert!(close(center_diversity(&pop1(&[0.0, 2.0])).unwrap(), 2.0));
        assert_eq!(center_diversity(&pop1(&[42.0])).unwrap(), 0.0);
    }

    #[test]
    fn translation_invariance() {
        let b = Bounds::uniform(5, -50.0, 50.0).unwrap();
        let p = random_pop(40, &b, 17);
        let offset = [13.0, -7.5, 0.25, 30.0, -1.0];
        let q = Population::from_genomes(p.genomes().map(|g| {
            g.iter().zip(&offset).map(|(a, o)| a + o).collect::<Vec<_>>()
        }));
        let wide = Bounds::uniform(5, -100.0, 100.0).unwrap();
        let pairs: [(f64, f64); 5] = [
            (
                min_distance_normdiv(&p, &wide).unwrap(),
                min_distance_normdiv(&q, &wide).unwrap(),
            ),
            (
                power_mean_diversity(&p, 1.0, 1.0).unwrap(),
                power_mean_diversity(&q, 1.0, 1.0).unwrap(),
            ),
            (pairwise_mean_naive(&p).unwrap(), pairwise_mean_naive(&q).unwrap()),
            (
                linear_diversity(&p, &wide, false).unwrap(),
                linear_diversity(&q, &wide, false).unwrap(),
            ),
            (center_diversity(&p).unwrap(), center_diversity(&q).unwrap()),
        ];
        for (a, c) in pairs {
            assert!((a - c).abs() <= 1e-10 * a.abs().max(1e-300), "{a} vs {c}");
        }
    }

    #[test]
    fn collocation_is_penalized() {
        // A converged population confined to a small sub-box.
        let b = Bounds::uniform(10, -100.0, 100.0).unwrap();
        let small = Bounds::uniform(10, -1.0, 1.0).unwrap();
        for seed in 0..10 {
            let p = random_pop(50, &small, seed);
            let mut doubled = p.clone();
            doubled.members.extend(p.members.iter().cloned());
            let mut spread = p.clone();
            spread.members.extend(random_pop(50, &b, 100 + seed).members);

            assert!(min_distance_normdiv(&p, &b).unwrap() > 0.0);
            assert_eq!(min_distance_normdiv(&doubled, &b).unwrap(), 0.0);
            assert!(
                linear_diversity(&doubled, &b, true).unwrap()
                    < linear_diversity(&spread, &b, true).unwrap()
            );
        }
    }

    #[test]
    fn normdiv_measures_stay_in_unit_interval_for_random_populations() {
        let b = Bounds::uniform(30, -100.0, 100.0).unwrap();
        let p = random_pop(100, &b, 3);
        for kind in [DiversityKind::MinDistance, DiversityKind::Linear, DiversityKind::CenterBased] {
            let v = kind.norm_div(&p, &b).unwrap();
            assert!(v > 0.0 && v <= 1.0, "{kind:?}: {v}");
        }
    }
}
