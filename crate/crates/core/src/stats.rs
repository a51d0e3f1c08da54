//! Nonparametric comparison of final error samples: Wilcoxon rank-sum
//! verdicts, the Friedman test with post-hoc z statistics, and Hochberg's
//! step-up adjustment. All scores are minimized (lower is better).

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest per-sample size handled by the exact permutation distribution
/// under [`RankSumMethod::Auto`].
pub const EXACT_MAX_SIZE: usize = 10;

/// Outcome of comparing an algorithm against the reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    /// Significantly better than the reference.
    Better,
    /// No significant difference.
    Tie,
    /// Significantly worse than the reference.
    Worse,
}

impl Symbol {
    pub fn as_str(self) -> &'static str {
        match self {
            Symbol::Better => "+",
            Symbol::Tie => "=",
            Symbol::Worse => "-",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Symbol::Better => Symbol::Worse,
            Symbol::Tie => Symbol::Tie,
            Symbol::Worse => Symbol::Better,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankSumMethod {
    Exact,
    Normal,
    /// Exact when both samples have at most [`EXACT_MAX_SIZE`] values.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    /// Two-sided p-value.
    pub p_value: f64,
    pub symbol: Symbol,
    /// Rank sum of the first sample (midranks).
    pub statistic: f64,
    /// Whether the exact permutation distribution was used.
    pub exact: bool,
}

/// Midranks (1-based) of `values`; tied values share the mean of their ranks.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j share ranks i+1..=j
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::parameter("sample", "must be non-empty"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

fn check_sample(name: &'static str, s: &[f64]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::parameter(name, "must be non-empty"));
    }
    if s.iter().any(|v| v.is_nan()) {
        return Err(Error::parameter(name, "contains NaN"));
    }
    Ok(())
}

/// Exact two-sided p-value of the rank sum `w` of `n1` values drawn from
/// the pooled midranks `ranks`: `2 min(P(W <= w), P(W >= w))`, capped at 1.
///
/// Midranks are multiples of 1/2, so the permutation distribution is
/// counted over doubled (integer) ranks.
pub fn rank_sum_exact_p(ranks: &[f64], n1: usize, w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    // ways[k][s]: subsets of size k with doubled sum s
    let mut ways = vec![vec![0.0f64; total + 1]; n1 + 1];
    ways[0][0] = 1.0;
    for (idx, &r) in doubled.iter().enumerate() {
        let kmax = n1.min(idx + 1);
        for k in (1..=kmax).rev() {
            let (lo, hi) = ways.split_at_mut(k);
            let prev = &lo[k - 1];
            let cur = &mut hi[0];
            for s in (r..=total).rev() {
                let add = prev[s - r];
                if add != 0.0 {
                    cur[s] += add;
                }
            }
        }
    }
    let dist = &ways[n1];
    let count: f64 = dist.iter().sum();
    let target = (2.0 * w).round() as usize;
    let lower: f64 = dist[..=target.min(total)].iter().sum();
    let upper: f64 = if target <= total { dist[target..].iter().sum() } else { 0.0 };
    (2.0 * lower.min(upper) / count).min(1.0)
}

/// Normal-approximation two-sided p-value with tie-corrected variance and
/// continuity correction.
pub fn rank_sum_normal_p(ranks: &[f64], n1: usize, w: f64) -> f64 {
    let n = ranks.len() as f64;
    let n1f = n1 as f64;
    let n2f = n - n1f;
    let mean = n1f * (n + 1.0) / 2.0;
    let ties = tie_term(ranks);
    let var = n1f * n2f / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if !(var > 0.0) {
        return 1.0;
    }
    let diff = w - mean;
    let corrected = (diff.abs() - 0.5).max(0.0);
    let z = corrected / var.sqrt();
    let normal = Normal::standard();
    (2.0 * normal.sf(z)).min(1.0)
}

/// `Σ (t³ - t)` over groups of tied ranks.
fn tie_term(ranks: &[f64]) -> f64 {
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        sum += t * t * t - t;
        i = j;
    }
    sum
}

/// Two-sided rank-sum test of `candidate` against `reference`.
///
/// The symbol reads from the candidate's side: `+` when it is significantly
/// better (lower median), `-` when significantly worse, `=` when `p >= alpha`.
pub fn wilcoxon_rank_sum(candidate: &[f64], reference: &[f64], alpha: f64) -> Result<ComparisonVerdict> {
    wilcoxon_rank_sum_with(candidate, reference, alpha, RankSumMethod::Auto)
}

pub fn wilcoxon_rank_sum_with(
    candidate: &[f64],
    reference: &[f64],
    alpha: f64,
    method: RankSumMethod,
) -> Result<ComparisonVerdict> {
    check_sample("candidate", candidate)?;
    check_sample("reference", reference)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::parameter("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    let pooled: Vec<f64> = candidate.iter().chain(reference).copied().collect();
    let ranks = midranks(&pooled);
    let n1 = candidate.len();
    let w: f64 = ranks[..n1].iter().sum();
    let exact = match method {
        RankSumMethod::Exact => true,
        RankSumMethod::Normal => false,
        RankSumMethod::Auto => n1 <= EXACT_MAX_SIZE && reference.len() <= EXACT_MAX_SIZE,
    };
    let p_value = if exact {
        rank_sum_exact_p(&ranks, n1, w)
    } else {
        rank_sum_normal_p(&ranks, n1, w)
    };
    let symbol = if p_value >= alpha {
        Symbol::Tie
    } else {
        let (mc, mr) = (median(candidate)?, median(reference)?);
        let lower = if mc != mr {
            mc < mr
        } else {
            // equal medians: fall back to the rank-sum direction
            w < n1 as f64 * (pooled.len() as f64 + 1.0) / 2.0
        };
        if lower {
            Symbol::Better
        } else {
            Symbol::Worse
        }
    };
    Ok(ComparisonVerdict {
        p_value,
        symbol,
        statistic: w,
        exact,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub chi_square: f64,
    pub df: usize,
    pub p_value: f64,
    pub average_ranks: Vec<f64>,
    /// Number of problems.
    pub n: usize,
}

/// Friedman test over an `N x k` matrix (rows are problems, columns are
/// algorithms, lower scores rank first).
pub fn friedman(scores: &[Vec<f64>]) -> Result<FriedmanResult> {
    let n = scores.len();
    if n < 2 {
        return Err(Error::parameter("scores", format!("need at least 2 problems, got {n}")));
    }
    let k = scores[0].len();
    if k < 2 {
        return Err(Error::parameter("scores", format!("need at least 2 algorithms, got {k}")));
    }
    let mut sums = vec![0.0; k];
    for row in scores {
        if row.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: row.len(),
            });
        }
        if row.iter().any(|v| v.is_nan()) {
            return Err(Error::parameter("scores", "contains NaN"));
        }
        for (s, r) in sums.iter_mut().zip(midranks(row)) {
            *s += r;
        }
    }
    let average: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
    friedman_from_ranks(&average, n)
}

/// Friedman statistic from published average ranks.
pub fn friedman_from_ranks(average_ranks: &[f64], n: usize) -> Result<FriedmanResult> {
    let k = average_ranks.len();
    if k < 2 || n < 2 {
        return Err(Error::parameter("scores", "need N >= 2 problems and k >= 2 algorithms"));
    }
    let (nf, kf) = (n as f64, k as f64);
    let sq: f64 = average_ranks.iter().map(|r| r * r).sum();
    let chi = (12.0 * nf / (kf * (kf + 1.0)) * sq - 3.0 * nf * (kf + 1.0)).max(0.0);
    let dist = ChiSquared::new((k - 1) as f64).map_err(|e| Error::parameter("df", e.to_string()))?;
    Ok(FriedmanResult {
        chi_square: chi,
        df: k - 1,
        p_value: dist.sf(chi),
        average_ranks: average_ranks.to_vec(),
        n,
    })
}

/// Post-hoc statistic of one algorithm against a control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostHoc {
    pub index: usize,
    pub z: f64,
    pub p_unadjusted: f64,
    pub p_hochberg: f64,
}

/// `z = (R_i - R_control) / sqrt(k (k + 1) / (6 N))` for every non-control
/// algorithm, with two-sided p-values and their Hochberg adjustment.
pub fn friedman_post_hoc(result: &FriedmanResult, control: usize) -> Result<Vec<PostHoc>> {
    let k = result.average_ranks.len();
    if control >= k {
        return Err(Error::parameter("control", format!("index {control} out of range")));
    }
    let se = (k as f64 * (k as f64 + 1.0) / (6.0 * result.n as f64)).sqrt();
    let normal = Normal::standard();
    let rc = result.average_ranks[control];
    let mut out: Vec<PostHoc> = (0..k)
        .filter(|&i| i != control)
        .map(|i| {
            let z = (result.average_ranks[i] - rc) / se;
            PostHoc {
                index: i,
                z,
                p_unadjusted: (2.0 * normal.sf(z.abs())).min(1.0),
                p_hochberg: 0.0,
            }
        })
        .collect();
    let raw: Vec<f64> = out.iter().map(|h| h.p_unadjusted).collect();
    for (h, adj) in out.iter_mut().zip(hochberg_adjust(&raw)?) {
        h.p_hochberg = adj;
    }
    Ok(out)
}

/// Hochberg step-up adjustment. Visits p-values from largest to smallest,
/// multiplying the j-th largest by j and keeping a running minimum; results
/// are capped at 1 and returned in input order.
pub fn hochberg_adjust(p_values: &[f64]) -> Result<Vec<f64>> {
    if let Some(p) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::parameter("p_values", format!("must lie in [0, 1], got {p}")));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[b].total_cmp(&p_values[a]));
    let mut adjusted = vec![0.0; m];
    let mut running = f64::INFINITY;
    for (j, &i) in order.iter().enumerate() {
        running = running.min((j + 1) as f64 * p_values[i]);
        adjusted[i] = running.min(1.0);
    }
    Ok(adjusted)
}

/// Mean and sample standard deviation (`n - 1` divisor; 0 for one value).
pub fn mean_std(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::parameter("sample", "must be non-empty"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((mean, (ss / (n - 1.0)).sqrt()))
}

/// `MEAN (STD DEV)` cell, e.g. `1.23E+03 (4.50E-01)`.
pub fn format_mean_std(mean: f64, std: f64) -> String {
    format!("{} ({})", sci(mean), sci(std))
}

/// Two-decimal scientific notation with a signed, two-digit exponent.
pub fn sci(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.2E}");
    let (mantissa, exp) = s.split_once('E').expect("LowerExp output has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}
