use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::correlation::midranks;
use crate::error::{Error, Result};

/// Largest combined sample size for which the exact null distribution is used.
pub const EXACT_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    pub p_value: f64,
    pub exact: bool,
}

/// Two-sided Mann-Whitney U test.
///
/// Exact when the samples total at most [`EXACT_MAX_N`] values with no
/// ties; otherwise the normal approximation with tie and continuity
/// corrections.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData(
            "Mann-Whitney needs two nonempty samples".into(),
        ));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value".into()));
    }
    let (n1, n2) = (a.len(), b.len());
    let mut pooled = a.to_vec();
    pooled.extend_from_slice(b);
    let ranks = midranks(&pooled);
    let r1: f64 = ranks[..n1].iter().sum();
    let u = r1 - (n1 * (n1 + 1)) as f64 / 2.0;

    let tie_term = tie_term(&pooled);
    if n1 + n2 <= EXACT_MAX_N && tie_term == 0.0 {
        Ok(MannWhitney {
            u,
            p_value: mann_whitney_exact_p(u as usize, n1, n2),
            exact: true,
        })
    } else {
        Ok(MannWhitney {
            u,
            p_value: mann_whitney_normal_p(u, n1, n2, tie_term),
            exact: false,
        })
    }
}

/// Σ (t³ − t) over tie groups.
fn tie_term(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        total += t * t * t - t;
        i = j;
    }
    total
}

/// Number of rank arrangements giving each U in `0..=n1·n2`, from the
/// recurrence f(m, n, u) = f(m−1, n, u−n) + f(m, n−1, u).
fn u_counts(n1: usize, n2: usize) -> Vec<f64> {
    let max_u = n1 * n2;
    // prev[m][u] holds f(m, n-1, u); with no second-sample values only U = 0 occurs.
    let mut prev = vec![vec![0.0; max_u + 1]; n1 + 1];
    for row in &mut prev {
        row[0] = 1.0;
    }
    for n in 1..=n2 {
        let mut cur = vec![vec![0.0; max_u + 1]; n1 + 1];
        cur[0][0] = 1.0;
        for m in 1..=n1 {
            for u in 0..=max_u {
                let largest_from_first = if u >= n { cur[m - 1][u - n] } else { 0.0 };
                cur[m][u] = largest_from_first + prev[m][u];
            }
        }
        prev = cur;
    }
    prev.swap_remove(n1)
}

/// Exact two-sided p for a tie-free U: doubled smaller tail, capped at 1.
pub fn mann_whitney_exact_p(u: usize, n1: usize, n2: usize) -> f64 {
    let counts = u_counts(n1, n2);
    let total: f64 = counts.iter().sum();
    let u = u.min(n1 * n2);
    let lower: f64 = counts[..=u].iter().sum::<f64>() / total;
    let upper: f64 = counts[u..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

/// Normal-approximation two-sided p with continuity correction; `tie_term`
/// is Σ (t³ − t) over tie groups of the pooled sample.
pub fn mann_whitney_normal_p(u: f64, n1: usize, n2: usize, tie_term: f64) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    let n = a + b;
    let mean = a * b / 2.0;
    let var = a * b / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * normal.sf(z)).min(1.0)
}

/// `ln i!` for `i in 0..=n`, by cumulative sums so that small factorials are exact.
fn ln_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    out.push(acc);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Two-sided exact binomial test: `min(1, 2·min(P(X ≤ k), P(X ≥ k)))`,
/// summed in the log domain.
pub fn binomial_test(k: u64, n: u64, pi: f64) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
    }
    if !(pi > 0.0 && pi < 1.0) {
        return Err(Error::Domain(format!(
            "success probability must be in (0, 1), got {pi}"
        )));
    }
    let (lp, lq) = (pi.ln(), (1.0 - pi).ln());
    let lf = ln_factorials(n);
    let term = |j: u64| {
        let (j_, n_) = (j as usize, n as usize);
        lf[n_] - lf[j_] - lf[n_ - j_] + j as f64 * lp + (n - j) as f64 * lq
    };
    let lower = log_sum_exp((0..=k).map(term));
    let upper = log_sum_exp((k..=n).map(term));
    Ok((2.0 * lower.min(upper).exp()).min(1.0))
}
