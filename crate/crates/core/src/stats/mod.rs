//! Correlation and nonparametric tests, the PPP–PPL trade-off analysis, and
//! surface statistics of text.

mod correlation;
mod nonparametric;
mod surface;
mod tradeoff;

pub use correlation::{midranks, pearson, spearman};
pub use nonparametric::{
    binomial_test, mann_whitney_exact_p, mann_whitney_normal_p, mann_whitney_u, MannWhitney, EXACT_MAX_N,
};
pub use surface::{surface_stats, SurfaceStats};
pub use tradeoff::{tradeoff_analysis, PplAxis, PppPplPoint, TradeoffAnalysis};

/// Mean and sample standard deviation (n − 1). Identical values, or fewer
/// than two, give an SD of exactly 0.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    if values.iter().all(|v| *v == values[0]) {
        return (values[0], 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}
