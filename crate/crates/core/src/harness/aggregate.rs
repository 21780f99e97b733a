//! Across-seed summary statistics.

use crate::error::{Error, Result};

/// z-value of a two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq)]
pub struct BinStat {
    pub bin: usize,
    /// Number of seeds with a value in this bin.
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single seed.
    pub std: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Per-bin mean and normal-approximation 95% interval `mean +- 1.96 std / sqrt(n)`.
///
/// Every series must have the same number of bins. `None` marks a bin where a
/// seed has no value yet; it is left out of that bin. Bins with no values at
/// all have `n = 0` and NaN statistics. A single value has interval width 0.
pub fn aggregate(series: &[Vec<Option<f64>>]) -> Result<Vec<BinStat>> {
    let first = series.first().ok_or(Error::EmptyAggregate)?;
    let bins = first.len();
    if let Some((index, s)) = series.iter().enumerate().find(|(_, s)| s.len() != bins) {
        return Err(Error::SeriesLengthMismatch { expected: bins, index, actual: s.len() });
    }
    Ok((0..bins)
        .map(|bin| {
            let values: Vec<f64> = series.iter().filter_map(|s| s[bin]).collect();
            let n = values.len();
            if n == 0 {
                return BinStat { bin, n, mean: f64::NAN, std: f64::NAN, ci_low: f64::NAN, ci_high: f64::NAN };
            }
            let mean = values.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            let half = Z_95 * std / (n as f64).sqrt();
            BinStat { bin, n, mean, std, ci_low: mean - half, ci_high: mean + half }
        })
        .collect())
}

/// Trailing moving average over `window` values.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for i in 0..values.len() {
        sum += values[i];
        if i >= window {
            sum -= values[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}
