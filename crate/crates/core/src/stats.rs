//! Goodness-of-fit helpers for the acceptance suite. Thresholds are always
//! supplied by the caller.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Error, Result};

pub const MIN_KS_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub statistic: f64,
    pub n: usize,
    pub threshold: f64,
    pub pass: bool,
}

impl FitReport {
    pub fn new(statistic: f64, n: usize, threshold: f64) -> Self {
        FitReport { statistic, n, threshold, pass: statistic <= threshold }
    }
}

/// Kolmogorov–Smirnov distance `sup |F_n − F|` of `samples` against `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64, threshold: f64) -> Result<FitReport> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_KS_SAMPLES, got: samples.len() });
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(FitReport::new(d.clamp(0.0, 1.0), xs.len(), threshold))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dispersion {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    /// Sample variance over sample mean; 1 for Poisson counts.
    pub index: f64,
}

impl Dispersion {
    /// Report on `|index − 1|` against `max_deviation`.
    pub fn report(&self, max_deviation: f64) -> FitReport {
        FitReport::new((self.index - 1.0).abs(), self.n, max_deviation)
    }
}

/// Variance-to-mean ratio of interval counts.
pub fn poisson_dispersion(counts: &[u64]) -> Result<Dispersion> {
    if counts.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: counts.len() });
    }
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    if mean == 0.0 {
        return Err(invalid("counts", "all counts are zero; dispersion is undefined"));
    }
    let variance = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(Dispersion { n: counts.len(), mean, variance, index: variance / mean })
}

/// Wilson score interval for `k` successes in `n` trials at confidence `level`.
pub fn wilson_interval(k: u64, n: u64, level: f64) -> Result<(f64, f64)> {
    if n == 0 || k > n {
        return Err(invalid("k", format!("need 0 <= k <= n and n > 0, got k={k}, n={n}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid("level", "confidence level must lie in (0, 1)"));
    }
    let z = Normal::standard().inverse_cdf(0.5 + 0.5 * level);
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2n = z * z / nf;
    let denom = 1.0 + z2n;
    let center = (p + 0.5 * z2n) / denom;
    let half = z * (p * (1.0 - p) / nf + 0.25 * z2n / nf).sqrt() / denom;
    let low = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if k == n { 1.0 } else { (center + half).min(1.0) };
    Ok((low, high))
}
