//! Running means and histograms for Monte-Carlo output.

use serde::{Deserialize, Serialize};

use crate::error::{BakerError, Result};

/// Welford accumulator; results depend only on the push order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (zero for fewer than two samples).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            f64::INFINITY
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for MeanAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = MeanAccumulator::default();
        iter.into_iter().for_each(|x| acc.push(x));
        acc
    }
}

/// Sample moments. Variance is the population variance, skewness the
/// population skewness `m3 / m2^(3/2)` (zero for a degenerate sample).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n_samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(BakerError::InvalidArgument("no samples".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let (m2, m3) = values.iter().fold((0.0, 0.0), |(m2, m3), &x| {
            let d = x - mean;
            (m2 + d * d, m3 + d * d * d)
        });
        let (m2, m3) = (m2 / n, m3 / n);
        let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
        Ok(Moments { n_samples: values.len() as u64, mean, variance: m2, skewness })
    }
}

/// Uniform-bin histogram. The last bin is closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// `bins` uniform bins spanning `[min, max]` of the data. A degenerate
    /// sample gets a small symmetric window around its single value.
    pub fn spanning(values: &[f64], bins: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(BakerError::InvalidArgument("no samples".into()));
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5e-6, hi + 0.5e-6) };
        Self::with_range(values, bins, lo, hi)
    }

    /// `bins` uniform bins over `[lo, hi]`; values outside are dropped.
    pub fn with_range(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins == 0 {
            return Err(BakerError::InvalidArgument("bin count must be positive".into()));
        }
        let ordered = hi > lo;
        if !ordered || !lo.is_finite() || !hi.is_finite() {
            return Err(BakerError::InvalidArgument(format!("bad histogram range [{lo}, {hi}]")));
        }
        let width = (hi - lo) / bins as f64;
        let mut bin_edges: Vec<f64> = (0..bins).map(|k| lo + width * k as f64).collect();
        bin_edges.push(hi);
        let mut counts = vec![0u64; bins];
        for &x in values {
            if !(lo..=hi).contains(&x) {
                continue;
            }
            let k = (((x - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Ok(Histogram { bin_edges, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}
