use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 95% quantile of the standard normal.
pub const Z_95: f64 = 1.959963984540054;

/// Mean with a normal-approximation 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
    pub ci95: f64,
}

impl MethodStats {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                n,
                mean: f64::NAN,
                std: f64::NAN,
                ci95: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self {
            n,
            mean,
            std,
            ci95: Z_95 * std / (n as f64).sqrt(),
        }
    }
}

/// Sorted samples; percentiles interpolate linearly between order
/// statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

pub fn sinr_cdf(samples: &[f64]) -> Result<EmpiricalCdf> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig(
            "a CDF needs at least one sample".into(),
        ));
    }
    if samples.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidConfig("CDF samples must not be NaN".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf { sorted })
}

impl EmpiricalCdf {
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Value at percentile `q` in [0, 100]; sample `j` of `n` sits at
    /// `100 * j / (n - 1)`.
    pub fn percentile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        if n == 1 {
            return self.sorted[0];
        }
        let pos = (q.clamp(0.0, 100.0) / 100.0) * (n - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let frac = pos - lo as f64;
        self.sorted[lo] + frac * (self.sorted[hi] - self.sorted[lo])
    }

    pub fn median(&self) -> f64 {
        self.percentile(50.0)
    }

    /// `(value, cumulative fraction)` rows, fraction `(j + 1) / n`.
    pub fn table(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(move |(j, &v)| (v, (j + 1) as f64 / n))
    }
}
