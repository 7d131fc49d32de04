//! A small statistical battery for generator output.

mod battery;
mod discrepancy;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub use battery::{compare_generators, BatteryConfig, ComparisonRow, GeneratorConfig, GeneratorKind};
pub use discrepancy::{
    discrepancy_curve, star_discrepancy, star_discrepancy_1d, star_discrepancy_1d_brute, DiscrepancyBounds,
    DEFAULT_GRID_2D, DEFAULT_GRID_3D, MAX_GRID_POINTS,
};

pub const DEFAULT_SIGNIFICANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub sample_size: usize,
    pub significance: f64,
    pub passed: bool,
}

/// Two-sided acceptance: both tails of size `alpha / 2` reject.
fn two_sided_pass(p: f64, alpha: f64) -> bool {
    p > alpha / 2.0 && p < 1.0 - alpha / 2.0
}

/// Pearson chi-square test of equal bin probabilities. Values are binned by
/// `floor(x * bins)`; inputs outside [0, 1) are rejected.
///
/// A p-value too close to 1 (suspiciously even counts) fails as well as one
/// too close to 0.
pub fn chi_square_uniformity(samples: &[f64], bins: usize, alpha: f64) -> Result<TestReport> {
    if bins < 2 {
        return Err(Error::InvalidInput("need at least 2 bins".into()));
    }
    if samples.len() < 10 * bins {
        return Err(Error::Undersampled { samples: samples.len(), required: 10 * bins });
    }
    let mut counts = vec![0u64; bins];
    for &x in samples {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::InvalidInput(format!("sample {x} is outside [0, 1)")));
        }
        counts[((x * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected = samples.len() as f64 / bins as f64;
    let statistic = chi_square_statistic(&counts, expected);
    let dist = ChiSquared::new((bins - 1) as f64).expect("positive degrees of freedom");
    let p_value = dist.sf(statistic).clamp(0.0, 1.0);
    Ok(TestReport {
        name: format!("chi-square uniformity ({bins} bins)"),
        statistic,
        p_value,
        sample_size: samples.len(),
        significance: alpha,
        passed: two_sided_pass(p_value, alpha),
    })
}

/// `sum (O - E)^2 / E` over the given counts.
pub fn chi_square_statistic(counts: &[u64], expected: f64) -> f64 {
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

/// Pearson correlation of `x[..n-lag]` with `x[lag..]`, with the normal
/// approximation `z = r sqrt(n - lag)` for its two-sided p-value.
pub fn serial_correlation(samples: &[f64], lag: usize, alpha: f64) -> Result<TestReport> {
    if samples.len() <= lag + 2 {
        return Err(Error::Undersampled { samples: samples.len(), required: lag + 3 });
    }
    let m = samples.len() - lag;
    let a = &samples[..m];
    let b = &samples[lag..];
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let r = if lag == 0 { 1.0 } else { (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0) };
    let z = r * (m as f64).sqrt();
    let p_value = (2.0 * Normal::standard().sf(z.abs())).clamp(0.0, 1.0);
    Ok(TestReport {
        name: format!("serial correlation (lag {lag})"),
        statistic: r,
        p_value,
        sample_size: samples.len(),
        significance: alpha,
        passed: p_value > alpha,
    })
}
