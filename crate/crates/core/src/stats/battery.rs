//! Side-by-side comparison of generators: spectral invariants next to test
//! results and discrepancy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{self, RValue, DEFAULT_CLASSIFY_TOL};
use crate::error::{Error, Result};
use crate::generator::{seed_state, Stream};
use crate::matrix::{build_mixmax, cat_map, rcarry_companion, IntegerMatrix};
use crate::spectrum::{eigenvalues_numeric, SOLVER_REL_TOL};

use super::discrepancy::{discrepancy_curve, star_discrepancy, star_discrepancy_1d, DiscrepancyBounds};
use super::{chi_square_uniformity, serial_correlation, TestReport, DEFAULT_SIGNIFICANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GeneratorKind {
    Mixmax { n: usize, s: i64 },
    Cat,
    /// companion matrix of the subtract-with-borrow recurrence, run mod p
    Rcarry,
}

impl GeneratorKind {
    pub fn matrix(self) -> Result<IntegerMatrix> {
        match self {
            GeneratorKind::Mixmax { n, s } => build_mixmax(n, s),
            GeneratorKind::Cat => Ok(cat_map()),
            GeneratorKind::Rcarry => Ok(rcarry_companion()),
        }
    }

    pub fn label(self) -> String {
        match self {
            GeneratorKind::Mixmax { n, s } => format!("mixmax({n},{s})"),
            GeneratorKind::Cat => "cat".into(),
            GeneratorKind::Rcarry => "rcarry".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    /// seed bytes, taken as UTF-8
    pub seed: String,
}

fn default_samples() -> usize {
    1_000_000
}
fn default_bins() -> usize {
    1000
}
fn default_lags() -> Vec<usize> {
    vec![1]
}
fn default_significance() -> f64 {
    DEFAULT_SIGNIFICANCE
}
fn default_pairs() -> usize {
    10_000
}
fn default_checkpoints() -> Vec<usize> {
    vec![100, 1_000, 10_000, 100_000]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_lags")]
    pub lags: Vec<usize>,
    #[serde(default = "default_significance")]
    pub significance: f64,
    /// number of non-overlapping output pairs for the 2-D discrepancy bounds
    #[serde(default = "default_pairs")]
    pub discrepancy_pairs: usize,
    #[serde(default)]
    pub grid_2d: Option<usize>,
    /// sample counts at which the 1-D discrepancy is recorded
    #[serde(default = "default_checkpoints")]
    pub curve_checkpoints: Vec<usize>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            bins: default_bins(),
            lags: default_lags(),
            significance: default_significance(),
            discrepancy_pairs: default_pairs(),
            grid_2d: None,
            curve_checkpoints: default_checkpoints(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub kind: GeneratorKind,
    pub n: usize,
    pub h: f64,
    pub d: usize,
    pub r2_tuple: RValue,
    pub r2_split: f64,
    pub tests: Vec<TestReport>,
    pub passed: usize,
    pub total: usize,
    pub discrepancy_1d: f64,
    pub discrepancy_2d: DiscrepancyBounds,
    pub discrepancy_curve: Vec<(usize, f64)>,
}

fn run_one(cfg: &GeneratorConfig, battery: &BatteryConfig) -> Result<ComparisonRow> {
    let m = cfg.kind.matrix()?;
    let spec = eigenvalues_numeric(&m, SOLVER_REL_TOL)?;
    let h = entropy::entropy(&spec, DEFAULT_CLASSIFY_TOL)?;
    let d = spec.classify(DEFAULT_CLASSIFY_TOL)?.d();
    let r2_tuple = entropy::r_tuple(&spec, 2, DEFAULT_CLASSIFY_TOL)?;
    let r2_split = entropy::r2_split(&spec).value;

    let state = seed_state(m.n(), cfg.seed.as_bytes())?;
    let mut stream = Stream::new(m.clone(), state)?;
    let samples = stream.fill(battery.samples);

    let mut tests = vec![chi_square_uniformity(&samples, battery.bins, battery.significance)?];
    for &lag in &battery.lags {
        tests.push(serial_correlation(&samples, lag, battery.significance)?);
    }
    let passed = tests.iter().filter(|t| t.passed).count();

    let pairs: Vec<Vec<f64>> = samples
        .chunks_exact(2)
        .take(battery.discrepancy_pairs)
        .map(|c| c.to_vec())
        .collect();
    let discrepancy_2d = star_discrepancy(&pairs, 2, battery.grid_2d)?;
    let checkpoints: Vec<usize> =
        battery.curve_checkpoints.iter().copied().filter(|&c| c <= samples.len()).collect();

    Ok(ComparisonRow {
        name: cfg.kind.label(),
        kind: cfg.kind,
        n: m.n(),
        h,
        d,
        r2_tuple,
        r2_split,
        total: tests.len(),
        passed,
        tests,
        discrepancy_1d: star_discrepancy_1d(&samples)?,
        discrepancy_2d,
        discrepancy_curve: discrepancy_curve(&samples, &checkpoints)?,
    })
}

/// One row per generator, ordered by entropy, largest first. Rows are
/// computed independently and in parallel.
pub fn compare_generators(configs: &[GeneratorConfig], battery: &BatteryConfig) -> Result<Vec<ComparisonRow>> {
    if configs.len() < 2 {
        return Err(Error::InvalidInput("comparison needs at least two generators".into()));
    }
    let mut rows = configs.par_iter().map(|c| run_one(c, battery)).collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.h.total_cmp(&a.h));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BatteryConfig {
        BatteryConfig { samples: 20_000, bins: 100, discrepancy_pairs: 2_000, grid_2d: Some(64), ..Default::default() }
    }

    #[test]
    fn ordered_by_entropy() {
        let configs = [
            GeneratorConfig { kind: GeneratorKind::Cat, seed: "a".into() },
            GeneratorConfig { kind: GeneratorKind::Mixmax { n: 256, s: -1 }, seed: "a".into() },
            GeneratorConfig { kind: GeneratorKind::Rcarry, seed: "a".into() },
        ];
        let rows = compare_generators(&configs, &small()).unwrap();
        let names: Vec<&str> = rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["mixmax(256,-1)", "cat", "rcarry"]);
        assert!((rows[0].h - 164.5).abs() < 0.1);
        assert!((rows[2].h - 0.32).abs() < 0.05);
        let spec = eigenvalues_numeric(&cat_map(), SOLVER_REL_TOL).unwrap();
        assert_eq!(rows[1].h, entropy::entropy(&spec, DEFAULT_CLASSIFY_TOL).unwrap());
    }

    #[test]
    fn identical_configs_identical_rows() {
        let c = GeneratorConfig { kind: GeneratorKind::Mixmax { n: 17, s: 0 }, seed: "x".into() };
        let rows = compare_generators(&[c.clone(), c], &small()).unwrap();
        assert_eq!(rows[0], rows[1]);
    }

    #[test]
    fn needs_two() {
        let c = GeneratorConfig { kind: GeneratorKind::Cat, seed: "x".into() };
        assert!(compare_generators(&[c], &small()).is_err());
    }
}
