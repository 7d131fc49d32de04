//! Run configuration, read from and written to TOML.

use std::path::{Path, PathBuf};

use anosovlab::entropy::{RMethod, DEFAULT_CLASSIFY_TOL};
use anosovlab::matrix::{build_mixmax, cat_map, rcarry_companion, IntegerMatrix};
use anosovlab::spectrum::SOLVER_REL_TOL;
use anosovlab::stats::DEFAULT_SIGNIFICANCE;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatrixSpec {
    Mixmax {
        n: usize,
        #[serde(default)]
        s: i64,
    },
    Cat {},
    Rcarry {},
    /// plain-text matrix file
    File { path: PathBuf },
}

impl MatrixSpec {
    pub fn build(&self) -> CliResult<IntegerMatrix> {
        Ok(match self {
            MatrixSpec::Mixmax { n, s } => build_mixmax(*n, *s)?,
            MatrixSpec::Cat {} => cat_map(),
            MatrixSpec::Rcarry {} => rcarry_companion(),
            MatrixSpec::File { path } => read_matrix(path)?,
        })
    }

    pub fn label(&self) -> String {
        match self {
            MatrixSpec::Mixmax { n, s } => format!("mixmax({n},{s})"),
            MatrixSpec::Cat {} => "cat".into(),
            MatrixSpec::Rcarry {} => "rcarry".into(),
            MatrixSpec::File { path } => format!("file({})", path.display()),
        }
    }
}

pub fn read_matrix(path: &Path) -> CliResult<IntegerMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    Ok(IntegerMatrix::parse_text(&text)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumSourceChoice {
    Numeric,
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumOptions {
    pub source: SpectrumSourceChoice,
    pub solver_tol: f64,
    pub classify_tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { source: SpectrumSourceChoice::Numeric, solver_tol: SOLVER_REL_TOL, classify_tol: DEFAULT_CLASSIFY_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropyOptions {
    pub orders: Vec<usize>,
    pub method: RMethod,
    pub qs: Vec<f64>,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        Self { orders: vec![2], method: RMethod::Tuple, qs: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingOptions {
    /// hex-encoded seed bytes
    pub seed: String,
    pub samples: usize,
    pub bins: usize,
    pub lags: Vec<usize>,
    pub significance: f64,
    /// sample counts at which the 1-D discrepancy is recorded
    pub checkpoints: Vec<usize>,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            seed: "5eed".into(),
            samples: 100_000,
            bins: 100,
            lags: vec![1],
            significance: DEFAULT_SIGNIFICANCE,
            checkpoints: vec![100, 1_000, 10_000, 100_000],
        }
    }
}

impl SamplingOptions {
    pub fn seed_bytes(&self) -> CliResult<Vec<u8>> {
        parse_seed(&self.seed)
    }
}

pub fn parse_seed(hex_seed: &str) -> CliResult<Vec<u8>> {
    let bytes = hex::decode(hex_seed).map_err(|e| CliError::invalid(format!("seed {hex_seed:?} is not hex: {e}")))?;
    if bytes.is_empty() {
        return Err(CliError::invalid("seed must not be empty"));
    }
    Ok(bytes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputOptions {
    pub dir: PathBuf,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self { dir: PathBuf::from("bundle") }
    }
}

/// Everything a bundle run depends on besides input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_command")]
    pub command: String,
    pub matrix: MatrixSpec,
    #[serde(default)]
    pub spectrum: SpectrumOptions,
    #[serde(default)]
    pub entropy: EntropyOptions,
    #[serde(default)]
    pub sampling: SamplingOptions,
    #[serde(default)]
    pub output: OutputOptions,
}

fn default_command() -> String {
    "bundle".into()
}

impl RunConfig {
    pub fn new(matrix: MatrixSpec) -> Self {
        Self {
            command: default_command(),
            matrix,
            spectrum: SpectrumOptions::default(),
            entropy: EntropyOptions::default(),
            sampling: SamplingOptions::default(),
            output: OutputOptions::default(),
        }
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> CliResult<String> {
        Ok(toml::to_string(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip() {
        let mut c = RunConfig::new(MatrixSpec::Mixmax { n: 17, s: -1 });
        c.entropy.qs = vec![0.5, 2.0];
        let text = c.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn minimal_toml() {
        let c = RunConfig::from_toml("[matrix]\nfamily = \"cat\"\n").unwrap();
        assert_eq!(c.matrix, MatrixSpec::Cat {});
        assert_eq!(c.entropy.orders, vec![2]);
        assert!(RunConfig::from_toml("[matrix]\nfamily = \"cat\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("00ff").unwrap(), vec![0, 255]);
        assert!(parse_seed("").is_err());
        assert!(parse_seed("xyz").is_err());
    }
}
