//! Report bundles: one JSON document plus CSV side files, carrying the run
//! configuration and a SHA-256 content hash.

use std::path::Path;

use anosovlab::entropy::{EntropyReport, ReportOptions};
use anosovlab::generator::{seed_state, Stream};
use anosovlab::matrix::{verify_c_condition, Family, IntegerMatrix};
use anosovlab::spectrum::{eigenvalues_mixmax_analytic, eigenvalues_numeric, Spectrum, FITTED_CONVENTION};
use anosovlab::stats::{chi_square_uniformity, discrepancy_curve, serial_correlation, star_discrepancy_1d, TestReport};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, SpectrumSourceChoice};
use crate::error::{CliError, CliResult, Stage};

pub const BUNDLE_FORMAT: &str = "anosovlab-bundle/1";
pub const SCHEMA: &str = include_str!("../schema/bundle.schema.json");

pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const DISCREPANCY_FILE: &str = "discrepancy.csv";
pub const BUNDLE_FILE: &str = "bundle.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSummary {
    pub label: String,
    pub n: usize,
    pub trace: i64,
    pub nonzero: usize,
    pub max_abs_entry: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub source: String,
    /// index convention of an analytic spectrum, empty for numeric ones
    pub convention: String,
    pub len: usize,
    pub expanding: usize,
    pub contracting: usize,
    pub min_distance_to_unit_circle: f64,
    pub determinant_residual: f64,
    pub c_condition: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub samples: usize,
    pub tests: Vec<TestReport>,
    pub discrepancy_1d: f64,
    pub discrepancy_curve: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

/// Everything covered by the content hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleBody {
    pub format: String,
    pub config: RunConfig,
    pub matrix: MatrixSummary,
    pub spectrum: SpectrumSummary,
    pub entropy: EntropyReport,
    /// requested orders above d, left out of `entropy.r`
    pub orders_beyond_d: Vec<usize>,
    pub stats: StatsSummary,
    pub files: Vec<FileEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    #[serde(flatten)]
    pub body: BundleBody,
    pub content_hash: String,
}

/// A bundle and the contents of its side files.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleOutput {
    pub bundle: Bundle,
    pub side_files: Vec<(String, String)>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn content_hash(body: &BundleBody) -> CliResult<String> {
    Ok(sha256_hex(&serde_json::to_vec(body)?))
}

fn spectrum_stage(cfg: &RunConfig, m: &IntegerMatrix) -> CliResult<(Spectrum, String)> {
    match cfg.spectrum.source {
        SpectrumSourceChoice::Numeric => Ok((eigenvalues_numeric(m, cfg.spectrum.solver_tol)?, String::new())),
        SpectrumSourceChoice::Analytic => match m.family() {
            Family::Mixmax { n, .. } => {
                Ok((eigenvalues_mixmax_analytic(n, FITTED_CONVENTION)?, FITTED_CONVENTION.name().to_string()))
            }
            _ => Err(CliError::invalid("the analytic spectrum exists only for the mixmax family")),
        },
    }
}

fn stats_stage(cfg: &RunConfig, m: &IntegerMatrix) -> CliResult<(StatsSummary, String)> {
    let s = &cfg.sampling;
    let mut stream = Stream::new(m.clone(), seed_state(m.n(), &s.seed_bytes()?)?)?;
    let samples = stream.fill(s.samples);
    let mut tests = vec![chi_square_uniformity(&samples, s.bins, s.significance)?];
    for &lag in &s.lags {
        tests.push(serial_correlation(&samples, lag, s.significance)?);
    }
    let checkpoints: Vec<usize> = s.checkpoints.iter().copied().filter(|&c| c >= 1 && c <= samples.len()).collect();
    let curve = discrepancy_curve(&samples, &checkpoints)?;
    let mut csv = String::from("n,discrepancy\n");
    for (n, d) in &curve {
        csv.push_str(&format!("{n},{d:e}\n"));
    }
    let summary =
        StatsSummary { samples: samples.len(), tests, discrepancy_1d: star_discrepancy_1d(&samples)?, discrepancy_curve: curve };
    Ok((summary, csv))
}

/// Runs matrix, spectrum, entropy and stats for `cfg`. Errors name the stage
/// that failed.
pub fn cmd_report_bundle(cfg: &RunConfig) -> CliResult<BundleOutput> {
    let m = cfg.matrix.build().stage("matrix")?;
    let (spec, convention) = spectrum_stage(cfg, &m).stage("spectrum")?;
    let cc = verify_c_condition(&spec, cfg.spectrum.classify_tol).stage("spectrum")?;
    let cls = spec.classify(cfg.spectrum.classify_tol).stage("spectrum")?;
    let d = cls.d();

    let (orders, beyond): (Vec<usize>, Vec<usize>) = cfg.entropy.orders.iter().partition(|&&k| k <= d);
    let opts = ReportOptions { orders, method: cfg.entropy.method, qs: cfg.entropy.qs.clone(), tol: cfg.spectrum.classify_tol };
    let entropy = EntropyReport::compute(&spec, &opts).stage("entropy")?;

    let (stats, discrepancy_csv) = stats_stage(cfg, &m).stage("stats")?;

    let spectrum_csv = spec.to_csv();
    let side_files = vec![(SPECTRUM_FILE.to_string(), spectrum_csv), (DISCREPANCY_FILE.to_string(), discrepancy_csv)];
    let files = side_files.iter().map(|(name, text)| FileEntry { name: name.clone(), sha256: sha256_hex(text.as_bytes()) }).collect();

    let body = BundleBody {
        format: BUNDLE_FORMAT.into(),
        config: cfg.clone(),
        matrix: MatrixSummary {
            label: cfg.matrix.label(),
            n: m.n(),
            trace: m.trace(),
            nonzero: m.nonzero_count(),
            max_abs_entry: m.max_abs_entry(),
        },
        spectrum: SpectrumSummary {
            source: spec.source().to_string(),
            convention,
            len: spec.len(),
            expanding: cls.expanding.len(),
            contracting: cls.contracting.len(),
            min_distance_to_unit_circle: cc.min_distance_to_unit_circle,
            determinant_residual: cc.determinant_residual,
            c_condition: cc.holds,
        },
        entropy,
        orders_beyond_d: beyond,
        stats,
        files,
    };
    let content_hash = content_hash(&body)?;
    Ok(BundleOutput { bundle: Bundle { body, content_hash }, side_files })
}

/// Checks a JSON document against the shipped bundle schema.
pub fn validate_against_schema(doc: &Value) -> CliResult<()> {
    let schema: Value = serde_json::from_str(SCHEMA)?;
    let validator =
        jsonschema::validator_for(&schema).map_err(|e| CliError::invalid(format!("bundle schema is invalid: {e}")))?;
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{}: {e}", e.instance_path())).collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::invalid(format!("bundle does not match the schema: {}", errors.join("; "))))
    }
}

/// Validates and writes the bundle and its side files into `dir`.
pub fn write_bundle(out: &BundleOutput, dir: &Path) -> CliResult<()> {
    let doc = serde_json::to_value(&out.bundle)?;
    validate_against_schema(&doc)?;
    std::fs::create_dir_all(dir)?;
    for (name, text) in &out.side_files {
        std::fs::write(dir.join(name), text)?;
    }
    let mut json = serde_json::to_string_pretty(&doc)?;
    json.push('\n');
    std::fs::write(dir.join(BUNDLE_FILE), json)?;
    Ok(())
}

pub fn read_bundle(path: &Path) -> CliResult<Bundle> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)?;
    validate_against_schema(&doc)?;
    Ok(serde_json::from_value(doc)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub stored_hash: String,
    /// hash recomputed from the stored body
    pub body_hash: String,
    /// hash of a fresh run of the embedded config
    pub rerun_hash: String,
    pub reproduced: bool,
}

/// Recomputes the hash of a stored bundle and reruns its embedded config.
pub fn verify_bundle(bundle: &Bundle) -> CliResult<VerifyReport> {
    let body_hash = content_hash(&bundle.body)?;
    let rerun = cmd_report_bundle(&bundle.body.config)?;
    let rerun_hash = rerun.bundle.content_hash;
    Ok(VerifyReport {
        reproduced: body_hash == bundle.content_hash && rerun_hash == bundle.content_hash,
        stored_hash: bundle.content_hash.clone(),
        body_hash,
        rerun_hash,
    })
}
