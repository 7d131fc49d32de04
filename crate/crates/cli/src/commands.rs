//! One function per subcommand. Each returns data; the binary does the
//! printing.

use std::io::Write;

use anosovlab::asymptotics::{entropy_integral_constant, full_circle_integral, predict, r2_integral_constant, Prediction};
use anosovlab::entropy::{EntropyReport, ReportOptions};
use anosovlab::generator::{seed_state, Stream, MODULUS};
use anosovlab::geodesic::{curvature_report, integrate_geodesic, CurvatureMethod, CurvatureReport, SuspensionPoint, Trajectory};
use anosovlab::matrix::{Family, IntegerMatrix};
use anosovlab::spectrum::{eigenvalues_mixmax_analytic, eigenvalues_numeric, IndexConvention, Spectrum, SpectrumSource};
use anosovlab::stats::{compare_generators, BatteryConfig, ComparisonRow, GeneratorConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Numeric spectrum of `m`, or the analytic MIXMAX spectrum under `analytic`.
pub fn cmd_spectrum(m: &IntegerMatrix, analytic: Option<IndexConvention>, solver_tol: f64) -> CliResult<Spectrum> {
    match analytic {
        None => Ok(eigenvalues_numeric(m, solver_tol)?),
        Some(conv) => match m.family() {
            Family::Mixmax { n, .. } => Ok(eigenvalues_mixmax_analytic(n, conv)?),
            _ => Err(CliError::invalid("the analytic spectrum exists only for the mixmax family")),
        },
    }
}

pub fn read_spectrum_csv(text: &str) -> CliResult<Spectrum> {
    // the source column is not stored; a loaded spectrum is treated as numeric
    Ok(Spectrum::from_csv(text, SpectrumSource::Numeric)?)
}

pub fn cmd_entropy(spec: &Spectrum, opts: &ReportOptions) -> CliResult<EntropyReport> {
    Ok(EntropyReport::compute(spec, opts)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub tol: f64,
    pub entropy_constant: f64,
    pub entropy_constant_error: f64,
    pub r2_constant: f64,
    pub r2_constant_error: f64,
    pub full_circle: f64,
}

pub fn cmd_constants(tol: f64) -> CliResult<ConstantsReport> {
    let c1 = entropy_integral_constant(tol)?;
    // the nested integral is far costlier; its tolerance is floored
    let c3 = r2_integral_constant(tol.max(1e-8))?;
    let full = full_circle_integral(tol)?;
    Ok(ConstantsReport {
        tol,
        entropy_constant: c1.value,
        entropy_constant_error: c1.abs_error_estimate,
        r2_constant: c3.value,
        r2_constant_error: c3.abs_error_estimate,
        full_circle: full.value,
    })
}

pub fn cmd_predict(n: f64) -> CliResult<Prediction> {
    Ok(predict(n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    F64Text,
    U64BinaryLe,
}

impl std::str::FromStr for SampleFormat {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "f64-text" => Ok(Self::F64Text),
            "u64-binary-le" => Ok(Self::U64BinaryLe),
            other => Err(CliError::invalid(format!("unknown sample format {other:?}"))),
        }
    }
}

/// `anosovlab-v1 N s p`, the first line of the binary sample format.
pub fn binary_header(m: &IntegerMatrix) -> String {
    let s = match m.family() {
        Family::Mixmax { s, .. } => s,
        _ => 0,
    };
    format!("anosovlab-v1 {} {} {}\n", m.n(), s, MODULUS)
}

const GEN_CHUNK: usize = 1 << 16;

/// Streams `count` outputs of the generator driven by `m` into `out`.
pub fn cmd_gen<W: Write>(m: &IntegerMatrix, seed: &[u8], count: usize, format: SampleFormat, out: &mut W) -> CliResult<()> {
    let mut stream = Stream::new(m.clone(), seed_state(m.n(), seed)?)?;
    if format == SampleFormat::U64BinaryLe {
        out.write_all(binary_header(m).as_bytes())?;
    }
    let mut left = count;
    while left > 0 {
        let take = left.min(GEN_CHUNK);
        let residues = stream.fill_residues(take);
        match format {
            SampleFormat::U64BinaryLe => {
                let mut buf = Vec::with_capacity(8 * take);
                for r in residues {
                    buf.extend_from_slice(&r.to_le_bytes());
                }
                out.write_all(&buf)?;
            }
            SampleFormat::F64Text => {
                let mut buf = String::with_capacity(24 * take);
                for r in residues {
                    buf.push_str(&anosovlab::generator::to_unit(r).to_string());
                    buf.push('\n');
                }
                out.write_all(buf.as_bytes())?;
            }
        }
        left -= take;
    }
    out.flush()?;
    Ok(())
}

/// Battery file: the generators to compare and the battery settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryFile {
    pub generators: Vec<GeneratorConfig>,
    #[serde(default)]
    pub battery: BatteryConfig,
}

pub fn cmd_stats(file: &BatteryFile) -> CliResult<Vec<ComparisonRow>> {
    Ok(compare_generators(&file.generators, &file.battery)?)
}

pub fn cmd_curvature(pt: &SuspensionPoint, method: CurvatureMethod, h: f64) -> CliResult<CurvatureReport> {
    Ok(curvature_report(pt, method, h)?)
}

pub fn cmd_geodesic(pt: &SuspensionPoint, v: &[f64; 3], t_end: f64, dt: f64) -> CliResult<Trajectory> {
    Ok(integrate_geodesic(pt, v, t_end, dt)?)
}

#[derive(Serialize)]
struct TrajectoryRow {
    t: f64,
    w1: f64,
    w2: f64,
    u: f64,
    dw1: f64,
    dw2: f64,
    du: f64,
    energy: f64,
}

pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in &traj.samples {
        w.serialize(TrajectoryRow {
            t: s.t,
            w1: s.x[0],
            w2: s.x[1],
            u: s.x[2],
            dw1: s.v[0],
            dw2: s.v[1],
            du: s.v[2],
            energy: s.energy,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a list of exactly three comma-separated numbers.
pub fn parse_triple(values: &[f64], what: &str) -> CliResult<[f64; 3]> {
    <[f64; 3]>::try_from(values).map_err(|_| CliError::invalid(format!("{what} needs 3 components, got {}", values.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use anosovlab::matrix::{build_mixmax, cat_map};

    #[test]
    fn binary_layout() {
        let m = build_mixmax(8, -1).unwrap();
        let mut buf = Vec::new();
        cmd_gen(&m, b"ab", 3, SampleFormat::U64BinaryLe, &mut buf).unwrap();
        let header = format!("anosovlab-v1 8 -1 {}\n", MODULUS);
        assert!(buf.starts_with(header.as_bytes()));
        assert_eq!(buf.len(), header.len() + 24);
        let mut text = Vec::new();
        cmd_gen(&m, b"ab", 3, SampleFormat::F64Text, &mut text).unwrap();
        let first: f64 = String::from_utf8(text).unwrap().lines().next().unwrap().parse().unwrap();
        let r = u64::from_le_bytes(buf[header.len()..header.len() + 8].try_into().unwrap());
        assert_eq!(first, anosovlab::generator::to_unit(r));
    }

    #[test]
    fn chunked_generation_is_contiguous() {
        let m = build_mixmax(17, 0).unwrap();
        let mut a = Vec::new();
        cmd_gen(&m, b"k", GEN_CHUNK + 5, SampleFormat::U64BinaryLe, &mut a).unwrap();
        let mut stream = Stream::new(m.clone(), seed_state(17, b"k").unwrap()).unwrap();
        let all = stream.fill_residues(GEN_CHUNK + 5);
        let off = binary_header(&m).len();
        let last = u64::from_le_bytes(a[a.len() - 8..].try_into().unwrap());
        assert_eq!(a.len(), off + 8 * all.len());
        assert_eq!(last, *all.last().unwrap());
    }

    #[test]
    fn analytic_needs_mixmax() {
        assert!(cmd_spectrum(&cat_map(), Some(IndexConvention::Symmetric), 1e-10).is_err());
    }
}
