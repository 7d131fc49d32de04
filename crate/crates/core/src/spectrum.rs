//! Eigenvalue spectra of evolution matrices.
//!
//! Two routes produce a [`Spectrum`]: a dense numeric eigensolve of an
//! [`IntegerMatrix`], and the closed-form MIXMAX parabola formula
//! `lambda = exp(i phi) / (4 cos^2(phi/2))` evaluated on a phase grid chosen by
//! an [`IndexConvention`]. The two are compared by [`fit_convention`].

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::matrix::{Family, IntegerMatrix};

/// Largest dimension accepted by the dense solver.
pub const MAX_DENSE_DIM: usize = 4096;

/// Relative tolerance on the determinant identity for numeric spectra.
pub const SOLVER_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenClass {
    Contracting,
    Expanding,
    /// modulus exactly 1
    Unit,
}

impl EigenClass {
    fn of(modulus: f64) -> Self {
        if modulus > 1.0 {
            EigenClass::Expanding
        } else if modulus < 1.0 {
            EigenClass::Contracting
        } else {
            EigenClass::Unit
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EigenClass::Contracting => "contracting",
            EigenClass::Expanding => "expanding",
            EigenClass::Unit => "unit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumSource {
    Numeric,
    Analytic,
}

impl fmt::Display for SpectrumSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumSource::Numeric => "numeric",
            SpectrumSource::Analytic => "analytic",
        })
    }
}

/// Eigenvalues sorted by phase ascending (ties by modulus), with cached
/// modulus, phase in (-pi, pi] and class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
    moduli: Vec<f64>,
    phases: Vec<f64>,
    classes: Vec<EigenClass>,
    source: SpectrumSource,
}

fn phase_of(z: Complex64) -> f64 {
    let p = z.im.atan2(z.re);
    if p == -PI {
        PI
    } else {
        p
    }
}

impl Spectrum {
    pub fn from_eigenvalues(mut eigenvalues: Vec<Complex64>, source: SpectrumSource) -> Self {
        eigenvalues.sort_by(|a, b| {
            phase_of(*a)
                .total_cmp(&phase_of(*b))
                .then(a.norm().total_cmp(&b.norm()))
        });
        let moduli: Vec<f64> = eigenvalues.iter().map(|z| z.norm()).collect();
        let phases = eigenvalues.iter().map(|&z| phase_of(z)).collect();
        let classes = moduli.iter().map(|&m| EigenClass::of(m)).collect();
        Self { eigenvalues, moduli, phases, classes, source }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn moduli(&self) -> &[f64] {
        &self.moduli
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn classes(&self) -> &[EigenClass] {
        &self.classes
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    /// Product of all eigenvalues, accumulated as a log-modulus and phase sum
    /// so large spectra do not overflow.
    pub fn product(&self) -> Complex64 {
        let log_mod: f64 = self.moduli.iter().map(|m| m.ln()).sum();
        let phase: f64 = self.phases.iter().sum();
        Complex64::from_polar(log_mod.exp(), phase)
    }

    /// Sum of ln|lambda| over the whole spectrum (0 when det = +-1).
    pub fn log_abs_det(&self) -> f64 {
        self.moduli.iter().map(|m| m.ln()).sum()
    }

    /// Spectrum of the inverse matrix.
    pub fn reciprocal(&self) -> Spectrum {
        let inv = self.eigenvalues.iter().map(|z| z.inv()).collect();
        Spectrum::from_eigenvalues(inv, self.source)
    }

    /// Largest distance between the spectrum and its complex conjugate,
    /// matching eigenvalues greedily.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let mut used = vec![false; self.len()];
        let mut worst: f64 = 0.0;
        for z in &self.eigenvalues {
            let target = z.conj();
            let (best, dist) = self
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, w)| (i, (w - target).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("spectrum is nonempty");
            used[best] = true;
            worst = worst.max(dist);
        }
        worst
    }

    /// Splits the spectrum at the unit circle; fails if any modulus lies
    /// within `tol` of 1.
    pub fn classify(&self, tol: f64) -> Result<Classification> {
        let mut contracting = Vec::new();
        let mut expanding = Vec::new();
        for (i, &m) in self.moduli.iter().enumerate() {
            if (m - 1.0).abs() <= tol {
                return Err(Error::BorderlineSpectrum { modulus: m, tol });
            }
            if m > 1.0 {
                expanding.push(i);
            } else {
                contracting.push(i);
            }
        }
        Ok(Classification { contracting, expanding })
    }

    /// ln|lambda| over the expanding eigenvalues, in phase order.
    pub fn expanding_logs(&self, tol: f64) -> Result<Vec<f64>> {
        let c = self.classify(tol)?;
        Ok(c.expanding.iter().map(|&i| self.moduli[i].ln()).collect())
    }

    /// CSV with header `re,im,modulus,phase,class`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,modulus,phase,class\n");
        for i in 0..self.len() {
            let z = self.eigenvalues[i];
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{}\n",
                z.re,
                z.im,
                self.moduli[i],
                self.phases[i],
                self.classes[i].as_str()
            ));
        }
        out
    }

    /// Reads the CSV written by [`Spectrum::to_csv`]. Only `re` and `im` are
    /// used; the other columns are recomputed.
    pub fn from_csv(text: &str, source: SpectrumSource) -> Result<Spectrum> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty spectrum file".into() })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let re_col = cols.iter().position(|&c| c == "re");
        let im_col = cols.iter().position(|&c| c == "im");
        let (Some(re_col), Some(im_col)) = (re_col, im_col) else {
            return Err(Error::Parse { line: 1, msg: "header must contain re and im columns".into() });
        };
        let mut eig = Vec::new();
        for (i, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |c: usize| -> Result<f64> {
                fields
                    .get(c)
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("bad number in column {c}") })
            };
            eig.push(Complex64::new(get(re_col)?, get(im_col)?));
        }
        if eig.is_empty() {
            return Err(Error::Parse { line: 2, msg: "no eigenvalues".into() });
        }
        Ok(Spectrum::from_eigenvalues(eig, source))
    }
}

/// Index sets into a [`Spectrum`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub contracting: Vec<usize>,
    pub expanding: Vec<usize>,
}

impl Classification {
    /// Number of expanding eigenvalues.
    pub fn d(&self) -> usize {
        self.expanding.len()
    }
}

/// Dense numeric eigenvalues of `m`.
///
/// The determinant identity `|sum ln|lambda_i| - ln|det|| <= tol * n` is
/// checked whenever `|det|` is known.
pub fn eigenvalues_numeric(m: &IntegerMatrix, tol: f64) -> Result<Spectrum> {
    let n = m.n();
    if n > MAX_DENSE_DIM {
        return Err(Error::Capacity { n, max: MAX_DENSE_DIM });
    }
    let values = eigen::eigenvalues(n, m.to_f64())?;
    let spec = Spectrum::from_eigenvalues(values, SpectrumSource::Numeric);
    if let Some(log_det) = known_log_abs_det(m) {
        let residual = (spec.log_abs_det() - log_det).abs();
        if residual > tol * n as f64 {
            return Err(Error::DeterminantResidual { residual });
        }
    }
    Ok(spec)
}

/// Largest custom matrix whose determinant is computed exactly for the
/// solver check; the named families are unimodular by construction.
const EXACT_DET_MAX_DIM: usize = 128;

fn known_log_abs_det(m: &IntegerMatrix) -> Option<f64> {
    match m.family() {
        Family::Mixmax { .. } | Family::Cat | Family::Rcarry => Some(0.0),
        Family::Custom if m.n() <= EXACT_DET_MAX_DIM => {
            log_abs_bigint(&crate::matrix::determinant_exact(m))
        }
        Family::Custom => None,
    }
}

fn log_abs_bigint(x: &num_bigint::BigInt) -> Option<f64> {
    use num_traits::{Signed, ToPrimitive, Zero};
    if x.is_zero() {
        return None;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.abs().to_f64().map(f64::ln);
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64()?;
    Some(top.ln() + shift as f64 * std::f64::consts::LN_2)
}

/// How the integer index of the eigenvalue formula maps to a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexConvention {
    /// `phi_j = pi j / N`, `j = -N/2 .. N/2 - 1`; even `N` only. Every
    /// modulus falls in [1/4, 1/2].
    Literal,
    /// `phi_k = pi (2k + 1 - N) / N`, `k = 0 .. N - 1`: `N` phases with
    /// spacing `2 pi / N`, symmetric about 0 and never equal to pi.
    Symmetric,
}

impl IndexConvention {
    pub const ALL: [IndexConvention; 2] = [IndexConvention::Literal, IndexConvention::Symmetric];

    pub fn name(self) -> &'static str {
        match self {
            IndexConvention::Literal => "literal",
            IndexConvention::Symmetric => "symmetric",
        }
    }

    pub fn phases(self, n: usize) -> Result<Vec<f64>> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let nf = n as f64;
        match self {
            IndexConvention::Literal => {
                if n % 2 == 1 {
                    return Err(Error::UnsupportedConvention { convention: self.name(), n });
                }
                let half = (n / 2) as i64;
                Ok((-half..half).map(|j| PI * j as f64 / nf).collect())
            }
            IndexConvention::Symmetric => {
                Ok((0..n).map(|k| PI * (2.0 * k as f64 + 1.0 - nf) / nf).collect())
            }
        }
    }
}

/// Convention frozen from fitting against numeric spectra of T(16,0) and
/// T(32,0); see [`fit_convention`].
pub const FITTED_CONVENTION: IndexConvention = IndexConvention::Symmetric;

/// Point on the parabola `r(phi) = 1 / (4 cos^2(phi/2))` at phase `phi`.
pub fn parabola_point(phi: f64) -> Complex64 {
    let c = (phi / 2.0).cos();
    Complex64::from_polar(1.0 / (4.0 * c * c), phi)
}

/// MIXMAX eigenvalues from the parabola formula on the given phase grid.
pub fn eigenvalues_mixmax_analytic(n: usize, convention: IndexConvention) -> Result<Spectrum> {
    let values = convention.phases(n)?.into_iter().map(parabola_point).collect();
    Ok(Spectrum::from_eigenvalues(values, SpectrumSource::Analytic))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curve {
    /// `r(phi) = 1 / (4 cos^2(phi/2))`, carries the spectrum of T
    Parabola,
    /// `r(phi) = 4 cos^2(phi/2)`, carries the spectrum of T^-1
    Cardioid,
}

impl Curve {
    pub fn radius(self, phi: f64) -> f64 {
        let c = (phi / 2.0).cos();
        match self {
            Curve::Parabola => 1.0 / (4.0 * c * c),
            Curve::Cardioid => 4.0 * c * c,
        }
    }
}

/// `max_i |r(phi_i) - |lambda_i||` for the chosen curve.
pub fn spectral_curve_residual(spec: &Spectrum, curve: Curve) -> f64 {
    spec.phases()
        .iter()
        .zip(spec.moduli())
        .map(|(&phi, &m)| (curve.radius(phi) - m).abs())
        .fold(0.0, f64::max)
}

/// Scale-free variant: `max_i |r(phi_i) / |lambda_i| - 1|`.
pub fn spectral_curve_relative_residual(spec: &Spectrum, curve: Curve) -> f64 {
    spec.phases()
        .iter()
        .zip(spec.moduli())
        .map(|(&phi, &m)| (curve.radius(phi) / m - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Pairwise comparison of two phase-sorted spectra of equal length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    /// `|  |a_i| - |b_i|  | / |b_i|` per pair
    pub relative_modulus_error: Vec<f64>,
    /// `|phase(a_i) - phase(b_i)|` per pair
    pub phase_error: Vec<f64>,
    pub max_relative_modulus_error: f64,
    pub median_relative_modulus_error: f64,
}

/// Compares `candidate` against `reference` eigenvalue by eigenvalue after
/// phase sorting.
pub fn compare_spectra(candidate: &Spectrum, reference: &Spectrum) -> Result<SpectrumComparison> {
    if candidate.len() != reference.len() {
        return Err(Error::DimensionMismatch { expected: reference.len(), actual: candidate.len() });
    }
    let rel: Vec<f64> = candidate
        .moduli()
        .iter()
        .zip(reference.moduli())
        .map(|(a, b)| (a - b).abs() / b)
        .collect();
    let phase_error = candidate
        .phases()
        .iter()
        .zip(reference.phases())
        .map(|(a, b)| (a - b).abs())
        .collect();
    let mut sorted = rel.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    Ok(SpectrumComparison {
        max_relative_modulus_error: sorted.last().copied().unwrap_or(0.0),
        median_relative_modulus_error: median,
        relative_modulus_error: rel,
        phase_error,
    })
}

/// Result of choosing an index convention against numeric spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionFit {
    pub best: IndexConvention,
    /// (convention, N, median relative modulus error) for every candidate
    /// that is defined at N
    pub scores: Vec<(IndexConvention, usize, f64)>,
}

/// Scores every [`IndexConvention`] by the median relative modulus error
/// against the numeric spectrum of T(N, 0) for each `N` in `dims`, and
/// returns the candidate with the smallest worst-case score.
pub fn fit_convention(dims: &[usize]) -> Result<ConventionFit> {
    let mut scores = Vec::new();
    let mut best: Option<(IndexConvention, f64)> = None;
    for conv in IndexConvention::ALL {
        let mut worst: f64 = 0.0;
        let mut defined = true;
        for &n in dims {
            let numeric = eigenvalues_numeric(&crate::matrix::build_mixmax(n, 0)?, SOLVER_REL_TOL)?;
            match eigenvalues_mixmax_analytic(n, conv) {
                Ok(analytic) => {
                    let cmp = compare_spectra(&analytic, &numeric)?;
                    scores.push((conv, n, cmp.median_relative_modulus_error));
                    worst = worst.max(cmp.median_relative_modulus_error);
                }
                Err(Error::UnsupportedConvention { .. }) => defined = false,
                Err(e) => return Err(e),
            }
        }
        if defined && best.is_none_or(|(_, b)| worst < b) {
            best = Some((conv, worst));
        }
    }
    let (best, _) = best.ok_or_else(|| Error::InvalidInput("no convention is defined for the fit dimensions".into()))?;
    Ok(ConventionFit { best, scores })
}
