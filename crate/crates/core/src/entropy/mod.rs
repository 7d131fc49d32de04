//! Kolmogorov entropy and the extended entropies of a spectrum.
//!
//! With `h_i = ln |lambda_i|` over the `d` expanding eigenvalues:
//!
//! * `h = sum h_i`
//! * `r_2 = sum_{i != j} h_i h_j = h^2 - sum h_i^2` (ordered pairs)
//! * `r_k = k! e_k(h_1, ..., h_d)` for `3 <= k < d` (ordered distinct tuples)
//! * `r_d = prod h_i` for `d >= 3` (a single term, not `d!` of them)
//!
//! The split sum is a different quantity: a sum over phase-ordered split
//! points of (weight to the left) x (weight to the right).

mod empirical;
mod tsallis;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, SpectrumSource};

pub use empirical::{empirical_ks_entropy, KsEstimate, KsOptions};
pub use tsallis::{
    hq_from_logs, hq_spectrum, ln_q, ln_q_from_log, partition_entropy, tsallis_partition_entropy,
    HqValue, Partition, TsallisValue, PARTITION_SUM_TOL,
};

/// Default distance from the unit circle below which classification fails.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Values above this are reported as their natural logarithm.
pub const LOG_DOMAIN_THRESHOLD: f64 = 1e300;

pub(crate) fn expanding_moduli_logs(spec: &Spectrum, tol: f64) -> Result<Vec<f64>> {
    let logs = spec.expanding_logs(tol)?;
    if logs.is_empty() {
        return Err(Error::NotCSystem);
    }
    Ok(logs)
}

/// `e_0 ..= e_kmax` of `values` by the usual one-pass recurrence.
pub fn elementary_symmetric(values: &[f64], kmax: usize) -> Vec<f64> {
    let kmax = kmax.min(values.len());
    let mut e = vec![0.0; kmax + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        for k in (1..=kmax.min(i + 1)).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln e_0 ..= ln e_kmax` for positive `values`, never overflowing.
pub fn log_elementary_symmetric(values: &[f64], kmax: usize) -> Vec<f64> {
    let kmax = kmax.min(values.len());
    let mut le = vec![f64::NEG_INFINITY; kmax + 1];
    le[0] = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let lv = v.ln();
        for k in (1..=kmax.min(i + 1)).rev() {
            le[k] = log_add_exp(le[k], lv + le[k - 1]);
        }
    }
    le
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Kolmogorov entropy: sum of ln|lambda| over expanding eigenvalues.
pub fn entropy(spec: &Spectrum, tol: f64) -> Result<f64> {
    Ok(expanding_moduli_logs(spec, tol)?.iter().sum())
}

pub fn relaxation_time(h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("relaxation time needs h > 0, got {h}")));
    }
    Ok(1.0 / h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RMethod {
    Tuple,
    Split,
}

/// One extended-entropy value. When `log_domain` is set, `value` holds the
/// natural logarithm of the quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RValue {
    pub order: usize,
    pub method: RMethod,
    pub value: f64,
    pub log_domain: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl RValue {
    /// Natural log of the quantity (`-inf` for 0).
    pub fn ln(&self) -> f64 {
        if self.log_domain {
            self.value
        } else {
            self.value.ln()
        }
    }
}

/// Natural log of `r_k` for positive `logs` (the `h_i`), or `None` if `k > d`.
fn ln_r_tuple(logs: &[f64], k: usize, le: &[f64]) -> Option<f64> {
    let d = logs.len();
    if k > d {
        None
    } else if k >= 3 && k == d {
        Some(logs.iter().map(|h| h.ln()).sum())
    } else {
        Some(ln_factorial(k) + le[k])
    }
}

/// `r_k` from the elementary symmetric values `e` (which must reach order k).
fn direct_r_tuple(logs: &[f64], k: usize, e: &[f64]) -> f64 {
    if k >= 3 && k == logs.len() {
        return logs.iter().product();
    }
    let k_fact: f64 = (2..=k).map(|i| i as f64).product();
    k_fact * e[k]
}

fn tuple_value(logs: &[f64], k: usize, le: &[f64], e: &[f64]) -> RValue {
    match ln_r_tuple(logs, k, le) {
        None => RValue {
            order: k,
            method: RMethod::Tuple,
            value: 0.0,
            log_domain: false,
            warning: Some(format!("order {k} exceeds the {} expanding eigenvalues", logs.len())),
        },
        Some(lr) if lr > LOG_DOMAIN_THRESHOLD.ln() => {
            RValue { order: k, method: RMethod::Tuple, value: lr, log_domain: true, warning: None }
        }
        Some(lr) => {
            let direct = direct_r_tuple(logs, k, e);
            let value = if direct.is_finite() { direct } else { lr.exp() };
            RValue { order: k, method: RMethod::Tuple, value, log_domain: false, warning: None }
        }
    }
}

/// `r_k` from the `h_i` of the expanding eigenvalues.
pub fn r_tuple_from_logs(logs: &[f64], k: usize) -> Result<RValue> {
    if k < 2 {
        return Err(Error::Domain(format!("extended entropy order must be at least 2, got {k}")));
    }
    if logs.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::Domain("expanding log-moduli must be positive".into()));
    }
    let le = log_elementary_symmetric(logs, k);
    let e = elementary_symmetric(logs, k);
    Ok(tuple_value(logs, k, &le, &e))
}

pub fn r_tuple(spec: &Spectrum, k: usize, tol: f64) -> Result<RValue> {
    r_tuple_from_logs(&expanding_moduli_logs(spec, tol)?, k)
}

/// Split sum over phase-ordered weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSum {
    pub value: f64,
    /// number of weights entering the sum
    pub terms: usize,
    pub warning: Option<String>,
}

/// `sum_m (sum_{i<m} w_i)(sum_{i>m} w_i)` for weights already in order.
pub fn r2_split_weights(weights: &[f64]) -> SplitSum {
    let total: f64 = weights.iter().sum();
    let mut left = 0.0;
    let mut value = 0.0;
    for &w in weights {
        let right = total - left - w;
        value += left * right;
        left += w;
    }
    let warning = (weights.len() < 3).then(|| format!("only {} weights; split sum is empty", weights.len()));
    SplitSum { value, terms: weights.len(), warning }
}

/// Split sum over `(phase, weight)` pairs in any order; only the phase order
/// matters.
pub fn r2_split_pairs(pairs: &[(f64, f64)]) -> SplitSum {
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let weights: Vec<f64> = sorted.iter().map(|p| p.1).collect();
    r2_split_weights(&weights)
}

/// Phase-ordered weights `ln(4 cos^2(phi/2))` of the contracting eigenvalues
/// with `|phi| < 2 pi / 3`.
///
/// On the parabola these are exactly `-ln |lambda|`. The numeric spectrum of a
/// MIXMAX matrix also has one large real eigenvalue at phase 0 that is not on
/// the parabola; the modulus filter keeps it out.
pub fn split_weights(spec: &Spectrum) -> Vec<f64> {
    let edge = 2.0 * PI / 3.0;
    spec.phases()
        .iter()
        .zip(spec.moduli())
        .filter(|(&phi, &m)| phi.abs() < edge && m < 1.0)
        .map(|(&phi, _)| {
            let c = (phi / 2.0).cos();
            (4.0 * c * c).ln()
        })
        .collect()
}

pub fn r2_split(spec: &Spectrum) -> SplitSum {
    r2_split_weights(&split_weights(spec))
}

/// `h + r_2 + ... + r_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct STotal {
    /// natural log of the sum when `log_domain` is set
    pub value: f64,
    pub log_domain: bool,
}

pub fn s_total_from_logs(logs: &[f64]) -> Result<STotal> {
    if logs.is_empty() {
        return Err(Error::NotCSystem);
    }
    let d = logs.len();
    let le = log_elementary_symmetric(logs, d);
    let e = elementary_symmetric(logs, d);
    let h: f64 = logs.iter().sum();
    let mut log_sum = h.ln();
    let mut direct = h;
    for k in 2..=d {
        let r = tuple_value(logs, k, &le, &e);
        log_sum = log_add_exp(log_sum, r.ln());
        direct += if r.log_domain { f64::INFINITY } else { r.value };
    }
    if direct.is_finite() && direct <= LOG_DOMAIN_THRESHOLD {
        Ok(STotal { value: direct, log_domain: false })
    } else {
        Ok(STotal { value: log_sum, log_domain: true })
    }
}

pub fn s_total(spec: &Spectrum, tol: f64) -> Result<STotal> {
    s_total_from_logs(&expanding_moduli_logs(spec, tol)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HqEntry {
    pub q: f64,
    /// `ln_q` of the product of expanding moduli
    pub value: f64,
    /// the nested expansion of the same quantity
    pub expansion: f64,
}

/// What to include in an [`EntropyReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub orders: Vec<usize>,
    pub method: RMethod,
    pub qs: Vec<f64>,
    pub tol: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { orders: vec![2], method: RMethod::Tuple, qs: Vec::new(), tol: DEFAULT_CLASSIFY_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub h: f64,
    pub tau0: f64,
    pub d: usize,
    pub r: Vec<RValue>,
    pub s_total: f64,
    pub s_total_log_domain: bool,
    pub hq: Vec<HqEntry>,
    pub source: SpectrumSource,
}

impl EntropyReport {
    pub fn compute(spec: &Spectrum, opts: &ReportOptions) -> Result<Self> {
        let logs = expanding_moduli_logs(spec, opts.tol)?;
        let h: f64 = logs.iter().sum();
        let mut r = Vec::with_capacity(opts.orders.len());
        for &k in &opts.orders {
            match opts.method {
                RMethod::Tuple => r.push(r_tuple_from_logs(&logs, k)?),
                RMethod::Split => {
                    if k != 2 {
                        return Err(Error::InvalidInput(format!("the split method only defines order 2, got {k}")));
                    }
                    let s = r2_split(spec);
                    r.push(RValue { order: 2, method: RMethod::Split, value: s.value, log_domain: false, warning: s.warning });
                }
            }
        }
        let st = s_total_from_logs(&logs)?;
        let hq = opts
            .qs
            .iter()
            .map(|&q| {
                let v = hq_from_logs(&logs, q);
                HqEntry { q, value: v.lhs, expansion: v.rhs }
            })
            .collect();
        Ok(Self {
            h,
            tau0: relaxation_time(h)?,
            d: logs.len(),
            r,
            s_total: st.value,
            s_total_log_domain: st.log_domain,
            hq,
            source: spec.source(),
        })
    }
}
