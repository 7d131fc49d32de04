//! q-logarithm, partition entropies and the q-entropy of a spectrum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

use super::{elementary_symmetric, expanding_moduli_logs};

/// `ln_q x` given `ln x`. Uses `expm1` so that q near 1 stays accurate.
pub fn ln_q_from_log(log_x: f64, q: f64) -> f64 {
    let a = (1.0 - q) * log_x;
    if a == 0.0 {
        log_x
    } else {
        log_x * (a.exp_m1() / a)
    }
}

/// `(x^(1-q) - 1) / (1 - q)`, and `ln x` at q = 1.
pub fn ln_q(x: f64, q: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_q needs a positive finite argument, got {x}")));
    }
    Ok(ln_q_from_log(x.ln(), q))
}

/// Cell measures of a finite partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    measures: Vec<f64>,
}

/// Allowed deviation of the total measure from 1.
pub const PARTITION_SUM_TOL: f64 = 1e-12;

impl Partition {
    pub fn new(measures: Vec<f64>) -> Result<Self> {
        if measures.is_empty() {
            return Err(Error::InvalidInput("partition has no cells".into()));
        }
        if let Some(m) = measures.iter().find(|m| !(**m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidInput(format!("negative or non-finite cell measure {m}")));
        }
        let total: f64 = measures.iter().sum();
        if (total - 1.0).abs() > PARTITION_SUM_TOL {
            return Err(Error::InvalidInput(format!("cell measures sum to {total}, not 1")));
        }
        Ok(Self { measures })
    }

    /// Normalizes nonnegative counts into a partition.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidInput("all counts are zero".into()));
        }
        let t = total as f64;
        Ok(Self { measures: counts.iter().map(|&c| c as f64 / t).collect() })
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }
}

/// `-sum mu ln mu` with `0 ln 0 = 0`.
pub fn partition_entropy(p: &Partition) -> f64 {
    p.measures.iter().filter(|&&m| m > 0.0).map(|&m| -m * m.ln()).sum()
}

/// The two equivalent forms of the Tsallis entropy of a partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsallisValue {
    /// `(1 - sum p^q) / (q - 1)`, or the Shannon form at q = 1
    pub power_form: f64,
    /// `sum p ln_q(1/p)`
    pub log_form: f64,
}

/// Empty cells are skipped in both forms, which keeps q <= 0 finite.
pub fn tsallis_partition_entropy(p: &Partition, q: f64) -> TsallisValue {
    let cells = || p.measures.iter().copied().filter(|&m| m > 0.0);
    let log_form: f64 = cells().map(|m| m * ln_q_from_log(-m.ln(), q)).sum();
    let power_form = if q == 1.0 {
        partition_entropy(p)
    } else {
        (1.0 - cells().map(|m| m.powf(q)).sum::<f64>()) / (q - 1.0)
    };
    TsallisValue { power_form, log_form }
}

/// Both sides of the q-entropy expansion of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HqValue {
    pub q: f64,
    /// `ln_q` of the product of expanding moduli
    pub lhs: f64,
    /// `sum_k (1-q)^(k-1) e_k(ln_q |lambda_1|, ..., ln_q |lambda_d|)`
    pub rhs: f64,
}

/// q-entropy of a spectrum, directly and through the nested expansion.
///
/// The expansion runs over unordered index sets: the k-th term is
/// `(1-q)^(k-1)` times the elementary symmetric polynomial of the
/// `ln_q |lambda|`. Only that normalization reproduces `ln_q` of the
/// product, since `prod (1 + (1-q) ln_q x_i) = prod x_i^(1-q)`.
pub fn hq_spectrum(spec: &Spectrum, q: f64, tol: f64) -> Result<HqValue> {
    let logs = expanding_moduli_logs(spec, tol)?;
    Ok(hq_from_logs(&logs, q))
}

/// [`hq_spectrum`] on explicit `ln |lambda|` values of the expanding part.
pub fn hq_from_logs(logs: &[f64], q: f64) -> HqValue {
    let total: f64 = logs.iter().sum();
    let lhs = ln_q_from_log(total, q);
    let lnq: Vec<f64> = logs.iter().map(|&l| ln_q_from_log(l, q)).collect();
    let e = elementary_symmetric(&lnq, lnq.len());
    let a = 1.0 - q;
    let mut rhs = 0.0;
    let mut scale = 1.0;
    for ek in e.iter().skip(1) {
        rhs += scale * ek;
        scale *= a;
    }
    HqValue { q, lhs, rhs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_q_basics() {
        for x in [0.1, 1.0, 2.5, 1e6] {
            assert_eq!(ln_q(x, 1.0).unwrap(), x.ln());
        }
        for q in [-1.0, 0.0, 0.5, 2.0, 3.0] {
            assert_eq!(ln_q(1.0, q).unwrap(), 0.0);
        }
        assert!((ln_q(4.0, 0.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((ln_q(4.0, 2.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(ln_q(0.0, 0.5).is_err());
        assert!(ln_q(-1.0, 0.5).is_err());
    }

    #[test]
    fn ln_q_continuous_at_one() {
        let x: f64 = 7.0;
        for eps in [1e-6, 1e-9, 1e-12] {
            assert!((ln_q(x, 1.0 + eps).unwrap() - x.ln()).abs() < 1e-5);
        }
    }

    #[test]
    fn tsallis_examples() {
        let half = Partition::new(vec![0.5, 0.5]).unwrap();
        let t = tsallis_partition_entropy(&half, 1.0);
        assert!((t.power_form - 2f64.ln()).abs() < 1e-15);
        assert!((t.log_form - 2f64.ln()).abs() < 1e-15);

        let one = Partition::new(vec![1.0]).unwrap();
        for q in [0.0, 0.5, 2.0] {
            let t = tsallis_partition_entropy(&one, q);
            assert_eq!(t.power_form, 0.0);
            assert_eq!(t.log_form, 0.0);
        }

        let quarter = Partition::new(vec![0.25; 4]).unwrap();
        let t = tsallis_partition_entropy(&quarter, 2.0);
        assert!((t.power_form - 0.75).abs() < 1e-15);
        assert!((t.log_form - 0.75).abs() < 1e-15);
    }

    #[test]
    fn partition_entropy_examples() {
        assert_eq!(partition_entropy(&Partition::new(vec![1.0]).unwrap()), 0.0);
        assert!((partition_entropy(&Partition::new(vec![0.5, 0.5]).unwrap()) - 2f64.ln()).abs() < 1e-15);
        let v = partition_entropy(&Partition::new(vec![0.1, 0.9]).unwrap());
        assert!((v - 0.325_082_973_391_448_2).abs() < 1e-12);
        assert_eq!(partition_entropy(&Partition::new(vec![0.0, 1.0]).unwrap()), 0.0);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![0.5, 0.6]).is_err());
        assert!(Partition::new(vec![-0.1, 1.1]).is_err());
        assert!(Partition::from_counts(&[0, 0]).is_err());
        assert_eq!(Partition::from_counts(&[1, 3]).unwrap().measures(), &[0.25, 0.75]);
    }

    #[test]
    fn hq_two_equal_moduli() {
        // moduli (e, e)
        let q = 0.5;
        let v = hq_from_logs(&[1.0, 1.0], q);
        let l = ln_q(std::f64::consts::E, q).unwrap();
        let want_lhs = ln_q(std::f64::consts::E.powi(2), q).unwrap();
        assert!((v.lhs - want_lhs).abs() < 1e-12);
        assert!((v.rhs - (2.0 * l + (1.0 - q) * l * l)).abs() < 1e-12);
        assert!((v.lhs - v.rhs).abs() < 1e-12);
    }

    #[test]
    fn hq_at_q_one_is_entropy() {
        let logs = [0.3, 1.2, 2.0];
        let v = hq_from_logs(&logs, 1.0);
        assert!((v.lhs - 3.5).abs() < 1e-15);
        assert!((v.rhs - 3.5).abs() < 1e-15);
    }
}
