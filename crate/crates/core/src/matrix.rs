//! Exact integer evolution matrices.
//!
//! Everything here works over exact integers: entries are `i64`, the
//! determinant is computed with fraction-free elimination over `BigInt`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

/// Which construction produced a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Mixmax { n: usize, s: i64 },
    Cat,
    Rcarry,
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Mixmax { n, s } => write!(f, "mixmax({n},{s})"),
            Family::Cat => f.write_str("cat"),
            Family::Rcarry => f.write_str("rcarry"),
            Family::Custom => f.write_str("custom"),
        }
    }
}

/// Square matrix of exact integers, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerMatrix {
    n: usize,
    entries: Vec<i64>,
    family: Family,
}

/// RCARRY lags: x_n = x_{n-SHORT_LAG} - x_{n-LONG_LAG}.
pub const RCARRY_LONG_LAG: usize = 24;
pub const RCARRY_SHORT_LAG: usize = 10;

impl IntegerMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: row.len() });
            }
            entries.extend(row);
        }
        Ok(Self { n, entries, family: Family::Custom })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Ok(Self { n, entries, family: Family::Custom })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn trace(&self) -> i64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0).count()
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.entries.iter().map(|e| e.abs()).max().unwrap_or(0)
    }

    /// Entries as `f64`, row-major.
    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|&e| e as f64).collect()
    }

    /// Exact product; fails on `i64` overflow.
    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: other.n });
        }
        let n = self.n;
        let mut entries = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let term = a
                        .checked_mul(other.get(k, j))
                        .and_then(|t| t.checked_add(entries[i * n + j]))
                        .ok_or_else(|| Error::InvalidInput("integer overflow in matrix product".into()))?;
                    entries[i * n + j] = term;
                }
            }
        }
        Ok(IntegerMatrix { n, entries, family: Family::Custom })
    }

    /// Block-diagonal matrix `diag(self, other)`.
    pub fn block_diag(&self, other: &IntegerMatrix) -> IntegerMatrix {
        let n = self.n + other.n;
        let mut entries = vec![0; n * n];
        for i in 0..self.n {
            for j in 0..self.n {
                entries[i * n + j] = self.get(i, j);
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                entries[(self.n + i) * n + self.n + j] = other.get(i, j);
            }
        }
        IntegerMatrix { n, entries, family: Family::Custom }
    }

    /// Parses the plain-text matrix format: a line with `N`, then `N` rows of
    /// `N` whitespace-separated integers. Blank lines are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines
            .next()
            .ok_or(Error::Parse { line: 1, msg: "empty matrix file".into() })?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Parse { line: line_no, msg: format!("expected dimension, got {header:?}") })?;
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let (line_no, line) = lines
                .next()
                .ok_or(Error::Parse { line: line_no + rows.len() + 1, msg: "missing matrix row".into() })?;
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i64>()
                        .map_err(|_| Error::Parse { line: line_no, msg: format!("bad integer {tok:?}") })
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(Error::Parse { line: line_no, msg: format!("expected {n} entries, got {}", row.len()) });
            }
            rows.push(row);
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::Parse { line: line_no, msg: "trailing data after matrix".into() });
        }
        Self::from_rows(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl FromStr for IntegerMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

/// The MIXMAX matrix T(N, s).
///
/// Row 1 is all ones. Row `i >= 2` has 1 in column 1, `i` in column 2, the
/// descending run `i-1, ..., 2` in columns `3..=i` and ones to the right.
/// The magic integer `s` is added at (row 3, column 2); for `N = 2` there is
/// no row 3 and `s` is ignored (see [`mixmax_ignores_s`]).
pub fn build_mixmax(n: usize, s: i64) -> Result<IntegerMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let mut entries = vec![1i64; n * n];
    for i in 1..n {
        // 0-based row i is 1-based row i+1
        let row = i as i64 + 1;
        entries[i * n + 1] = row;
        for j in 2..=i {
            entries[i * n + j] = row - j as i64 + 1;
        }
    }
    if n >= 3 {
        entries[2 * n + 1] += s;
    }
    Ok(IntegerMatrix { n, entries, family: Family::Mixmax { n, s } })
}

/// True when `s` has no effect on T(N, s).
pub fn mixmax_ignores_s(n: usize, s: i64) -> bool {
    n < 3 && s != 0
}

pub fn cat_map() -> IntegerMatrix {
    IntegerMatrix { n: 2, entries: vec![1, 1, 1, 2], family: Family::Cat }
}

/// Companion matrix of x_n = x_{n-10} - x_{n-24} acting on the state
/// (x_{n-1}, ..., x_{n-24}).
pub fn rcarry_companion() -> IntegerMatrix {
    let n = RCARRY_LONG_LAG;
    let mut entries = vec![0i64; n * n];
    entries[RCARRY_SHORT_LAG - 1] = 1;
    entries[RCARRY_LONG_LAG - 1] = -1;
    for i in 1..n {
        entries[i * n + i - 1] = 1;
    }
    IntegerMatrix { n, entries, family: Family::Rcarry }
}

/// Exact determinant by Bareiss fraction-free elimination with row pivoting.
pub fn determinant_exact(m: &IntegerMatrix) -> BigInt {
    let n = m.n;
    let mut a: Vec<BigInt> = m.entries.iter().map(|&e| BigInt::from(e)).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            let lead = a[i * n + k].clone();
            for j in k + 1..n {
                // exact division by construction
                let v = (&pivot * &a[i * n + j] - &lead * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
            a[i * n + k] = BigInt::zero();
        }
        prev = pivot;
    }
    sign * &a[n * n - 1]
}

/// Outcome of the hyperbolicity check on a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CConditionReport {
    pub holds: bool,
    pub tol: f64,
    /// min_i ||lambda_i| - 1|
    pub min_distance_to_unit_circle: f64,
    /// ||prod lambda_i| - 1|
    pub determinant_residual: f64,
}

/// Checks that no eigenvalue lies within `tol` of the unit circle and that
/// the eigenvalues multiply to a unimodular number within `tol`.
pub fn verify_c_condition(spec: &Spectrum, tol: f64) -> Result<CConditionReport> {
    if spec.is_empty() {
        return Err(Error::InvalidInput("empty spectrum".into()));
    }
    let min_distance = spec
        .moduli()
        .iter()
        .map(|m| (m - 1.0).abs())
        .fold(f64::INFINITY, f64::min);
    let determinant_residual = (spec.product().norm() - 1.0).abs();
    Ok(CConditionReport {
        holds: min_distance > tol && determinant_residual <= tol,
        tol,
        min_distance_to_unit_circle: min_distance,
        determinant_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cofactor_det(rows: &[Vec<i64>]) -> i128 {
        let n = rows.len();
        if n == 1 {
            return rows[0][0] as i128;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = rows[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * rows[0][j] as i128 * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn mixmax_small_cases() {
        assert_eq!(build_mixmax(2, 0).unwrap().rows(), vec![vec![1, 1], vec![1, 2]]);
        assert_eq!(build_mixmax(3, 1).unwrap().rows(), vec![vec![1, 1, 1], vec![1, 2, 1], vec![1, 4, 2]]);
        assert_eq!(
            build_mixmax(4, 0).unwrap().rows(),
            vec![vec![1, 1, 1, 1], vec![1, 2, 1, 1], vec![1, 3, 2, 1], vec![1, 4, 3, 2]]
        );
        assert!(matches!(build_mixmax(1, 0), Err(Error::InvalidDimension(1))));
        assert!(matches!(build_mixmax(0, 0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn s_is_ignored_for_n2() {
        assert_eq!(build_mixmax(2, 7).unwrap().rows(), cat_map().rows());
        assert!(mixmax_ignores_s(2, 7));
        assert!(!mixmax_ignores_s(2, 0));
        assert!(!mixmax_ignores_s(3, 7));
    }

    #[test]
    fn cat_map_basics() {
        let c = cat_map();
        assert_eq!(c.rows(), vec![vec![1, 1], vec![1, 2]]);
        assert_eq!(determinant_exact(&c), BigInt::from(1));
        assert_eq!(c.trace(), 3);
    }

    #[test]
    fn rcarry_layout() {
        let r = rcarry_companion();
        assert_eq!(r.n(), 24);
        // 23 sub-diagonal shifts plus the two taps in the first row
        let mut expected = 0;
        for i in 0..24 {
            for j in 0..24 {
                let shift = i >= 1 && j == i - 1;
                let tap = i == 0 && (j == 9 || j == 23);
                if shift || tap {
                    expected += 1;
                }
            }
        }
        assert_eq!(r.nonzero_count(), expected);
        assert_eq!(expected, 25);
        assert_eq!(determinant_exact(&r).abs(), BigInt::from(1));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        for n in 2..=6 {
            for s in -5..=5 {
                let m = build_mixmax(n, s).unwrap();
                assert_eq!(determinant_exact(&m), BigInt::from(cofactor_det(&m.rows())), "N={n} s={s}");
            }
        }
        let tricky = IntegerMatrix::from_rows(vec![vec![0, 2, 1], vec![3, 0, 4], vec![1, 5, 0]]).unwrap();
        assert_eq!(determinant_exact(&tricky), BigInt::from(cofactor_det(&tricky.rows())));
        let singular = IntegerMatrix::from_rows(vec![vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(determinant_exact(&singular), BigInt::zero());
    }

    #[test]
    fn mixmax_3_by_hand() {
        // 1*(2*2-1*3) - 1*(1*2-1*1) + 1*(1*3-2*1) = 1 - 1 + 1
        assert_eq!(determinant_exact(&build_mixmax(3, 0).unwrap()), BigInt::from(1));
    }

    #[test]
    fn entries_are_bounded() {
        for n in 2..=40 {
            for s in -5..=5 {
                let m = build_mixmax(n, s).unwrap();
                let bound = (n as i64).max((3 + s).abs());
                assert!(m.max_abs_entry() <= bound, "N={n} s={s}");
            }
        }
    }

    #[test]
    fn recursive_embedding() {
        for n in 2..20 {
            for s in [-3, 0, 2] {
                let small = build_mixmax(n, s).unwrap();
                let big = build_mixmax(n + 1, s).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(small.get(i, j), big.get(i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn text_roundtrip_and_errors() {
        let m = build_mixmax(5, -1).unwrap();
        let back: IntegerMatrix = m.to_text().parse().unwrap();
        assert_eq!(back.rows(), m.rows());
        assert_eq!(back.family(), Family::Custom);

        assert!(matches!(IntegerMatrix::parse_text(""), Err(Error::Parse { .. })));
        assert!(matches!(IntegerMatrix::parse_text("2\n1 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(IntegerMatrix::parse_text("2\n1 1\n1 x\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(IntegerMatrix::parse_text("2\n1 1 1\n1 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(IntegerMatrix::parse_text("2\n1 1\n1 2\n7\n"), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn product_and_block_diag() {
        let c = cat_map();
        let c2 = c.mul(&c).unwrap();
        assert_eq!(c2.rows(), vec![vec![2, 3], vec![3, 5]]);
        let d = c.block_diag(&c);
        assert_eq!(d.n(), 4);
        assert_eq!(determinant_exact(&d), BigInt::from(1));
        assert_eq!(d.get(2, 3), 1);
        assert_eq!(d.get(0, 3), 0);
    }
}
