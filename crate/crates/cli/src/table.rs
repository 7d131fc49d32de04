//! Table of entropies for a list of MIXMAX dimensions.

use anosovlab::asymptotics::predict;
use anosovlab::entropy::{self, r2_split, r_tuple, DEFAULT_CLASSIFY_TOL};
use anosovlab::matrix::{build_mixmax, mixmax_ignores_s};
use anosovlab::spectrum::{
    eigenvalues_mixmax_analytic, eigenvalues_numeric, FITTED_CONVENTION, MAX_DENSE_DIM, SOLVER_REL_TOL,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, Stage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub s: i64,
    /// `numeric` or `analytic`
    pub spectrum: String,
    /// index convention of the analytic spectrum, empty for numeric rows
    pub convention: String,
    /// set when `s` has no influence on the row
    pub s_ignored: bool,
    pub h: f64,
    pub d: usize,
    pub r2_split: f64,
    pub r2_tuple: f64,
    pub r2_tuple_log_domain: bool,
    /// integral scaling estimates at this N
    pub h_scaling: f64,
    pub r2_scaling: f64,
}

/// Parses `N:s` pairs such as `256:-1`.
pub fn parse_rows(items: &[String]) -> CliResult<Vec<(usize, i64)>> {
    items
        .iter()
        .map(|item| {
            let (n, s) = item.split_once(':').ok_or_else(|| CliError::invalid(format!("row {item:?} is not N:s")))?;
            let n = n.trim().parse().map_err(|_| CliError::invalid(format!("bad N in {item:?}")))?;
            let s = s.trim().parse().map_err(|_| CliError::invalid(format!("bad s in {item:?}")))?;
            Ok((n, s))
        })
        .collect()
}

/// Numeric spectra up to the dense solver capacity, the analytic formula
/// above it.
pub fn cmd_table(rows: &[(usize, i64)]) -> CliResult<Vec<TableRow>> {
    rows.iter().map(|&(n, s)| table_row(n, s)).collect()
}

fn table_row(n: usize, s: i64) -> CliResult<TableRow> {
    let numeric = n <= MAX_DENSE_DIM;
    let spec = if numeric {
        eigenvalues_numeric(&build_mixmax(n, s).stage("matrix")?, SOLVER_REL_TOL).stage("spectrum")?
    } else {
        eigenvalues_mixmax_analytic(n, FITTED_CONVENTION).stage("spectrum")?
    };
    let h = entropy::entropy(&spec, DEFAULT_CLASSIFY_TOL).stage("entropy")?;
    let d = spec.classify(DEFAULT_CLASSIFY_TOL).stage("entropy")?.d();
    let tuple = r_tuple(&spec, 2, DEFAULT_CLASSIFY_TOL).stage("entropy")?;
    let p = predict(n as f64).stage("asymptotics")?;
    Ok(TableRow {
        n,
        s,
        spectrum: if numeric { "numeric" } else { "analytic" }.into(),
        convention: if numeric { String::new() } else { FITTED_CONVENTION.name().into() },
        // the analytic formula has no s
        s_ignored: !numeric || mixmax_ignores_s(n, s),
        h,
        d,
        r2_split: r2_split(&spec).value,
        r2_tuple: tuple.value,
        r2_tuple_log_domain: tuple.log_domain,
        h_scaling: p.h,
        r2_scaling: p.r2,
    })
}

pub fn table_csv(rows: &[TableRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_row() {
        let r = &cmd_table(&[(2, 0)]).unwrap()[0];
        assert!((r.h - 0.962_423_650_1).abs() < 1e-9);
        assert_eq!(r.r2_split, 0.0);
        assert_eq!(r.r2_tuple, 0.0);
        assert_eq!(r.spectrum, "numeric");
    }

    #[test]
    fn parse() {
        assert_eq!(parse_rows(&["256:-1".into(), "7307:0".into()]).unwrap(), vec![(256, -1), (7307, 0)]);
        assert!(parse_rows(&["256".into()]).is_err());
    }

    #[test]
    fn analytic_above_capacity() {
        let r = &cmd_table(&[(7307, 0)]).unwrap()[0];
        assert_eq!(r.spectrum, "analytic");
        assert!(r.s_ignored);
        assert!((r.h / 4676.5 - 1.0).abs() < 0.02);
        let csv = table_csv(&[r.clone()]).unwrap();
        assert!(csv.starts_with("n,s,spectrum,convention"));
    }
}
