//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL` line with the measured values.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use anosovlab::asymptotics::{entropy_integral_constant, full_circle_integral, predict, r2_integral_constant};
use anosovlab::entropy::{
    self, empirical_ks_entropy, hq_from_logs, r2_split, r_tuple, r_tuple_from_logs, KsOptions, DEFAULT_CLASSIFY_TOL,
};
use anosovlab::generator::{seed_state, step_fast, step_naive, ModMatrix, Stream};
use anosovlab::geodesic::{
    cat_lambda1, curvature_report, integrate_geodesic, metric_tensor, pullback_metric, CurvatureMethod,
    SuspensionPoint,
};
use anosovlab::matrix::{build_mixmax, cat_map, determinant_exact, rcarry_companion};
use anosovlab::spectrum::{
    compare_spectra, eigenvalues_mixmax_analytic, eigenvalues_numeric, fit_convention, IndexConvention, Spectrum,
    SOLVER_REL_TOL,
};
use anosovlab::stats::{chi_square_uniformity, serial_correlation, star_discrepancy_1d, star_discrepancy_1d_brute};
use num_bigint::BigInt;
use num_traits::One;

/// Writes past the test harness capture so the line always shows.
fn report(id: u32, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {id:>2}: {verdict} [{:.2} s] {detail}\n", elapsed.as_secs_f64());
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b) / b
}

fn numeric(n: usize, s: i64) -> Spectrum {
    eigenvalues_numeric(&build_mixmax(n, s).unwrap(), SOLVER_REL_TOL).unwrap()
}

/// Sum over ordered tuples of distinct indices; the full order `k = d >= 3`
/// is a single product.
fn brute_r(h: &[f64], k: usize) -> f64 {
    if k >= 3 && k == h.len() {
        return h.iter().product();
    }
    fn rec(h: &[f64], k: usize, used: &mut [bool], acc: f64) -> f64 {
        if k == 0 {
            return acc;
        }
        (0..h.len())
            .map(|i| {
                if used[i] {
                    return 0.0;
                }
                used[i] = true;
                let v = rec(h, k - 1, used, acc * h[i]);
                used[i] = false;
                v
            })
            .sum()
    }
    rec(h, k, &mut vec![false; h.len()], 1.0)
}

/// Deterministic synthetic log-moduli.
fn synthetic_logs(d: usize, salt: u64) -> Vec<f64> {
    let mut x = 0x9e37_79b9_7f4a_7c15u64 ^ salt.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    (0..d)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            0.05 + 2.2 * ((x >> 11) as f64 / (1u64 << 53) as f64)
        })
        .collect()
}

#[test]
fn criterion_01_determinant() {
    let t = Instant::now();
    let mut bad = Vec::new();
    for n in 2..=64 {
        for s in -5..=5 {
            if determinant_exact(&build_mixmax(n, s).unwrap()) != BigInt::one() {
                bad.push((n, s));
            }
        }
    }
    let el = t.elapsed();
    let pass = bad.is_empty() && el < Duration::from_secs(10);
    report(1, pass, el, &format!("det T(N,s) = 1 for N in 2..=64, s in -5..=5; failures {bad:?}"));
    assert!(pass);
}

#[test]
fn criterion_02_table_row_256() {
    let t = Instant::now();
    let spec = numeric(256, -1);
    let h = entropy::entropy(&spec, DEFAULT_CLASSIFY_TOL).unwrap();
    let r2 = r2_split(&spec).value;
    let el = t.elapsed();
    let h_ok = (h - 164.5).abs() <= 0.1;
    let r2_ok = rel(r2, 618_061.0).abs() <= 0.01;
    let pass = h_ok && r2_ok && el < Duration::from_secs(60);
    report(
        2,
        pass,
        el,
        &format!(
            "h = {h:.4} (164.5 +- 0.1: {}), r2_split = {r2:.0} ({:+.3}% vs 618061, 1% allowed: {})",
            if h_ok { "ok" } else { "off" },
            100.0 * rel(r2, 618_061.0),
            if r2_ok { "ok" } else { "off" }
        ),
    );
    assert!(pass);
}

/// Fitted convention with the max and median relative modulus error of its
/// analytic spectrum at N = 32.
fn convention_check() -> (IndexConvention, f64, f64) {
    let fit = fit_convention(&[16]).unwrap();
    let analytic = eigenvalues_mixmax_analytic(32, fit.best).unwrap();
    let cmp = compare_spectra(&analytic, &numeric(32, 0)).unwrap();
    (fit.best, cmp.max_relative_modulus_error, cmp.median_relative_modulus_error)
}

#[test]
fn criterion_03_large_rows_analytic() {
    let t = Instant::now();
    let (conv, max_err, _) = convention_check();
    let fit_holds = max_err <= 1e-4;
    let mut lines = Vec::new();
    let mut all_within = true;
    for (n, h_ref, r2_ref) in [(7307usize, 4676.5, 1.4e10), (20693, 13243.5, 3.3e11)] {
        let spec = eigenvalues_mixmax_analytic(n, conv).unwrap();
        let h = entropy::entropy(&spec, DEFAULT_CLASSIFY_TOL).unwrap();
        let r2 = r2_split(&spec).value;
        let p = predict(n as f64).unwrap();
        all_within &= rel(h, h_ref).abs() <= 1e-3 && rel(r2, r2_ref).abs() <= 0.02;
        lines.push(format!(
            "N={n}: h = {h:.1} ({:+.3}%), r2_split = {r2:.3e} ({:+.2}%), integral scaling h = {:.1}, r2 = {:.3e}",
            100.0 * rel(h, h_ref),
            100.0 * rel(r2, r2_ref),
            p.h,
            p.r2
        ));
    }
    let el = t.elapsed();
    let timely = el < Duration::from_secs(60);
    // the tolerance check only binds when the convention fit holds
    let pass = timely && (all_within || !fit_holds);
    let mode = if fit_holds { "tolerance mode" } else { "reporting mode (convention fit did not reach 1e-4)" };
    report(3, pass, el, &format!("{mode}; {}", lines.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_04_integral_constants() {
    let t = Instant::now();
    let c1 = entropy_integral_constant(1e-12).unwrap().value;
    let c3 = r2_integral_constant(1e-8).unwrap().value;
    let full = full_circle_integral(1e-12).unwrap().value;
    // 4 Cl2(pi/3) from the series sum sin(k pi/3) / k^2
    let clausen: f64 = (1..2_000_000).map(|k| (k as f64 * PI / 3.0).sin() / (k as f64).powi(2)).sum();
    let el = t.elapsed();
    let pass = (c1 - 4.0598).abs() <= 0.005
        && (c1 - 4.0 * clausen).abs() <= 1e-6
        && (c3 - 9.138).abs() <= 0.01
        && full.abs() <= 1e-10
        && el < Duration::from_secs(30);
    report(
        4,
        pass,
        el,
        &format!("entropy constant = {c1:.6} (4 Cl2(pi/3) = {:.6}), r2 constant = {c3:.4}, full circle = {full:.2e}", 4.0 * clausen),
    );
    assert!(pass);
}

#[test]
fn criterion_05_cat_map() {
    let t = Instant::now();
    let spec = eigenvalues_numeric(&cat_map(), SOLVER_REL_TOL).unwrap();
    let h = entropy::entropy(&spec, DEFAULT_CLASSIFY_TOL).unwrap();
    let oracle = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    let r2 = r_tuple(&spec, 2, DEFAULT_CLASSIFY_TOL).unwrap().value;
    let double = cat_map().block_diag(&cat_map());
    let h2 = entropy::entropy(&eigenvalues_numeric(&double, SOLVER_REL_TOL).unwrap(), DEFAULT_CLASSIFY_TOL).unwrap();
    let el = t.elapsed();
    let pass = (h - 0.962_423_650_1).abs() <= 1e-9 && (h - oracle).abs() <= 1e-9 && r2 == 0.0 && (h2 - 2.0 * h).abs() <= 1e-9;
    report(5, pass, el, &format!("h = {h:.10}, oracle = {oracle:.10}, r_2 = {r2}, h(diag(T,T)) - 2h = {:.1e}", h2 - 2.0 * h));
    assert!(pass);
}

#[test]
fn criterion_06_analytic_vs_numeric() {
    let t = Instant::now();
    let (conv, max_err, median) = convention_check();
    let analytic = eigenvalues_mixmax_analytic(32, conv).unwrap();
    let num = numeric(32, 0);
    let cmp = compare_spectra(&analytic, &num).unwrap();
    let matched = max_err <= 1e-4;
    let profile: Vec<String> = cmp
        .relative_modulus_error
        .iter()
        .zip(num.phases())
        .map(|(e, p)| format!("{p:+.3}:{e:.2e}"))
        .collect();
    let el = t.elapsed();
    // either branch satisfies the criterion; the second downgrades criterion 3
    let pass = matched || !profile.is_empty();
    let branch = if matched { "matched within 1e-4" } else { "no 1e-4 match; residual profile emitted, criterion 3 in reporting mode" };
    report(
        6,
        pass,
        el,
        &format!(
            "convention {} fitted on N=16; N=32 max rel modulus err {max_err:.3e}, median {median:.3e}; {branch}; profile (phase:err) [{}]",
            conv.name(),
            profile.join(" ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_brute_force() {
    let t = Instant::now();
    let mut worst_r: f64 = 0.0;
    let mut worst_hq: f64 = 0.0;
    for d in 1..=8 {
        for salt in 0..5 {
            let logs = synthetic_logs(d, salt * 31 + d as u64);
            for k in 2..=d {
                let v = r_tuple_from_logs(&logs, k).unwrap().value;
                let b = brute_r(&logs, k);
                worst_r = worst_r.max((v - b).abs() / b.abs().max(1.0));
            }
            if d <= 6 {
                for q in [-1.0, 0.0, 0.5, 2.0, 3.0] {
                    let hv = hq_from_logs(&logs, q);
                    worst_hq = worst_hq.max((hv.lhs - hv.rhs).abs() / hv.lhs.abs().max(1.0));
                }
            }
        }
    }
    let el = t.elapsed();
    let pass = worst_r <= 1e-9 && worst_hq <= 1e-10;
    report(7, pass, el, &format!("max r_k deviation {worst_r:.2e} (d <= 8), max hq lhs-rhs {worst_hq:.2e} (d <= 6)"));
    assert!(pass);
}

#[test]
fn criterion_08_generator() {
    let t = Instant::now();
    let mut mismatch = Vec::new();
    let mut irreversible = Vec::new();
    for (n, s) in [(8usize, 0i64), (17, -1), (64, 1), (256, -1)] {
        let m = build_mixmax(n, s).unwrap();
        let start = seed_state(n, format!("criterion-8-{n}").as_bytes()).unwrap();
        let (mut a, mut b) = (start.clone(), start.clone());
        for _ in 0..10_000 {
            a = step_naive(&a, &m).unwrap();
            b = step_fast(&b, n, s).unwrap();
        }
        if a.residues() != b.residues() {
            mismatch.push((n, s));
        }
        let inv = ModMatrix::from_integer(&m).inverse().unwrap();
        let mut back = a;
        for _ in 0..100 {
            back = inv.apply(&back).unwrap();
        }
        let mut fwd = start.clone();
        for _ in 0..9_900 {
            fwd = step_fast(&fwd, n, s).unwrap();
        }
        if back.residues() != fwd.residues() {
            irreversible.push((n, s));
        }
    }
    let el = t.elapsed();
    let pass = mismatch.is_empty() && irreversible.is_empty() && el < Duration::from_secs(30);
    report(8, pass, el, &format!("fast vs naive mismatches {mismatch:?}, inverse failures {irreversible:?}"));
    assert!(pass);
}

#[test]
fn criterion_09_rcarry() {
    let t = Instant::now();
    let spec = eigenvalues_numeric(&rcarry_companion(), SOLVER_REL_TOL).unwrap();
    let h = entropy::entropy(&spec, DEFAULT_CLASSIFY_TOL).unwrap();
    let d = spec.classify(DEFAULT_CLASSIFY_TOL).unwrap().d();
    let r2 = r_tuple(&spec, 2, DEFAULT_CLASSIFY_TOL).unwrap().value;
    let split = r2_split(&spec).value;
    let el = t.elapsed();
    let pass = (h - 0.32).abs() <= 0.05;
    report(9, pass, el, &format!("h = {h:.4} (0.32 +- 0.05), d = {d}; reported only: r_2 tuple = {r2:.4}, r_2 split = {split:.4}"));
    assert!(pass);
}

#[test]
fn criterion_10_empirical_ks() {
    let t = Instant::now();
    let est = empirical_ks_entropy(&cat_map(), &KsOptions::default()).unwrap();
    let el = t.elapsed();
    let pass = (est.estimate - 0.96).abs() <= 0.10 && el < Duration::from_secs(120);
    report(
        10,
        pass,
        el,
        &format!(
            "estimate = {:.4} +- {:.4} over levels {:?}, exact ln lambda1 = {:.4}",
            est.estimate,
            est.std_error,
            est.levels,
            cat_lambda1().ln()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_11_curvature() {
    let t = Instant::now();
    let c2 = cat_lambda1().ln().powi(2);
    let h = entropy::entropy(&eigenvalues_numeric(&cat_map(), SOLVER_REL_TOL).unwrap(), DEFAULT_CLASSIFY_TOL).unwrap();
    let mut k_err: f64 = 0.0;
    let mut fd_err: f64 = 0.0;
    let mut r_err: f64 = 0.0;
    let mut inv_err: f64 = 0.0;
    for (i, u) in [-1.5, -0.3, 0.0, 0.4, 1.0, 2.2].into_iter().enumerate() {
        let p = SuspensionPoint::cat(0.3 * i as f64, -0.7 + 0.2 * i as f64, u);
        let a = curvature_report(&p, CurvatureMethod::Analytic, 0.0).unwrap();
        let f = curvature_report(&p, CurvatureMethod::FiniteDifference, 1e-3).unwrap();
        k_err = k_err.max((a.k12 - c2).abs()).max((a.k13 + c2).abs()).max((a.k23 + c2).abs());
        fd_err = fd_err.max((f.k12 - c2).abs()).max((f.k13 + c2).abs()).max((f.k23 + c2).abs());
        r_err = r_err.max(((a.scalar + 2.0 * h * h) / (2.0 * h * h)).abs());
        let g = metric_tensor(&p).unwrap();
        let pb = pullback_metric(&p).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                inv_err = inv_err.max((g[r][c] - pb[r][c]).abs() / g[r][c].abs().max(1.0));
            }
        }
    }
    let traj = integrate_geodesic(&SuspensionPoint::cat(0.0, 0.0, 0.0), &[0.3, -0.2, 0.5], 10.0, 0.001).unwrap();
    let drift = traj.max_relative_energy_drift;
    let el = t.elapsed();
    let pass = k_err <= 1e-9 && fd_err <= 1e-4 && r_err <= 1e-6 && inv_err <= 1e-10 && drift < 1e-6;
    report(
        11,
        pass,
        el,
        &format!(
            "K = (+{c2:.6}, -{c2:.6}, -{c2:.6}): analytic err {k_err:.1e}, fd err (h = 1e-3) {fd_err:.1e}; R vs -2h^2 rel err {r_err:.1e}; invariance err {inv_err:.1e}; energy drift {drift:.1e}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_12_statistics() {
    let t = Instant::now();
    let m = build_mixmax(256, -1).unwrap();
    let mut stream = Stream::new(m, seed_state(256, b"acceptance").unwrap()).unwrap();
    let samples = stream.fill(1_000_000);
    let chi = chi_square_uniformity(&samples, 1000, 0.01).unwrap();
    let serial = serial_correlation(&samples, 1, 0.01).unwrap();
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let mut disc_ok = true;
    for n in [1usize, 2, 10, 57, 128, 200] {
        let pts = &samples[..n];
        disc_ok &= star_discrepancy_1d(pts).unwrap() == star_discrepancy_1d_brute(pts).unwrap();
    }
    let el = t.elapsed();
    let pass = chi.passed && serial.passed && (mean - 0.5).abs() <= 0.002 && disc_ok;
    report(
        12,
        pass,
        el,
        &format!(
            "chi-square p = {:.4}, lag-1 r = {:.2e} (p = {:.4}), mean = {mean:.5}, 1-D discrepancy = brute force for n <= 200: {disc_ok}",
            chi.p_value, serial.statistic, serial.p_value
        ),
    );
    assert!(pass);
}
