//! Geometry of the suspension manifold of the cat map.
//!
//! Coordinates are `(w1, w2, u)`. With `theta_k = lambda_k dw1 + (1 - lambda_k) dw2`
//! the metric is
//!
//! ```text
//! ds^2 = lambda_1^(2u) theta_1^2 + lambda_2^(2u) theta_2^2 + du^2
//! ```
//!
//! It depends on `u` only, so every curvature quantity follows from `g`,
//! `dg/du` and `d2g/du2`. Those come either in closed form or from central
//! differences of `g`, and feed a single curvature routine.
//!
//! Index conventions: `Gamma[r][m][n] = Gamma^r_{mn}`,
//! `R^r_{smn} = d_m Gamma^r_{ns} - d_n Gamma^r_{ms} + Gamma^r_{ml} Gamma^l_{ns} - Gamma^r_{nl} Gamma^l_{ms}`,
//! and `K(X, Y) = R_{abcd} X^a Y^b X^c Y^d / (|X|^2 |Y|^2 - <X, Y>^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat3 = [[f64; 3]; 3];
pub type Vec3 = [f64; 3];
type Gamma = [[[f64; 3]; 3]; 3];

/// Index of the fiber coordinate.
const U: usize = 2;

/// Expanding eigenvalue of the cat map, `(3 + sqrt 5) / 2`.
pub fn cat_lambda1() -> f64 {
    (3.0 + 5f64.sqrt()) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuspensionPoint {
    pub w1: f64,
    pub w2: f64,
    pub u: f64,
    /// expanding eigenvalue; the contracting one is its reciprocal
    pub lambda1: f64,
}

impl SuspensionPoint {
    pub fn new(w1: f64, w2: f64, u: f64, lambda1: f64) -> Result<Self> {
        if !(lambda1 > 1.0) || !lambda1.is_finite() {
            return Err(Error::Domain(format!("lambda1 must exceed 1, got {lambda1}")));
        }
        Ok(Self { w1, w2, u, lambda1 })
    }

    /// Point of the cat-map suspension.
    pub fn cat(w1: f64, w2: f64, u: f64) -> Self {
        Self { w1, w2, u, lambda1: cat_lambda1() }
    }

    pub fn lambda2(&self) -> f64 {
        1.0 / self.lambda1
    }

    fn at_u(&self, u: f64) -> Self {
        Self { u, ..*self }
    }
}

/// `g`, `dg/du`, `d2g/du2` at one value of `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricJet {
    pub g: Mat3,
    pub dg: Mat3,
    pub ddg: Mat3,
}

/// Coefficients of `theta_k` in `(dw1, dw2)`.
fn theta(lambda: f64) -> [f64; 2] {
    [lambda, 1.0 - lambda]
}

/// Sum over k of `lambda_k^(2u) (2 ln lambda_k)^order theta_k theta_k^T`.
fn metric_derivative(pt: &SuspensionPoint, order: i32) -> Mat3 {
    let mut g = [[0.0; 3]; 3];
    for lambda in [pt.lambda1, pt.lambda2()] {
        let t = theta(lambda);
        let scale = lambda.powf(2.0 * pt.u) * (2.0 * lambda.ln()).powi(order);
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] += scale * t[i] * t[j];
            }
        }
    }
    if order == 0 {
        g[U][U] = 1.0;
    }
    g
}

pub fn metric_tensor(pt: &SuspensionPoint) -> Result<Mat3> {
    SuspensionPoint::new(pt.w1, pt.w2, pt.u, pt.lambda1)?;
    Ok(metric_derivative(pt, 0))
}

/// Closed-form jet.
pub fn analytic_jet(pt: &SuspensionPoint) -> MetricJet {
    MetricJet { g: metric_derivative(pt, 0), dg: metric_derivative(pt, 1), ddg: metric_derivative(pt, 2) }
}

/// Jet from central differences of the metric with step `h`.
pub fn finite_difference_jet(pt: &SuspensionPoint, h: f64) -> MetricJet {
    let g0 = metric_derivative(pt, 0);
    let gp = metric_derivative(&pt.at_u(pt.u + h), 0);
    let gm = metric_derivative(&pt.at_u(pt.u - h), 0);
    let mut dg = [[0.0; 3]; 3];
    let mut ddg = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            dg[i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
            ddg[i][j] = (gp[i][j] - 2.0 * g0[i][j] + gm[i][j]) / (h * h);
        }
    }
    MetricJet { g: g0, dg, ddg }
}

pub fn inverse3(m: &Mat3) -> Result<Mat3> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-300 {
        return Err(Error::Domain("metric is singular".into()));
    }
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, d) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
        }
    }
    Ok(inv)
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// `Gamma^r_{mn}` for a metric depending on `u` only, given `g^-1` and `dg`.
fn christoffel_from(ginv: &Mat3, dg: &Mat3) -> Gamma {
    let mut gamma = [[[0.0; 3]; 3]; 3];
    // lowered: Gamma_{s m n} = (d_m g_{sn} + d_n g_{sm} - d_s g_{mn}) / 2
    let d = |m: usize, s: usize, n: usize| if m == U { dg[s][n] } else { 0.0 };
    for r in 0..3 {
        for m in 0..3 {
            for n in 0..3 {
                gamma[r][m][n] =
                    (0..3).map(|s| 0.5 * ginv[r][s] * (d(m, s, n) + d(n, s, m) - d(s, m, n))).sum();
            }
        }
    }
    gamma
}

pub fn christoffel(jet: &MetricJet) -> Result<Gamma> {
    Ok(christoffel_from(&inverse3(&jet.g)?, &jet.dg))
}

/// Fully covariant Riemann tensor `R_{a s m n}`.
pub fn riemann_lower(jet: &MetricJet) -> Result<[[[[f64; 3]; 3]; 3]; 3]> {
    let ginv = inverse3(&jet.g)?;
    let gamma = christoffel_from(&ginv, &jet.dg);
    // d/du of g^-1 is -g^-1 g' g^-1, and d/du Gamma follows by the product rule
    let dginv = {
        let t = mat_mul(&mat_mul(&ginv, &jet.dg), &ginv);
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = -t[i][j];
            }
        }
        out
    };
    let mut dgamma = [[[0.0; 3]; 3]; 3];
    {
        let d1 = |m: usize, s: usize, n: usize| if m == U { jet.dg[s][n] } else { 0.0 };
        let d2 = |m: usize, s: usize, n: usize| if m == U { jet.ddg[s][n] } else { 0.0 };
        for r in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    dgamma[r][m][n] = (0..3)
                        .map(|s| {
                            0.5 * dginv[r][s] * (d1(m, s, n) + d1(n, s, m) - d1(s, m, n))
                                + 0.5 * ginv[r][s] * (d2(m, s, n) + d2(n, s, m) - d2(s, m, n))
                        })
                        .sum();
                }
            }
        }
    }
    let dgam = |mu: usize, r: usize, a: usize, b: usize| if mu == U { dgamma[r][a][b] } else { 0.0 };
    let mut upper = [[[[0.0; 3]; 3]; 3]; 3];
    for r in 0..3 {
        for s in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    let mut v = dgam(m, r, n, s) - dgam(n, r, m, s);
                    for l in 0..3 {
                        v += gamma[r][m][l] * gamma[l][n][s] - gamma[r][n][l] * gamma[l][m][s];
                    }
                    upper[r][s][m][n] = v;
                }
            }
        }
    }
    let mut lower = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for s in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    lower[a][s][m][n] = (0..3).map(|r| jet.g[a][r] * upper[r][s][m][n]).sum();
                }
            }
        }
    }
    Ok(lower)
}

fn inner(g: &Mat3, x: &Vec3, y: &Vec3) -> f64 {
    (0..3).map(|i| (0..3).map(|j| g[i][j] * x[i] * y[j]).sum::<f64>()).sum()
}

/// Sectional curvature of the plane spanned by `x` and `y`.
pub fn sectional_curvature(jet: &MetricJet, x: &Vec3, y: &Vec3, labels: (usize, usize)) -> Result<f64> {
    let r = riemann_lower(jet)?;
    sectional_from(&r, &jet.g, x, y, labels)
}

fn sectional_from(r: &[[[[f64; 3]; 3]; 3]; 3], g: &Mat3, x: &Vec3, y: &Vec3, labels: (usize, usize)) -> Result<f64> {
    let xx = inner(g, x, x);
    let yy = inner(g, y, y);
    let xy = inner(g, x, y);
    let area = xx * yy - xy * xy;
    if !(area > 1e-14 * xx * yy) {
        return Err(Error::DegenerateFrame { i: labels.0, j: labels.1, area });
    }
    let mut num = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    num += r[a][b][c][d] * x[a] * y[b] * x[c] * y[d];
                }
            }
        }
    }
    Ok(num / area)
}

/// `e1 = (lambda1 - 1, lambda1, 0)`, `e2 = (lambda2 - 1, lambda2, 0)`, `e3 = (0, 0, 1)`.
pub fn frame(pt: &SuspensionPoint) -> [Vec3; 3] {
    let (l1, l2) = (pt.lambda1, pt.lambda2());
    [[l1 - 1.0, l1, 0.0], [l2 - 1.0, l2, 0.0], [0.0, 0.0, 1.0]]
}

/// Squared metric lengths of the frame vectors.
pub fn frame_lengths(pt: &SuspensionPoint) -> Result<Vec3> {
    let g = metric_tensor(pt)?;
    let e = frame(pt);
    Ok([inner(&g, &e[0], &e[0]), inner(&g, &e[1], &e[1]), inner(&g, &e[2], &e[2])])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureMethod {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub point: SuspensionPoint,
    pub method: CurvatureMethod,
    pub metric: Mat3,
    pub christoffel: Gamma,
    pub frame: [Vec3; 3],
    pub frame_lengths: Vec3,
    pub k12: f64,
    pub k13: f64,
    pub k23: f64,
    /// `R_{abcd} g^{ac} g^{bd}`
    pub scalar: f64,
    /// `2 (K12 + K13 + K23)`, equal to `scalar` for an orthogonal frame
    pub scalar_from_sectional: f64,
}

pub const FD_STEP_MIN: f64 = 1e-6;
pub const FD_STEP_MAX: f64 = 1e-3;

pub fn curvature_report(pt: &SuspensionPoint, method: CurvatureMethod, h_fd: f64) -> Result<CurvatureReport> {
    let metric = metric_tensor(pt)?;
    let jet = match method {
        CurvatureMethod::Analytic => analytic_jet(pt),
        CurvatureMethod::FiniteDifference => {
            if !(FD_STEP_MIN..=FD_STEP_MAX).contains(&h_fd) {
                return Err(Error::InvalidInput(format!(
                    "finite-difference step must lie in [{FD_STEP_MIN:e}, {FD_STEP_MAX:e}], got {h_fd:e}"
                )));
            }
            finite_difference_jet(pt, h_fd)
        }
    };
    let ginv = inverse3(&jet.g)?;
    let r = riemann_lower(&jet)?;
    let e = frame(pt);
    let k12 = sectional_from(&r, &jet.g, &e[0], &e[1], (1, 2))?;
    let k13 = sectional_from(&r, &jet.g, &e[0], &e[2], (1, 3))?;
    let k23 = sectional_from(&r, &jet.g, &e[1], &e[2], (2, 3))?;
    let mut scalar = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    scalar += r[a][b][c][d] * ginv[a][c] * ginv[b][d];
                }
            }
        }
    }
    Ok(CurvatureReport {
        point: *pt,
        method,
        metric,
        christoffel: christoffel_from(&ginv, &jet.dg),
        frame: e,
        frame_lengths: frame_lengths(pt)?,
        k12,
        k13,
        k23,
        scalar,
        scalar_from_sectional: 2.0 * (k12 + k13 + k23),
    })
}

/// Pullback of the metric at `(w', u')` through `w = A w'`, `u = u' - 1`
/// with `A = [[2, -1], [-1, 1]]`, the inverse of the cat map.
pub fn pullback_metric(pt: &SuspensionPoint) -> Result<Mat3> {
    let g = metric_tensor(&pt.at_u(pt.u - 1.0))?;
    let a = [[2.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| (0..3).map(|l| a[k][i] * g[k][l] * a[l][j]).sum::<f64>()).sum();
        }
    }
    Ok(out)
}

/// Geodesic acceleration `-Gamma^r_{mn} v^m v^n` with the connection
/// computed from the metric jet.
pub fn geodesic_acceleration_christoffel(pt: &SuspensionPoint, v: &Vec3) -> Vec3 {
    let jet = analytic_jet(pt);
    let gamma = christoffel(&jet).expect("metric is positive definite");
    let mut acc = [0.0; 3];
    for (r, a) in acc.iter_mut().enumerate() {
        for m in 0..3 {
            for n in 0..3 {
                *a -= gamma[r][m][n] * v[m] * v[n];
            }
        }
    }
    acc
}

/// Geodesic acceleration evaluated through `theta_k`, where the metric is
/// diagonal: `theta_k'' = -2 ln(lambda_k) u' theta_k'` and
/// `u'' = sum_k ln(lambda_k) lambda_k^(2u) theta_k'^2`.
///
/// Same equations as [`geodesic_acceleration_christoffel`], but free of the
/// cancellation between metric entries of size `lambda1^(2|u|)`.
pub fn geodesic_acceleration(pt: &SuspensionPoint, v: &Vec3) -> Vec3 {
    let (l1, l2) = (pt.lambda1, pt.lambda2());
    let (c1, c2) = (l1.ln(), l2.ln());
    let [a1, b1] = theta(l1);
    let [a2, b2] = theta(l2);
    let t1 = a1 * v[0] + b1 * v[1];
    let t2 = a2 * v[0] + b2 * v[1];
    let tt1 = -2.0 * c1 * v[2] * t1;
    let tt2 = -2.0 * c2 * v[2] * t2;
    // invert [[a1, b1], [a2, b2]]
    let det = a1 * b2 - a2 * b1;
    [
        (b2 * tt1 - b1 * tt2) / det,
        (a1 * tt2 - a2 * tt1) / det,
        c1 * l1.powf(2.0 * pt.u) * t1 * t1 + c2 * l2.powf(2.0 * pt.u) * t2 * t2,
    ]
}

/// `g(v, v)`, summed in the diagonal frame.
pub fn kinetic_energy(pt: &SuspensionPoint, v: &Vec3) -> f64 {
    [pt.lambda1, pt.lambda2()]
        .iter()
        .map(|&l| {
            let [a, b] = theta(l);
            l.powf(2.0 * pt.u) * (a * v[0] + b * v[1]).powi(2)
        })
        .sum::<f64>()
        + v[2] * v[2]
}

/// The geodesic equations as written out coefficient by coefficient, with
/// `lambda2` eliminated in favor of `lambda1`. Kept separate from
/// [`geodesic_acceleration`] so the two can be compared.
pub fn geodesic_acceleration_explicit(pt: &SuspensionPoint, v: &Vec3) -> Vec3 {
    let l = pt.lambda1;
    let ln = l.ln();
    let u = pt.u;
    let a = (l - 1.0) * ln / (l + 1.0);
    let (w1, w2, ud) = (v[0], v[1], v[2]);
    let p = l.powf(2.0 * u + 2.0);
    let c11 = (1.0 - l.powf(4.0 * u + 4.0)) * ln / p;
    let c12 = 2.0 * (1.0 + l.powf(4.0 * u + 3.0)) * (l - 1.0) * ln / p;
    let c22 = (1.0 - l.powf(4.0 * u + 2.0)) * (l - 1.0).powi(2) * ln / p;
    [
        -(2.0 * a * w1 * ud - 4.0 * a * w2 * ud),
        -(-2.0 * a * w2 * ud - 4.0 * a * w1 * ud),
        -(c11 * w1 * w1 + c12 * w1 * w2 + c22 * w2 * w2),
    ]
}

/// Position and velocity along a geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSample {
    pub t: f64,
    pub x: Vec3,
    pub v: Vec3,
    /// `g(v, v)`
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<GeodesicSample>,
    /// `max_t |g(v, v) - E0| / E0`
    pub max_relative_energy_drift: f64,
}

/// Relative energy drift beyond which integration is rejected.
pub const MAX_ACCEPTED_DRIFT: f64 = 1e-3;

fn rhs(lambda1: f64, s: &[f64; 6]) -> [f64; 6] {
    let pt = SuspensionPoint { w1: s[0], w2: s[1], u: s[2], lambda1 };
    let v = [s[3], s[4], s[5]];
    let a = geodesic_acceleration(&pt, &v);
    [v[0], v[1], v[2], a[0], a[1], a[2]]
}

fn energy(lambda1: f64, s: &[f64; 6]) -> f64 {
    kinetic_energy(&SuspensionPoint { w1: s[0], w2: s[1], u: s[2], lambda1 }, &[s[3], s[4], s[5]])
}

/// Classical fixed-step RK4 on the geodesic equations.
pub fn integrate_geodesic(pt: &SuspensionPoint, velocity: &Vec3, t_end: f64, dt: f64) -> Result<Trajectory> {
    SuspensionPoint::new(pt.w1, pt.w2, pt.u, pt.lambda1)?;
    if !(t_end > 0.0) || !(dt > 0.0) || dt > t_end / 100.0 {
        return Err(Error::InvalidInput(format!("need 0 < dt <= t_end / 100, got dt = {dt}, t_end = {t_end}")));
    }
    let steps = (t_end / dt).round() as usize;
    let lambda1 = pt.lambda1;
    let mut s = [pt.w1, pt.w2, pt.u, velocity[0], velocity[1], velocity[2]];
    let e0 = energy(lambda1, &s);
    if !(e0 > 0.0) {
        return Err(Error::InvalidInput("initial velocity must be nonzero".into()));
    }
    let mut samples = Vec::with_capacity(steps + 1);
    let mut drift: f64 = 0.0;
    let push = |samples: &mut Vec<GeodesicSample>, t: f64, s: &[f64; 6], e: f64| {
        samples.push(GeodesicSample { t, x: [s[0], s[1], s[2]], v: [s[3], s[4], s[5]], energy: e });
    };
    push(&mut samples, 0.0, &s, e0);
    let add = |a: &[f64; 6], b: &[f64; 6], h: f64| -> [f64; 6] { std::array::from_fn(|i| a[i] + h * b[i]) };
    for k in 1..=steps {
        let k1 = rhs(lambda1, &s);
        let k2 = rhs(lambda1, &add(&s, &k1, dt / 2.0));
        let k3 = rhs(lambda1, &add(&s, &k2, dt / 2.0));
        let k4 = rhs(lambda1, &add(&s, &k3, dt));
        s = std::array::from_fn(|i| s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        let e = energy(lambda1, &s);
        drift = drift.max((e - e0).abs() / e0);
        push(&mut samples, k as f64 * dt, &s, e);
    }
    if drift > MAX_ACCEPTED_DRIFT {
        return Err(Error::Accuracy { drift });
    }
    Ok(Trajectory { samples, max_relative_energy_drift: drift })
}

/// Image of a trajectory under `w' = T w`, `u' = u + 1` (the inverse of the
/// substitution in [`pullback_metric`]).
pub fn transform_trajectory(traj: &Trajectory) -> Trajectory {
    let tw = |x: &Vec3| -> Vec3 { [x[0] + x[1], x[0] + 2.0 * x[1], x[2]] };
    let samples = traj
        .samples
        .iter()
        .map(|s| {
            let x = tw(&s.x);
            GeodesicSample { t: s.t, x: [x[0], x[1], x[2] + 1.0], v: tw(&s.v), energy: s.energy }
        })
        .collect();
    Trajectory { samples, max_relative_energy_drift: traj.max_relative_energy_drift }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowDirection {
    Contracting,
    Expanding,
}

/// `|e|_{u0 + t} / |e|_{u0}` for the frame vector carried along the fiber
/// flow `(w, u) -> (w, u + t)`: `e2` for the expanding direction, `e1` for
/// the contracting one.
pub fn suspension_flow_check_at(u0: f64, t: f64, which: FlowDirection) -> Result<f64> {
    let p0 = SuspensionPoint::cat(0.0, 0.0, u0);
    let p1 = p0.at_u(u0 + t);
    let idx = match which {
        FlowDirection::Expanding => 1,
        FlowDirection::Contracting => 0,
    };
    let (l0, l1) = (frame_lengths(&p0)?[idx], frame_lengths(&p1)?[idx]);
    Ok((l1 / l0).sqrt())
}

pub fn suspension_flow_check(t: f64, which: FlowDirection) -> Result<f64> {
    suspension_flow_check_at(0.0, t, which)
}
