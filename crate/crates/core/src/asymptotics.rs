//! Large-N constants of the MIXMAX entropy and split sum.
//!
//! With `f(phi) = ln(4 cos^2(phi/2))` and the wedge `W = (-2pi/3, 2pi/3)`:
//!
//! * `h(N) ~ C1 * N / (2 pi)`, `C1 = int_W f`
//! * `r2(N) ~ C3 * (N / (2 pi))^3`, `C3 = int_W L(phi) R(phi) dphi`
//!
//! where `L(phi) = int_{-2pi/3}^{phi} f` and `R(phi) = int_{phi}^{2pi/3} f`.
//! The `1 / (2 pi)` of each measure is folded into the scaling, so C1 and C3
//! are the raw integrals.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureResult};

pub const WEDGE_EDGE: f64 = 2.0 * PI / 3.0;

const MAX_EVALS: usize = 2_000_000;

/// `ln(4 cos^2(phi/2))`, clamped to 0 within 1e-15 of the wedge edges.
pub fn integrand(phi: f64) -> f64 {
    let c = (phi / 2.0).cos();
    let v = (4.0 * c * c).ln();
    if (phi.abs() - WEDGE_EDGE).abs() < 1e-15 {
        v.max(0.0)
    } else {
        v
    }
}

pub fn entropy_integral_constant(tol: f64) -> Result<QuadratureResult> {
    if !(tol >= 1e-13) {
        return Err(Error::InvalidInput(format!("tolerance must be at least 1e-13, got {tol}")));
    }
    Ok(integrate(integrand, -WEDGE_EDGE, WEDGE_EDGE, tol, MAX_EVALS))
}

/// Same integrand over the whole circle; the exact value is 0.
pub fn full_circle_integral(tol: f64) -> Result<QuadratureResult> {
    if !(tol >= 1e-13) {
        return Err(Error::InvalidInput(format!("tolerance must be at least 1e-13, got {tol}")));
    }
    Ok(integrate(integrand, -PI, PI, tol, MAX_EVALS))
}

/// `(L(phi), R(phi))`, the weight to the left and right of `phi` in the wedge.
pub fn partial_integrals(phi: f64, tol: f64) -> (QuadratureResult, QuadratureResult) {
    let phi = phi.clamp(-WEDGE_EDGE, WEDGE_EDGE);
    (
        integrate(integrand, -WEDGE_EDGE, phi, tol, MAX_EVALS),
        integrate(integrand, phi, WEDGE_EDGE, tol, MAX_EVALS),
    )
}

pub fn r2_integral_constant(tol: f64) -> Result<QuadratureResult> {
    if !(tol >= 1e-8) {
        return Err(Error::InvalidInput(format!("tolerance must be at least 1e-8, got {tol}")));
    }
    // L and R are at most C1 < 4.1 and the wedge has length 4 pi / 3, so inner
    // errors of e move the outer integral by at most 2 * 4.1 * (4 pi / 3) * e.
    let propagation = 2.0 * 4.1 * WEDGE_EDGE * 2.0;
    let inner_tol = (tol / (2.0 * propagation)).max(1e-14);
    let inner_evals = std::cell::Cell::new(0usize);
    let outer = integrate(
        |phi| {
            let (l, r) = partial_integrals(phi, inner_tol);
            inner_evals.set(inner_evals.get() + l.evaluations + r.evaluations);
            l.value * r.value
        },
        -WEDGE_EDGE,
        WEDGE_EDGE,
        tol / 2.0,
        MAX_EVALS,
    );
    Ok(QuadratureResult {
        value: outer.value,
        abs_error_estimate: outer.abs_error_estimate + propagation * inner_tol,
        evaluations: outer.evaluations + inner_evals.get(),
    })
}

/// Tolerances used for the cached constants behind [`predict`].
pub const PREDICT_ENTROPY_TOL: f64 = 1e-13;
pub const PREDICT_R2_TOL: f64 = 1e-8;

fn constants() -> (f64, f64) {
    static CACHE: OnceLock<(f64, f64)> = OnceLock::new();
    *CACHE.get_or_init(|| {
        let c1 = entropy_integral_constant(PREDICT_ENTROPY_TOL).expect("valid tolerance").value;
        let c3 = r2_integral_constant(PREDICT_R2_TOL).expect("valid tolerance").value;
        (c1, c3)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub n: f64,
    pub h: f64,
    pub r2: f64,
}

/// Large-N estimates of h and of the split sum at dimension `n`. Takes a
/// real `n` so that `n = 2 pi` recovers the constants.
pub fn predict(n: f64) -> Result<Prediction> {
    if !(n >= 2.0) || !n.is_finite() {
        return Err(Error::InvalidInput(format!("dimension must be at least 2, got {n}")));
    }
    let (c1, c3) = constants();
    let x = n / (2.0 * PI);
    Ok(Prediction { n, h: c1 * x, r2: c3 * x * x * x })
}
