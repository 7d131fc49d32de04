//! Dense nonsymmetric eigenvalues: balance, reduce to upper Hessenberg form
//! with Householder reflections, then run Francis double-shift QR.
//!
//! The QR sweep follows the classic EISPACK `hqr` routine. Only eigenvalues
//! are produced; no Schur vectors are accumulated.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major square matrix scratch space.
struct Dense {
    n: usize,
    a: Vec<f64>,
}

impl Dense {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }
}

const RADIX: f64 = 2.0;

/// Diagonal similarity scaling by powers of two so row and column norms are
/// comparable. Exact in binary floating point, so eigenvalues are unchanged.
fn balance(m: &mut Dense) {
    let n = m.n;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += m.at(j, i).abs();
                    r += m.at(i, j).abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    *m.at_mut(i, j) *= g;
                }
                for j in 0..n {
                    *m.at_mut(j, i) *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (EISPACK `orthes`).
fn hessenberg(m: &mut Dense) {
    let n = m.n;
    if n < 3 {
        return;
    }
    let mut ort = vec![0.0; n];
    for k in 1..n - 1 {
        let scale: f64 = (k..n).map(|i| m.at(i, k - 1).abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (k..n).rev() {
            ort[i] = m.at(i, k - 1) / scale;
            h += ort[i] * ort[i];
        }
        let g = if ort[k] > 0.0 { -h.sqrt() } else { h.sqrt() };
        h -= ort[k] * g;
        ort[k] -= g;

        // H * A
        for j in k..n {
            let mut f = 0.0;
            for i in (k..n).rev() {
                f += ort[i] * m.at(i, j);
            }
            f /= h;
            for i in k..n {
                *m.at_mut(i, j) -= f * ort[i];
            }
        }
        // (H * A) * H
        for i in 0..n {
            let mut f = 0.0;
            for j in (k..n).rev() {
                f += ort[j] * m.at(i, j);
            }
            f /= h;
            for j in k..n {
                *m.at_mut(i, j) -= f * ort[j];
            }
        }
        ort[k] *= scale;
        *m.at_mut(k, k - 1) = scale * g;
        for i in k + 1..n {
            *m.at_mut(i, k - 1) = 0.0;
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Iterations allowed per eigenvalue before giving up.
const MAX_ITS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
fn hqr(m: &mut Dense) -> Result<Vec<Complex64>> {
    let n = m.n;
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += m.at(i, j).abs();
        }
    }
    let mut total_its = 0usize;
    // 1-based indices below mirror the reference routine; `a` maps them.
    let a = |m: &Dense, i: usize, j: usize| m.at(i - 1, j - 1);
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0usize;
        let mut l;
        loop {
            l = nn;
            while l >= 2 {
                let mut s = a(m, l - 1, l - 1).abs() + a(m, l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a(m, l, l - 1).abs() + s == s {
                    *m.at_mut(l - 1, l - 2) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a(m, nn, nn);
            if l == nn {
                wr[nn - 1] = x + t;
                wi[nn - 1] = 0.0;
                nn -= 1;
            } else {
                let mut y = a(m, nn - 1, nn - 1);
                let mut w = a(m, nn, nn - 1) * a(m, nn - 1, nn);
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 2] = x + z;
                        wr[nn - 1] = if z != 0.0 { x - w / z } else { x + z };
                        wi[nn - 2] = 0.0;
                        wi[nn - 1] = 0.0;
                    } else {
                        wr[nn - 2] = x + p;
                        wr[nn - 1] = x + p;
                        wi[nn - 2] = -z;
                        wi[nn - 1] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITS_PER_EIGENVALUE {
                        return Err(Error::NoConvergence { iterations: total_its, unresolved: nn });
                    }
                    if its > 0 && its % 10 == 0 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            *m.at_mut(i - 1, i - 1) -= x;
                        }
                        let s = a(m, nn, nn - 1).abs() + a(m, nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    total_its += 1;
                    let (mut p, mut q, mut r);
                    let mut mm = nn - 2;
                    loop {
                        let z = a(m, mm, mm);
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - w) / a(m, mm + 1, mm) + a(m, mm, mm + 1);
                        q = a(m, mm + 1, mm + 1) - z - rr - ss;
                        r = a(m, mm + 2, mm + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if mm == l {
                            break;
                        }
                        let u = a(m, mm, mm - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a(m, mm - 1, mm - 1).abs() + z.abs() + a(m, mm + 1, mm + 1).abs());
                        if u + v == v {
                            break;
                        }
                        mm -= 1;
                    }
                    for i in mm + 2..=nn {
                        *m.at_mut(i - 1, i - 3) = 0.0;
                        if i != mm + 2 {
                            *m.at_mut(i - 1, i - 4) = 0.0;
                        }
                    }
                    let mut k = mm;
                    while k + 1 <= nn {
                        if k != mm {
                            p = a(m, k, k - 1);
                            q = a(m, k + 1, k - 1);
                            r = if k != nn - 1 { a(m, k + 2, k - 1) } else { 0.0 };
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == mm {
                                if l != mm {
                                    *m.at_mut(k - 1, k - 2) = -a(m, k, k - 1);
                                }
                            } else {
                                *m.at_mut(k - 1, k - 2) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            let z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                let mut pp = a(m, k, j) + q * a(m, k + 1, j);
                                if k != nn - 1 {
                                    pp += r * a(m, k + 2, j);
                                    *m.at_mut(k + 1, j - 1) -= pp * z;
                                }
                                *m.at_mut(k, j - 1) -= pp * y;
                                *m.at_mut(k - 1, j - 1) -= pp * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                let mut pp = x * a(m, i, k) + y * a(m, i, k + 1);
                                if k != nn - 1 {
                                    pp += z * a(m, i, k + 2);
                                    *m.at_mut(i - 1, k + 1) -= pp * r;
                                }
                                *m.at_mut(i - 1, k) -= pp * q;
                                *m.at_mut(i - 1, k - 1) -= pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
}

/// All eigenvalues of a dense real `n x n` row-major matrix.
pub(crate) fn eigenvalues(n: usize, data: Vec<f64>) -> Result<Vec<Complex64>> {
    assert_eq!(data.len(), n * n);
    let mut m = Dense { n, a: data };
    if n == 1 {
        return Ok(vec![Complex64::new(m.a[0], 0.0)]);
    }
    balance(&mut m);
    hessenberg(&mut m);
    hqr(&mut m)
}
