//! Torus automorphisms run as pseudorandom generators.
//!
//! A point `u` of the unit hypercube is stored exactly as residues
//! `a_i = u_i * p` modulo the Mersenne prime `p = 2^61 - 1`, so `u -> T u mod 1`
//! becomes the exact linear map `a -> T a mod p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Family, IntegerMatrix};
use crate::modp::{self, P};

/// The modulus.
pub const MODULUS: u64 = P;

/// Version tag mixed into every seed expansion. Changing the expansion
/// requires bumping it.
pub const SEED_EXPANSION_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorState {
    residues: Vec<u64>,
    step_count: u64,
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(z: u64) -> u64 {
    let mut z = z;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl GeneratorState {
    /// State from explicit residues; each must be below `p`.
    pub fn from_residues(residues: Vec<u64>) -> Result<Self> {
        if residues.len() < 2 {
            return Err(Error::InvalidDimension(residues.len()));
        }
        if let Some(r) = residues.iter().find(|&&r| r >= P) {
            return Err(Error::InvalidInput(format!("residue {r} is not below the modulus")));
        }
        Ok(Self { residues, step_count: 0 })
    }

    pub fn n(&self) -> usize {
        self.residues.len()
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }

    /// `u_i = a_i / p` in binary64, capped just below 1 (`(p - 1) / p`
    /// rounds to 1.0 otherwise). Monotone in the residue.
    pub fn output_uniform(&self) -> Vec<f64> {
        self.residues.iter().map(|&r| to_unit(r)).collect()
    }
}

const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

#[inline]
pub fn to_unit(r: u64) -> f64 {
    (r as f64 / P as f64).min(BELOW_ONE)
}

/// Expands `seed` into `n` residues with a splitmix64 chain over the seed's
/// 8-byte little-endian chunks and its length.
pub fn seed_state(n: usize, seed: &[u8]) -> Result<GeneratorState> {
    if seed.is_empty() {
        return Err(Error::InvalidSeed);
    }
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let mut h = splitmix(SEED_EXPANSION_VERSION.wrapping_mul(GOLDEN_GAMMA));
    for chunk in seed.chunks(8) {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        h = splitmix(h.wrapping_add(GOLDEN_GAMMA) ^ u64::from_le_bytes(buf));
    }
    h = splitmix(h.wrapping_add(GOLDEN_GAMMA) ^ seed.len() as u64);
    let residues = (0..n)
        .map(|_| {
            h = h.wrapping_add(GOLDEN_GAMMA);
            modp::reduce128(splitmix(h) as u128)
        })
        .collect();
    Ok(normalize_seed(residues))
}

/// The origin is a fixed point of every automorphism; an all-zero expansion
/// is replaced by `(1, 0, ..., 0)`.
fn normalize_seed(mut residues: Vec<u64>) -> GeneratorState {
    if residues.iter().all(|&r| r == 0) {
        residues[0] = 1;
    }
    GeneratorState { residues, step_count: 0 }
}

/// `m * a mod p` with `O(N^2)` work.
pub fn step_naive(st: &GeneratorState, m: &IntegerMatrix) -> Result<GeneratorState> {
    if m.n() != st.n() {
        return Err(Error::DimensionMismatch { expected: st.n(), actual: m.n() });
    }
    let coeffs: Vec<u64> = m.entries().iter().map(|&e| modp::from_i64(e)).collect();
    Ok(GeneratorState {
        residues: mat_vec(&coeffs, &st.residues),
        step_count: st.step_count + 1,
    })
}

fn mat_vec(coeffs: &[u64], v: &[u64]) -> Vec<u64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let row = &coeffs[i * n..(i + 1) * n];
            // products are below 2^122; sum in u128 in blocks well under 2^128
            let mut acc: u128 = 0;
            let mut out = 0u64;
            for (k, (&c, &x)) in row.iter().zip(v).enumerate() {
                acc += c as u128 * x as u128;
                if k % 32 == 31 {
                    out = modp::add(out, modp::reduce128(acc));
                    acc = 0;
                }
            }
            modp::add(out, modp::reduce128(acc))
        })
        .collect()
}

/// The MIXMAX step T(N, s) a in `O(N)` work, using that row `i` of T equals
/// row `i - 1` plus ones in columns `2..=i`, apart from the `s` at (3, 2).
pub fn step_fast(st: &GeneratorState, n: usize, s: i64) -> Result<GeneratorState> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if st.n() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: st.n() });
    }
    let a = &st.residues;
    let mut out = Vec::with_capacity(n);
    let sum = a.iter().fold(0u64, |acc, &x| modp::add(acc, x));
    out.push(sum);
    let s_a2 = if n >= 3 { modp::mul(modp::from_i64(s), a[1]) } else { 0 };
    let mut prefix = 0u64;
    let mut prev = sum;
    for i in 1..n {
        // 0-based i is row i+1; the prefix covers columns 2..=i+1
        prefix = modp::add(prefix, a[i]);
        let mut v = modp::add(prev, prefix);
        if i == 2 {
            v = modp::add(v, s_a2);
        } else if i == 3 {
            v = modp::sub(v, s_a2);
        }
        out.push(v);
        prev = v;
    }
    Ok(GeneratorState { residues: out, step_count: st.step_count + 1 })
}

/// Square matrix over the integers mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMatrix {
    n: usize,
    entries: Vec<u64>,
}

impl ModMatrix {
    pub fn from_integer(m: &IntegerMatrix) -> Self {
        Self { n: m.n(), entries: m.entries().iter().map(|&e| modp::from_i64(e)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        let n = self.n;
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let e = &mut entries[i * n + j];
                    *e = modp::add(*e, modp::mul(a, other.get(k, j)));
                }
            }
        }
        ModMatrix { n, entries }
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == u64::from(i == j)))
    }

    /// Inverse by Gauss-Jordan elimination mod p.
    pub fn inverse(&self) -> Result<ModMatrix> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = vec![0u64; n * n];
        for i in 0..n {
            inv[i * n + i] = 1;
        }
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a[r * n + col] != 0)
                .ok_or_else(|| Error::Domain("matrix is singular mod p".into()))?;
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    inv.swap(col * n + j, pivot * n + j);
                }
            }
            let scale = modp::inv(a[col * n + col]);
            for j in 0..n {
                a[col * n + j] = modp::mul(a[col * n + j], scale);
                inv[col * n + j] = modp::mul(inv[col * n + j], scale);
            }
            for r in 0..n {
                let f = a[r * n + col];
                if r == col || f == 0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = modp::sub(a[r * n + j], modp::mul(f, a[col * n + j]));
                    inv[r * n + j] = modp::sub(inv[r * n + j], modp::mul(f, inv[col * n + j]));
                }
            }
        }
        Ok(ModMatrix { n, entries: inv })
    }

    pub fn apply(&self, st: &GeneratorState) -> Result<GeneratorState> {
        if self.n != st.n() {
            return Err(Error::DimensionMismatch { expected: st.n(), actual: self.n });
        }
        Ok(GeneratorState { residues: mat_vec(&self.entries, &st.residues), step_count: st.step_count + 1 })
    }
}

/// A generator: a matrix, its current state and the unread outputs of that
/// state.
#[derive(Debug, Clone)]
pub struct Stream {
    matrix: IntegerMatrix,
    coeffs: Vec<u64>,
    state: GeneratorState,
    /// index of the next unread coordinate of `state`
    pos: usize,
}

impl Stream {
    /// The first output comes from `T * seed`, not from the seed itself.
    pub fn new(matrix: IntegerMatrix, state: GeneratorState) -> Result<Self> {
        if matrix.n() != state.n() {
            return Err(Error::DimensionMismatch { expected: state.n(), actual: matrix.n() });
        }
        let coeffs = matrix.entries().iter().map(|&e| modp::from_i64(e)).collect();
        let pos = state.n();
        Ok(Self { matrix, coeffs, state, pos })
    }

    pub fn state(&self) -> &GeneratorState {
        &self.state
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.matrix
    }

    fn advance(&mut self) {
        self.state = match self.matrix.family() {
            Family::Mixmax { n, s } => step_fast(&self.state, n, s).expect("dimension checked at construction"),
            _ => GeneratorState {
                residues: mat_vec(&self.coeffs, &self.state.residues),
                step_count: self.state.step_count + 1,
            },
        };
        self.pos = 0;
    }

    /// Next `count` residues, stepping whenever the current state is used up.
    pub fn fill_residues(&mut self, count: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            if self.pos == self.state.n() {
                self.advance();
            }
            let take = (count - out.len()).min(self.state.n() - self.pos);
            out.extend_from_slice(&self.state.residues[self.pos..self.pos + take]);
            self.pos += take;
        }
        out
    }

    /// Next `count` uniforms in [0, 1).
    pub fn fill(&mut self, count: usize) -> Vec<f64> {
        self.fill_residues(count).into_iter().map(to_unit).collect()
    }
}
