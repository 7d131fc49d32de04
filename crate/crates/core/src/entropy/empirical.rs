//! Monte Carlo estimate of the Kolmogorov entropy of a 2x2 torus map.
//!
//! Points are held exactly as residues `r / p` with `p = 2^61 - 1`, so the
//! map `u -> M u mod 1` is iterated without rounding. Each point is coded by
//! the itinerary of grid cells it visits. For every prefix length `k` the
//! itinerary hashes are sorted and counted, giving two block entropies:
//!
//! * Shannon: `H_k = -sum p ln p` over itineraries of length `k`
//! * collision (order 2): `H2_k = -ln P(two samples share the itinerary)`
//!
//! `H_k / k` converges slowly (it carries the `ln(grid^2) / k` offset of the
//! first cell) and its counts undersample quickly, so the estimate is the
//! slope of `H2_k` over the upper half of the levels whose collision count is
//! large enough to trust. For a linear automorphism with Lebesgue measure
//! both block entropies grow at rate `h`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntegerMatrix;
use crate::modp::{self, P};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsOptions {
    /// cells per axis
    pub grid: usize,
    /// itinerary length
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    /// smallest number of colliding pairs for a level to enter the estimate
    pub min_collisions: u64,
}

impl Default for KsOptions {
    fn default() -> Self {
        Self { grid: 16, depth: 12, samples: 1_000_000, seed: 0x5eed, min_collisions: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsEstimate {
    pub estimate: f64,
    /// standard error from the collision counts of the two levels used
    pub std_error: f64,
    /// levels (k_lo, k_hi) the slope is taken over
    pub levels: (usize, usize),
    /// collision entropy per itinerary length, index k-1
    pub collision_entropy: Vec<f64>,
    /// colliding pairs per itinerary length, index k-1
    pub collision_pairs: Vec<u64>,
    /// Shannon block entropy divided by k, index k-1
    pub shannon_rate: Vec<f64>,
    /// set when fewer than `depth` levels had enough collisions
    pub undersampled: bool,
}

const SPLITMIX_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const CHUNK: usize = 4096;

/// Estimates h for the 2x2 integer matrix `m`.
pub fn empirical_ks_entropy(m: &IntegerMatrix, opts: &KsOptions) -> Result<KsEstimate> {
    if m.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: m.n() });
    }
    if opts.grid < 2 || opts.depth < 2 {
        return Err(Error::InvalidInput("grid and depth must both be at least 2".into()));
    }
    if opts.samples < 2 {
        return Err(Error::Undersampled { samples: opts.samples, required: 2 });
    }
    let a: [u64; 4] = [
        modp::from_i64(m.get(0, 0)),
        modp::from_i64(m.get(0, 1)),
        modp::from_i64(m.get(1, 0)),
        modp::from_i64(m.get(1, 1)),
    ];
    let grid = opts.grid as u128;
    let cell = |r: u64| -> u64 { ((r as u128 * grid) / P as u128) as u64 };

    let mut points = vec![(0u64, 0u64); opts.samples];
    points.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(c as u64);
        for pt in chunk {
            *pt = (rng.random_range(0..P), rng.random_range(0..P));
        }
    });
    let mut hashes = vec![0u64; opts.samples];

    let s = opts.samples as f64;
    let total_pairs = s * (s - 1.0);
    let mut collision_entropy = Vec::with_capacity(opts.depth);
    let mut collision_pairs = Vec::with_capacity(opts.depth);
    let mut shannon_rate = Vec::with_capacity(opts.depth);
    let mut sorted = vec![0u64; opts.samples];

    for k in 1..=opts.depth {
        points.par_iter_mut().zip(hashes.par_iter_mut()).for_each(|((x, y), h)| {
            let symbol = cell(*x) * grid as u64 + cell(*y);
            *h = mix(h.wrapping_add(SPLITMIX_GAMMA) ^ symbol.wrapping_mul(SPLITMIX_GAMMA));
            let nx = modp::add(modp::mul(a[0], *x), modp::mul(a[1], *y));
            let ny = modp::add(modp::mul(a[2], *x), modp::mul(a[3], *y));
            *x = nx;
            *y = ny;
        });
        sorted.copy_from_slice(&hashes);
        sorted.par_sort_unstable();
        let mut ordered_pairs: u64 = 0;
        let mut shannon = 0.0;
        for run in sorted.chunk_by(|a, b| a == b) {
            let c = run.len() as u64;
            ordered_pairs += c * (c - 1);
            let p = c as f64 / s;
            shannon -= p * p.ln();
        }
        collision_pairs.push(ordered_pairs / 2);
        collision_entropy.push(if ordered_pairs == 0 {
            f64::INFINITY
        } else {
            -(ordered_pairs as f64 / total_pairs).ln()
        });
        shannon_rate.push(shannon / k as f64);
    }

    let usable = collision_pairs.iter().take_while(|&&c| c >= opts.min_collisions).count();
    // below two trusted levels the first two are used anyway and flagged
    if usable < 2 && collision_pairs[1] == 0 {
        return Err(Error::Undersampled { samples: opts.samples, required: opts.grid * opts.grid });
    }
    let k_hi = usable.max(2);
    let k_lo = (k_hi / 2).max(1);
    let span = (k_hi - k_lo) as f64;
    let estimate = (collision_entropy[k_hi - 1] - collision_entropy[k_lo - 1]) / span;
    let c_lo = collision_pairs[k_lo - 1] as f64;
    let c_hi = collision_pairs[k_hi - 1] as f64;
    let std_error = (1.0 / c_lo + 1.0 / c_hi).sqrt() / span;

    Ok(KsEstimate {
        estimate,
        std_error,
        levels: (k_lo, k_hi),
        collision_entropy,
        collision_pairs,
        shannon_rate,
        undersampled: usable < opts.depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{cat_map, IntegerMatrix};

    #[test]
    fn identity_has_zero_entropy() {
        let opts = KsOptions { samples: 20_000, depth: 6, ..KsOptions::default() };
        let est = empirical_ks_entropy(&IntegerMatrix::identity(2).unwrap(), &opts).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert!(!est.undersampled);
        // the block entropy is that of the single partition, about ln 256
        let last = *est.shannon_rate.last().unwrap() * 6.0;
        assert!((last - 256f64.ln()).abs() < 0.05);
    }

    #[test]
    fn cat_map_small_run() {
        let opts = KsOptions { samples: 200_000, ..KsOptions::default() };
        let est = empirical_ks_entropy(&cat_map(), &opts).unwrap();
        assert!((est.estimate - 0.9624).abs() < 0.1, "{est:?}");
        assert!(est.std_error < 0.1);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let opts = KsOptions { samples: 10_000, depth: 4, ..KsOptions::default() };
        let a = empirical_ks_entropy(&cat_map(), &opts).unwrap();
        let b = empirical_ks_entropy(&cat_map(), &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        let opts = KsOptions::default();
        assert!(empirical_ks_entropy(&crate::matrix::build_mixmax(3, 0).unwrap(), &opts).is_err());
        assert!(empirical_ks_entropy(&cat_map(), &KsOptions { grid: 1, ..opts.clone() }).is_err());
        assert!(empirical_ks_entropy(&cat_map(), &KsOptions { depth: 1, ..opts }).is_err());
    }
}
