//! Arithmetic modulo the Mersenne prime 2^61 - 1.

/// The modulus p = 2^61 - 1.
pub const P: u64 = (1 << 61) - 1;

#[inline]
pub fn reduce128(x: u128) -> u64 {
    // x = hi * 2^61 + lo and 2^61 = 1 (mod p)
    let lo = (x as u64) & P;
    let hi = x >> 61;
    let s = lo as u128 + hi;
    let s = (s & P as u128) + (s >> 61);
    let s = s as u64;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    reduce128(a as u128 * b as u128)
}

/// Residue of a signed integer.
#[inline]
pub fn from_i64(x: i64) -> u64 {
    let r = x.rem_euclid(P as i64);
    r as u64
}

pub fn pow(mut base: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    acc
}

/// Multiplicative inverse; `a` must be nonzero mod p.
pub fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}
