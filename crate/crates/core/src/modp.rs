//! Arithmetic modulo the Mersenne prime 2^61 - 1, used to specialize the
//! formal symbol `n` when testing linear independence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub const P: u64 = (1 << 61) - 1;

#[inline]
pub fn reduce128(x: u128) -> u64 {
    let lo = (x as u64) & P;
    let hi = (x >> 61) as u64;
    let mut s = lo + (hi & P) + ((x >> 122) as u64);
    while s >= P {
        s -= P;
    }
    s
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

pub fn pow(mut base: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    acc
}

/// Multiplicative inverse; `None` for zero.
pub fn inv(a: u64) -> Option<u64> {
    (a != 0).then(|| pow(a, P - 2))
}

pub fn from_bigint(x: &BigInt) -> u64 {
    let m = BigInt::from(P);
    let mut r = x % &m;
    if r < BigInt::zero() {
        r += &m;
    }
    r.to_u64().expect("residue fits in u64")
}

pub fn from_rational(x: &BigRational) -> Option<u64> {
    let num = from_bigint(x.numer());
    let den = inv(from_bigint(x.denom()))?;
    Some(mul(num, den))
}

pub fn from_i64(x: i64) -> u64 {
    if x >= 0 {
        (x as u64) % P
    } else {
        sub(0, ((-(x as i128)) as u64) % P)
    }
}
