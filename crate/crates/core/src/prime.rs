//! Odd primes, residues mod p and the tree context.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Reduce an arbitrary integer into `0..p`.
#[inline]
pub fn residue(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

/// Multiplicative inverse of a non-zero residue, by Fermat.
pub fn inv_mod(x: u32, p: u32) -> u32 {
    debug_assert!(x % p != 0);
    pow_mod(x, p - 2, p)
}

pub fn pow_mod(base: u32, mut exp: u32, p: u32) -> u32 {
    let m = p as u64;
    let mut acc = 1u64;
    let mut b = (base % p) as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u32
}

/// The odd prime `p` together with the deepest tree level any operation may touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeContext {
    p: u32,
    depth_cap: usize,
}

impl PrimeContext {
    pub const DEFAULT_DEPTH_CAP: usize = 8;

    pub fn new(p: u32, depth_cap: usize) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if depth_cap == 0 {
            return Err(Error::ZeroDepthCap);
        }
        Ok(Self { p, depth_cap })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn depth_cap(&self) -> usize {
        self.depth_cap
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        if level > self.depth_cap {
            Err(Error::DepthExceeded {
                level,
                cap: self.depth_cap,
            })
        } else {
            Ok(())
        }
    }
}
