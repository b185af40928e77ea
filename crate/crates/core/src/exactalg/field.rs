//! Prime-field arithmetic.
//!
//! Elements are stored as `u32` residues in `[0, p)`. Every supported prime is
//! below `2^30`, so a product of two residues fits in 60 bits and fifteen such
//! products can be accumulated in a `u64` before a reduction is needed. The
//! elimination kernels rely on that headroom.

use serde::{Deserialize, Serialize};

use super::AlgError;

/// The default working prime.
pub const DEFAULT_PRIME: u64 = 1_073_741_789;

/// Further primes just below `2^30`, used to confirm nonzero dimensions.
pub const DEFAULT_RETRY_PRIMES: [u64; 3] = [1_073_741_783, 1_073_741_741, 1_073_741_723];

/// Smallest prime accepted by [`FieldConfig::validate`].
pub const MIN_PRIME: u64 = 1_000_000;

/// Number of products of two residues that can be added to a reduced `u64`
/// accumulator without overflow (every supported prime is below `2^30`).
pub const LAZY_BUDGET: usize = 15;

/// A prime field `F_p` with a precomputed Barrett constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u64,
    barrett: u64,
}

impl Field {
    /// Builds the field for `p`. Panics when `p` is not in `(2, 2^30)`; use
    /// [`FieldConfig::validate`] for a checked path.
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 30), "prime {p} outside supported range");
        let barrett = (u128::from(u64::MAX) / u128::from(p)) as u64;
        Field { p, barrett }
    }

    /// The characteristic.
    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary `u64` to a residue.
    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u32 {
        let q = ((u128::from(x) * u128::from(self.barrett)) >> 64) as u64;
        let mut r = x - q * self.p;
        while r >= self.p {
            r -= self.p;
        }
        r as u32
    }

    #[inline(always)]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = u64::from(a) + u64::from(b);
        if s >= self.p {
            (s - self.p) as u32
        } else {
            s as u32
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (u64::from(a) + self.p - u64::from(b)) as u32
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            (self.p - u64::from(a)) as u32
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.reduce(u64::from(a) * u64::from(b))
    }

    pub fn pow(&self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let (mut t, mut new_t) = (0i64, 1i64);
        let (mut r, mut new_r) = (self.p as i64, i64::from(a));
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        if t < 0 {
            t += self.p as i64;
        }
        t as u32
    }

    /// Embeds a signed integer.
    pub fn from_i64(&self, v: i64) -> u32 {
        let m = v.rem_euclid(self.p as i64);
        m as u32
    }

    /// Symmetric lift to `(-p/2, p/2]`, handy for printing small coefficients.
    pub fn to_signed(&self, a: u32) -> i64 {
        let a = i64::from(a);
        if a > (self.p as i64) / 2 {
            a - self.p as i64
        } else {
            a
        }
    }
}

/// Prime configuration for a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub prime: u64,
    pub retry_primes: Vec<u64>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            prime: DEFAULT_PRIME,
            retry_primes: DEFAULT_RETRY_PRIMES.to_vec(),
        }
    }
}

impl FieldConfig {
    pub fn validate(&self) -> Result<(), AlgError> {
        let all = std::iter::once(&self.prime).chain(self.retry_primes.iter());
        for &q in all {
            if q <= MIN_PRIME || q >= (1 << 30) || !is_prime(q) {
                return Err(AlgError::BadPrime(q));
            }
        }
        let mut seen = self.retry_primes.clone();
        seen.push(self.prime);
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.retry_primes.len() + 1 {
            return Err(AlgError::DuplicatePrime);
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        Field::new(self.prime)
    }

    /// All primes in the order they are tried: the working prime first.
    pub fn all_primes(&self) -> Vec<u64> {
        let mut v = vec![self.prime];
        v.extend(self.retry_primes.iter().copied());
        v
    }
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let mulmod = |a: u64, b: u64| ((u128::from(a) * u128::from(b)) % u128::from(n)) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_primes_are_valid() {
        FieldConfig::default().validate().unwrap();
    }

    #[test]
    fn inverse_and_reduce() {
        let f = Field::new(DEFAULT_PRIME);
        for a in [1u32, 2, 3, 12345, (DEFAULT_PRIME - 1) as u32] {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.reduce(u64::MAX), (u64::MAX % DEFAULT_PRIME) as u32);
        assert_eq!(f.from_i64(-1), (DEFAULT_PRIME - 1) as u32);
        assert_eq!(f.to_signed(f.from_i64(-7)), -7);
    }

    #[test]
    fn rejects_small_or_composite() {
        let bad = FieldConfig { prime: 1_000_003, retry_primes: vec![1_000_003] };
        assert!(bad.validate().is_err());
        let composite = FieldConfig { prime: 1_073_741_787, retry_primes: vec![] };
        assert!(composite.validate().is_err());
    }
}
