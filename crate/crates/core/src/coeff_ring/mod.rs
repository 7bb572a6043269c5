//! Coefficient rings: exact polynomials in `a` over the integers, and the
//! finite truncation `(Z/p^N)[a]/(a^K)` used for all module computations.

mod int_poly;
mod trunc;

pub use int_poly::IntPoly;
pub use trunc::{inv_unit, is_unit, reduce_poly, trunc_add, trunc_mul, trunc_neg, trunc_sub, TruncElem};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible `p^N`; residues are multiplied in `u128`.
const MAX_MODULUS: u128 = 1 << 62;

/// A prime together with the two truncation parameters.
///
/// `p_prec` is the p-adic precision `N` and `a_prec` the a-adic truncation
/// degree `K`, so the working ring is `R = (Z/p^N)[a]/(a^K)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PrimeConfig {
    pub p: u64,
    pub p_prec: u32,
    pub a_prec: usize,
    #[serde(skip)]
    modulus: u64,
}

impl PrimeConfig {
    pub fn new(p: u64, p_prec: u32, a_prec: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p_prec == 0 {
            return Err(Error::InvalidPrecision("pPrec must be at least 1".into()));
        }
        if a_prec == 0 {
            return Err(Error::InvalidPrecision("aPrec must be at least 1".into()));
        }
        let mut modulus: u128 = 1;
        for _ in 0..p_prec {
            modulus *= p as u128;
            if modulus > MAX_MODULUS {
                return Err(Error::InvalidPrecision(format!(
                    "{p}^{p_prec} does not fit the residue word"
                )));
            }
        }
        Ok(PrimeConfig {
            p,
            p_prec,
            a_prec,
            modulus: modulus as u64,
        })
    }

    /// Default truncation for a job at level `m`: `N = m + 2` and
    /// `K = max(2(m+1)(p+1), 16)`.
    pub fn for_level(p: u64, m: u32) -> Result<Self> {
        Self::new(p, m + 2, default_a_prec(p, m))
    }

    /// Same prime and a-truncation with a different p-adic precision.
    pub fn with_p_prec(&self, p_prec: u32) -> Result<Self> {
        Self::new(self.p, p_prec, self.a_prec)
    }

    pub fn with_a_prec(&self, a_prec: usize) -> Result<Self> {
        Self::new(self.p, self.p_prec, a_prec)
    }

    /// `p^N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `p^e` for `e <= N`.
    pub fn p_pow(&self, e: u32) -> u64 {
        assert!(e <= self.p_prec, "p^{e} exceeds the working precision");
        self.p.pow(e)
    }

    pub fn reduce_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        let s = x + y;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.modulus - y
        }
    }

    pub fn neg(&self, x: u64) -> u64 {
        if x == 0 {
            0
        } else {
            self.modulus - x
        }
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.modulus as u128) as u64
    }

    /// p-adic valuation of a residue, capped at `N` (so `valuation(0) = N`).
    pub fn valuation(&self, mut x: u64) -> u32 {
        if x == 0 {
            return self.p_prec;
        }
        let mut v = 0;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    /// Inverse of a residue prime to `p`.
    pub fn inv(&self, x: u64) -> Option<u64> {
        if x.is_multiple_of(self.p) {
            return None;
        }
        let (mut r0, mut r1) = (self.modulus as i128, x as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(t0.rem_euclid(self.modulus as i128) as u64)
    }

    /// Writes a nonzero residue as `p^v * u` with `u` a unit; returns `(v, u^-1)`.
    pub fn split_unit(&self, x: u64) -> (u32, u64) {
        let v = self.valuation(x);
        let pv = self.p.pow(v);
        // x = p^v * u with u determined modulo p^(N-v); any lift is a unit.
        let u = x / pv;
        (v, self.inv(u).expect("unit part is prime to p"))
    }
}

pub fn default_a_prec(p: u64, m: u32) -> usize {
    (2 * (m as usize + 1) * (p as usize + 1)).max(16)
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
    }

    #[test]
    fn config_rejects_bad_input() {
        assert_eq!(PrimeConfig::new(4, 2, 2), Err(Error::NotPrime(4)));
        assert!(PrimeConfig::new(2, 0, 2).is_err());
        assert!(PrimeConfig::new(2, 2, 0).is_err());
        assert!(PrimeConfig::new(2, 63, 2).is_err());
        assert!(PrimeConfig::new(2, 62, 2).is_ok());
    }

    #[test]
    fn default_policy() {
        let cfg = PrimeConfig::for_level(2, 0).unwrap();
        assert_eq!((cfg.p_prec, cfg.a_prec), (2, 16));
        let cfg = PrimeConfig::for_level(3, 6).unwrap();
        assert_eq!((cfg.p_prec, cfg.a_prec), (8, 56));
    }

    #[test]
    fn residue_helpers() {
        let cfg = PrimeConfig::new(3, 3, 1).unwrap();
        assert_eq!(cfg.modulus(), 27);
        assert_eq!(cfg.valuation(18), 2);
        assert_eq!(cfg.valuation(0), 3);
        assert_eq!(cfg.mul(cfg.inv(5).unwrap(), 5), 1);
        assert_eq!(cfg.inv(6), None);
        let (v, uinv) = cfg.split_unit(18);
        assert_eq!(v, 2);
        assert_eq!(cfg.mul(18, uinv), 9);
    }
}
