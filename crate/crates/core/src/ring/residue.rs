//! Montgomery arithmetic in `Z / p^k` for odd moduli below 2^127.
//!
//! Elements are stored in Montgomery form. Moduli below 2^63 use a 64-bit
//! reduction; larger moduli use a 128-bit one built from 64-bit limbs.

use super::arith::{inv_mod, mulmod, prime_power};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueRing {
    p: u64,
    k: u32,
    modulus: u128,
    narrow: bool,
    /// `-modulus^{-1}` modulo the Montgomery radix.
    minv: u128,
    /// radix^2 mod modulus
    r2: u128,
}

#[inline(always)]
fn wide_mul(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a0, a1) = (a & MASK, a >> 64);
    let (b0, b1) = (b & MASK, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

impl ResidueRing {
    /// The ring `Z / p^k`; `p` must be odd.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if p % 2 == 0 || p < 3 || k == 0 {
            return Err(Error::InvalidParams(format!("residue ring needs odd p and k >= 1, got p={p}, k={k}")));
        }
        let modulus = prime_power(p, k)
            .ok_or_else(|| Error::InvalidParams(format!("{p}^{k} exceeds 2^127")))?;
        let narrow = modulus < 1 << 63;
        let (minv, r2) = if narrow {
            let m = modulus as u64;
            let mut inv: u64 = m;
            for _ in 0..6 {
                inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
            }
            let r1 = (1u128 << 64) % modulus;
            (inv.wrapping_neg() as u128, mulmod(r1, r1, modulus))
        } else {
            let mut inv: u128 = modulus;
            for _ in 0..7 {
                inv = inv.wrapping_mul(2u128.wrapping_sub(modulus.wrapping_mul(inv)));
            }
            let r1 = (u128::MAX % modulus + 1) % modulus;
            (inv.wrapping_neg(), mulmod(r1, r1, modulus))
        };
        Ok(Self { p, k, modulus, narrow, minv, r2 })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    #[inline(always)]
    pub fn mont_mul(&self, a: u128, b: u128) -> u128 {
        let m = self.modulus;
        if self.narrow {
            let t = a * b;
            let u = (t as u64).wrapping_mul(self.minv as u64) as u128;
            let r = (t + u * m) >> 64;
            if r >= m {
                r - m
            } else {
                r
            }
        } else {
            let (hi, lo) = wide_mul(a, b);
            let u = lo.wrapping_mul(self.minv);
            let (uh, _) = wide_mul(u, m);
            let carry = (lo != 0) as u128;
            let t = hi + uh + carry;
            if t >= m {
                t - m
            } else {
                t
            }
        }
    }

    #[inline(always)]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    /// Montgomery form of an ordinary residue.
    pub fn encode(&self, plain: u128) -> u128 {
        self.mont_mul(plain % self.modulus, self.r2)
    }

    /// Ordinary residue in `[0, p^k)` of a Montgomery-form element.
    pub fn decode(&self, elem: u128) -> u128 {
        self.mont_mul(elem, 1)
    }

    pub fn encode_i128(&self, v: i128) -> u128 {
        self.encode(v.rem_euclid(self.modulus as i128) as u128)
    }

    pub fn inverse(&self, elem: u128) -> Option<u128> {
        inv_mod(self.decode(elem), self.modulus).map(|r| self.encode(r))
    }

    /// p-adic valuation of an element, `None` for zero.
    pub fn valuation(&self, elem: u128) -> Option<u32> {
        let mut r = self.decode(elem);
        if r == 0 {
            return None;
        }
        let mut v = 0;
        while r % self.p as u128 == 0 {
            r /= self.p as u128;
            v += 1;
        }
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn check_ring(p: u64, k: u32) {
        let ring = ResidueRing::new(p, k).unwrap();
        let m = ring.modulus();
        let samples = [0u128, 1, 2, m / 2, m / 3 + 7, m - 1, m - 2, 12345 % m];
        for &a in &samples {
            for &b in &samples {
                let ea = ring.encode(a);
                let eb = ring.encode(b);
                let prod = ring.decode(ring.mont_mul(ea, eb));
                let expect = (BigInt::from(a) * BigInt::from(b)) % BigInt::from(m);
                assert_eq!(BigInt::from(prod), expect, "p={p} k={k} a={a} b={b}");
                assert_eq!(ring.decode(ring.add(ea, eb)), (a + b) % m);
                assert_eq!(ring.decode(ring.sub(ea, eb)), (a + m - b) % m);
            }
        }
    }

    #[test]
    fn narrow_and_wide_kernels() {
        check_ring(3, 5);
        check_ring(7, 16);
        check_ring(7, 24);
        check_ring(13, 20);
        check_ring(3, 80);
        check_ring((1 << 61) - 1, 1);
    }

    #[test]
    fn inverse_of_two_mod_27() {
        let ring = ResidueRing::new(3, 3).unwrap();
        let inv = ring.inverse(ring.encode(2)).unwrap();
        assert_eq!(ring.decode(inv), 14);
        assert_eq!(ring.inverse(ring.encode(6)), None);
    }

    #[test]
    fn rejects_even_and_oversized() {
        assert!(ResidueRing::new(2, 3).is_err());
        assert!(ResidueRing::new(7, 50).is_err());
        assert!(ResidueRing::new(5, 0).is_err());
    }
}
