use std::fmt;

use super::arith::{inv_mod, mulmod, prime_power};
use crate::error::{Error, Result};

/// A residue modulo `p^k`, standing for a p-adic integer known to precision `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    p: u64,
    k: u32,
    residue: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadicOp {
    Add,
    Mul,
    Neg,
    Inv,
}

impl PadicScalar {
    pub fn new(p: u64, k: u32, residue: i128) -> Result<Self> {
        let m = prime_power(p, k)
            .filter(|_| p >= 2 && k >= 1)
            .ok_or_else(|| Error::InvalidParams(format!("bad p-adic precision {p}^{k}")))?;
        Ok(Self { p, k, residue: residue.rem_euclid(m as i128) as u128 })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn residue(&self) -> u128 {
        self.residue
    }

    pub fn modulus(&self) -> u128 {
        prime_power(self.p, self.k).expect("validated at construction")
    }

    fn check(&self, other: &Self) -> Result<()> {
        if (self.p, self.k) != (other.p, other.k) {
            return Err(Error::PrecisionMismatch {
                left: format!("{}^{}", self.p, self.k),
                right: format!("{}^{}", other.p, other.k),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let m = self.modulus();
        let s = (self.residue + other.residue) % m;
        Ok(Self { residue: s, ..*self })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { residue: mulmod(self.residue, other.residue, self.modulus()), ..*self })
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        Self { residue: (m - self.residue) % m, ..*self }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn inv(&self) -> Result<Self> {
        inv_mod(self.residue, self.modulus())
            .map(|r| Self { residue: r, ..*self })
            .ok_or_else(|| Error::NonUnit(self.to_string()))
    }

    /// Dispatches one of the ring operations; unary ops ignore `other`.
    pub fn apply(&self, other: &Self, op: PadicOp) -> Result<Self> {
        match op {
            PadicOp::Add => self.add(other),
            PadicOp::Mul => self.mul(other),
            PadicOp::Neg => Ok(self.neg()),
            PadicOp::Inv => self.inv(),
        }
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.p, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let two = PadicScalar::new(3, 3, 2).unwrap();
        assert_eq!(two.inv().unwrap().residue(), 14);
        let x = PadicScalar::new(5, 4, 123).unwrap();
        assert_eq!(x.add(&x.neg()).unwrap().residue(), 0);
        let one = PadicScalar::new(5, 4, 1).unwrap();
        assert_eq!(one.mul(&x).unwrap(), x);
        assert_eq!(x.apply(&x, PadicOp::Neg).unwrap(), x.neg());
    }

    #[test]
    fn errors() {
        let a = PadicScalar::new(3, 3, 2).unwrap();
        let b = PadicScalar::new(3, 4, 2).unwrap();
        assert!(matches!(a.add(&b), Err(Error::PrecisionMismatch { .. })));
        let c = PadicScalar::new(5, 4, 2).unwrap();
        assert!(matches!(a.mul(&c), Err(Error::PrecisionMismatch { .. })));
        let nine = PadicScalar::new(3, 4, 9).unwrap();
        assert!(matches!(nine.inv(), Err(Error::NonUnit(_))));
    }

    #[test]
    fn negative_residues_normalized() {
        let a = PadicScalar::new(7, 2, -1).unwrap();
        assert_eq!(a.residue(), 48);
    }
}
