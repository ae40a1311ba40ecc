//! Elements of `Z[1/N0, ζ_N]` in the power basis modulo the N-th cyclotomic
//! polynomial, with the Frobenius automorphisms `ζ ↦ ζ^p` and the attached
//! Fermat-quotient p-derivations.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::arith::is_prime;
use super::rational::{format_rational, int, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseRingDesc {
    n0: u64,
    n: u64,
    /// Low-to-high coefficients of the N-th cyclotomic polynomial.
    cyclo_poly: Vec<i64>,
}

impl BaseRingDesc {
    pub fn new(n0: u64, n: u64) -> Result<Arc<Self>> {
        if n0 == 0 || n0 % 2 != 0 {
            return Err(Error::InvalidBaseRing(format!("N0 = {n0} must be even and positive")));
        }
        if n == 0 {
            return Err(Error::InvalidBaseRing("N must be positive".into()));
        }
        Ok(Arc::new(Self { n0, n, cyclo_poly: cyclotomic_polynomial(n) }))
    }

    /// `Z[1/2]`, the default base ring.
    pub fn rationals() -> Arc<Self> {
        Self::new(2, 1).expect("valid")
    }

    pub fn n0(&self) -> u64 {
        self.n0
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn cyclo_poly(&self) -> &[i64] {
        &self.cyclo_poly
    }

    /// Euler totient of N, the rank of the power basis.
    pub fn degree(&self) -> usize {
        self.cyclo_poly.len() - 1
    }

    pub fn check_prime(&self, p: u64) -> Result<()> {
        if p == 2 || !is_prime(p) || (self.n0 * self.n) % p == 0 {
            return Err(Error::InadmissiblePrime {
                p,
                forbidden: format!("N0*N = {}", self.n0 * self.n),
            });
        }
        Ok(())
    }

    /// Whether every prime factor of `den` divides N0.
    pub fn allows_denominator(&self, den: &BigInt) -> bool {
        let n0 = BigInt::from(self.n0);
        let mut d = den.clone();
        loop {
            let g = d.gcd(&n0);
            if g.is_one() {
                return d.is_one();
            }
            d /= g;
        }
    }
}

/// Exact division of integer polynomials by a monic divisor.
fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &b) in den.iter().enumerate() {
            rem[i + j] -= c * b;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            poly = poly_div_exact(&poly, &cyclotomic_polynomial(d));
        }
    }
    poly
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloScalar {
    coeffs: Vec<Rational>,
    ring: Arc<BaseRingDesc>,
}

impl CycloScalar {
    /// Builds an element from coefficients of `1, ζ, ζ², …` of any length,
    /// reducing modulo the cyclotomic polynomial.
    pub fn from_coeffs(ring: &Arc<BaseRingDesc>, coeffs: Vec<Rational>) -> Result<Self> {
        for c in &coeffs {
            if !ring.allows_denominator(c.denom()) {
                return Err(Error::ForbiddenDenominator { den: c.denom().to_string(), n0: ring.n0 });
            }
        }
        Ok(Self::reduced(ring, coeffs))
    }

    pub fn from_rational(ring: &Arc<BaseRingDesc>, r: Rational) -> Result<Self> {
        Self::from_coeffs(ring, vec![r])
    }

    pub fn from_int(ring: &Arc<BaseRingDesc>, v: i64) -> Self {
        Self::reduced(ring, vec![int(v)])
    }

    pub fn zero(ring: &Arc<BaseRingDesc>) -> Self {
        Self::reduced(ring, vec![])
    }

    pub fn one(ring: &Arc<BaseRingDesc>) -> Self {
        Self::from_int(ring, 1)
    }

    /// The primitive root of unity ζ_N.
    pub fn zeta(ring: &Arc<BaseRingDesc>) -> Self {
        Self::reduced(ring, vec![Rational::zero(), Rational::one()])
    }

    fn reduced(ring: &Arc<BaseRingDesc>, mut c: Vec<Rational>) -> Self {
        let phi = &ring.cyclo_poly;
        let deg = phi.len() - 1;
        for top in (deg..c.len()).rev() {
            let lead = std::mem::take(&mut c[top]);
            if lead.is_zero() {
                continue;
            }
            for (j, &b) in phi.iter().enumerate().take(deg) {
                if b != 0 {
                    c[top - deg + j] -= &lead * int(b);
                }
            }
        }
        c.resize(deg, Rational::zero());
        Self { coeffs: c, ring: ring.clone() }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn ring(&self) -> &Arc<BaseRingDesc> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn same_ring(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring,
            "cyclotomic elements from different base rings"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_ring(other);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self { coeffs, ring: self.ring.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_ring(other);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Self { coeffs, ring: self.ring.clone() }
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| -a).collect(), ring: self.ring.clone() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a * r).collect(), ring: self.ring.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_ring(other);
        let deg = self.coeffs.len();
        let mut prod = vec![Rational::zero(); 2 * deg.max(1) - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Self::reduced(&self.ring, prod)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(&self.ring);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The automorphism fixing rationals and sending ζ_N to ζ_N^p.
    pub fn frobenius(&self, p: u64) -> Result<Self> {
        self.ring.check_prime(p)?;
        let n = self.ring.n;
        let mut image = vec![Rational::zero(); n as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = ((i as u64 * p) % n) as usize;
            image[e] += c;
        }
        Ok(Self::reduced(&self.ring, image))
    }

    /// Fermat quotient `(φ_p(a) − a^p) / p`.
    pub fn p_derivation(&self, p: u64) -> Result<Self> {
        let diff = self.frobenius(p)?.sub(&self.pow(p));
        let pp = BigInt::from(p);
        let mut coeffs = Vec::with_capacity(diff.coeffs.len());
        for c in diff.coeffs {
            let (q, r) = c.numer().div_rem(&pp);
            if !r.is_zero() {
                return Err(Error::InexactDivision { divisor: p });
            }
            coeffs.push(Rational::new(q, c.denom().clone()));
        }
        Ok(Self { coeffs, ring: self.ring.clone() })
    }
}

impl fmt::Display for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match i {
                0 => format_rational(c),
                1 => format!("{}*z", format_rational(c)),
                _ => format!("{}*z^{i}", format_rational(c)),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rational::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
    }

    #[test]
    fn denominators_restricted_to_n0() {
        let ring = BaseRingDesc::new(6, 1).unwrap();
        assert!(CycloScalar::from_rational(&ring, q("5/12")).is_ok());
        assert!(matches!(
            CycloScalar::from_rational(&ring, q("1/5")),
            Err(Error::ForbiddenDenominator { .. })
        ));
        assert!(BaseRingDesc::new(3, 1).is_err());
    }

    #[test]
    fn frobenius_examples() {
        let r1 = BaseRingDesc::new(2, 1).unwrap();
        let a = CycloScalar::from_rational(&r1, q("7/2")).unwrap();
        assert_eq!(a.frobenius(5).unwrap(), a);

        let r4 = BaseRingDesc::new(2, 4).unwrap();
        let i = CycloScalar::zeta(&r4);
        assert_eq!(i.frobenius(3).unwrap(), i.neg());
        let one_plus_i = CycloScalar::one(&r4).add(&i);
        let one_minus_i = CycloScalar::one(&r4).sub(&i);
        assert_eq!(one_plus_i.frobenius(3).unwrap(), one_minus_i);
    }

    #[test]
    fn p_derivation_examples() {
        let r1 = BaseRingDesc::rationals();
        let two = CycloScalar::from_int(&r1, 2);
        assert_eq!(two.p_derivation(3).unwrap(), CycloScalar::from_int(&r1, -2));
        for p in [3, 5, 7, 11] {
            assert!(CycloScalar::one(&r1).p_derivation(p).unwrap().is_zero());
        }
        let r4 = BaseRingDesc::new(2, 4).unwrap();
        let i = CycloScalar::zeta(&r4);
        let one_plus_i = CycloScalar::one(&r4).add(&i);
        let one_minus_i = CycloScalar::one(&r4).sub(&i);
        assert_eq!(one_plus_i.p_derivation(3).unwrap(), one_minus_i);
    }

    #[test]
    fn inadmissible_primes_rejected() {
        let r = BaseRingDesc::new(6, 4).unwrap();
        let a = CycloScalar::zeta(&r);
        assert!(matches!(a.frobenius(3), Err(Error::InadmissiblePrime { .. })));
        assert!(matches!(a.frobenius(2), Err(Error::InadmissiblePrime { .. })));
        assert!(matches!(a.p_derivation(9), Err(Error::InadmissiblePrime { .. })));
        assert!(a.frobenius(5).is_ok());
    }

    #[test]
    fn zeta_has_order_n() {
        let r = BaseRingDesc::new(2, 12).unwrap();
        let z = CycloScalar::zeta(&r);
        assert_eq!(z.pow(12), CycloScalar::one(&r));
        assert_ne!(z.pow(6), CycloScalar::one(&r));
        assert_eq!(z.pow(6), CycloScalar::from_int(&r, -1));
    }

    #[test]
    fn display() {
        let r = BaseRingDesc::new(2, 4).unwrap();
        let a = CycloScalar::from_coeffs(&r, vec![q("1/2"), q("-3")]).unwrap();
        assert_eq!(a.to_string(), "1/2 + -3*z");
    }
}
