//! Coefficient rings the series kernel is generic over.

use std::fmt::Debug;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::ring::rational::{format_rational, int, Rational};
use crate::ring::{BaseRingDesc, CycloScalar, ResidueRing};

pub trait CoeffRing: Clone + PartialEq + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// `acc += a * b`
    fn mul_acc(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        let t = self.mul(a, b);
        *acc = self.add(acc, &t);
    }

    fn describe(&self) -> String;
    fn format_elem(&self, a: &Self::Elem) -> String;
}

impl CoeffRing for ResidueRing {
    type Elem = u128;

    fn zero(&self) -> u128 {
        0
    }
    fn one(&self) -> u128 {
        self.encode(1)
    }
    fn from_int(&self, v: i64) -> u128 {
        self.encode_i128(v as i128)
    }
    #[inline(always)]
    fn is_zero(&self, a: &u128) -> bool {
        *a == 0
    }
    #[inline(always)]
    fn add(&self, a: &u128, b: &u128) -> u128 {
        ResidueRing::add(self, *a, *b)
    }
    #[inline(always)]
    fn sub(&self, a: &u128, b: &u128) -> u128 {
        ResidueRing::sub(self, *a, *b)
    }
    #[inline(always)]
    fn neg(&self, a: &u128) -> u128 {
        ResidueRing::neg(self, *a)
    }
    #[inline(always)]
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        self.mont_mul(*a, *b)
    }
    fn inv(&self, a: &u128) -> Option<u128> {
        self.inverse(*a)
    }
    #[inline(always)]
    fn mul_acc(&self, acc: &mut u128, a: &u128, b: &u128) {
        *acc = ResidueRing::add(self, *acc, self.mont_mul(*a, *b));
    }
    fn describe(&self) -> String {
        format!("Z/{}^{}", self.p(), self.k())
    }
    fn format_elem(&self, a: &u128) -> String {
        self.decode(*a).to_string()
    }
}

/// The field of rationals (slow but simple exact arithmetic).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl CoeffRing for Rationals {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn from_int(&self, v: i64) -> Rational {
        int(v)
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn mul_acc(&self, acc: &mut Rational, a: &Rational, b: &Rational) {
        *acc += a * b;
    }
    fn describe(&self) -> String {
        "Q".into()
    }
    fn format_elem(&self, a: &Rational) -> String {
        format_rational(a)
    }
}

/// `Z[1/N0, ζ_N]` as a coefficient ring.
#[derive(Debug, Clone, PartialEq)]
pub struct CycloRing {
    pub desc: Arc<BaseRingDesc>,
}

impl CoeffRing for CycloRing {
    type Elem = CycloScalar;

    fn zero(&self) -> CycloScalar {
        CycloScalar::zero(&self.desc)
    }
    fn one(&self) -> CycloScalar {
        CycloScalar::one(&self.desc)
    }
    fn from_int(&self, v: i64) -> CycloScalar {
        CycloScalar::from_int(&self.desc, v)
    }
    fn is_zero(&self, a: &CycloScalar) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &CycloScalar, b: &CycloScalar) -> CycloScalar {
        a.add(b)
    }
    fn sub(&self, a: &CycloScalar, b: &CycloScalar) -> CycloScalar {
        a.sub(b)
    }
    fn neg(&self, a: &CycloScalar) -> CycloScalar {
        a.neg()
    }
    fn mul(&self, a: &CycloScalar, b: &CycloScalar) -> CycloScalar {
        a.mul(b)
    }
    fn inv(&self, a: &CycloScalar) -> Option<CycloScalar> {
        // only rational units are inverted here
        a.as_rational()
            .filter(|r| !r.is_zero() && self.desc.allows_denominator(&r.numer().abs()))
            .map(|r| CycloScalar::from_rational(&self.desc, r.recip()).expect("checked"))
    }
    fn describe(&self) -> String {
        format!("Z[1/{}, zeta_{}]", self.desc.n0(), self.desc.n())
    }
    fn format_elem(&self, a: &CycloScalar) -> String {
        a.to_string()
    }
}
