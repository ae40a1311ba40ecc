use std::sync::Arc;

use super::basis::{MonoIndex, MonomialBasis};
use super::coeff::CoeffRing;
use crate::error::{Error, Result};

/// Truncated power series in the variables `T_ij`: sparse terms sorted by
/// graded-lex rank, no stored zeros.
#[derive(Debug, Clone)]
pub struct Series<R: CoeffRing> {
    ring: R,
    basis: Arc<MonomialBasis>,
    terms: Vec<(u32, R::Elem)>,
}

impl<R: CoeffRing> PartialEq for Series<R> {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.same_basis(other) && self.terms == other.terms
    }
}

/// Dense scratch accumulator indexed by monomial rank.
pub(crate) struct Accumulator<R: CoeffRing> {
    values: Vec<R::Elem>,
    touched: Vec<u32>,
    flags: Vec<bool>,
}

impl<R: CoeffRing> Accumulator<R> {
    pub(crate) fn new(ring: &R, len: usize) -> Self {
        Self { values: vec![ring.zero(); len], touched: Vec::new(), flags: vec![false; len] }
    }

    #[inline(always)]
    pub(crate) fn mul_acc(&mut self, ring: &R, k: usize, a: &R::Elem, b: &R::Elem) {
        if !self.flags[k] {
            self.flags[k] = true;
            self.touched.push(k as u32);
        }
        ring.mul_acc(&mut self.values[k], a, b);
    }

    pub(crate) fn drain(&mut self, ring: &R) -> Vec<(u32, R::Elem)> {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &k in &self.touched {
            let k = k as usize;
            self.flags[k] = false;
            let v = std::mem::replace(&mut self.values[k], ring.zero());
            if !ring.is_zero(&v) {
                out.push((k as u32, v));
            }
        }
        self.touched.clear();
        out
    }
}

impl<R: CoeffRing> Series<R> {
    pub fn zero(ring: &R, basis: &Arc<MonomialBasis>) -> Self {
        Self { ring: ring.clone(), basis: basis.clone(), terms: Vec::new() }
    }

    pub fn constant(ring: &R, basis: &Arc<MonomialBasis>, c: R::Elem) -> Self {
        Self::from_terms(ring, basis, vec![(0, c)])
    }

    pub fn from_int(ring: &R, basis: &Arc<MonomialBasis>, v: i64) -> Self {
        Self::constant(ring, basis, ring.from_int(v))
    }

    /// The variable `T_v`, `v = i*n + j` (zero-based, row-major).
    pub fn var(ring: &R, basis: &Arc<MonomialBasis>, v: usize) -> Self {
        assert!(v < basis.nvars(), "variable index out of range");
        if basis.max_degree() == 0 {
            return Self::zero(ring, basis);
        }
        Self::from_terms(ring, basis, vec![(basis.var_rank(v), ring.one())])
    }

    /// Builds a series from unsorted `(rank, coeff)` pairs, summing repeats.
    pub fn from_terms(ring: &R, basis: &Arc<MonomialBasis>, mut terms: Vec<(usize, R::Elem)>) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<(u32, R::Elem)> = Vec::with_capacity(terms.len());
        for (r, c) in terms {
            assert!(r < basis.len(), "monomial rank out of range");
            match out.last_mut() {
                Some((last, acc)) if *last as usize == r => *acc = ring.add(acc, &c),
                _ => out.push((r as u32, c)),
            }
        }
        out.retain(|(_, c)| !ring.is_zero(c));
        Self { ring: ring.clone(), basis: basis.clone(), terms: out }
    }

    pub fn from_monomials(ring: &R, basis: &Arc<MonomialBasis>, terms: Vec<(MonoIndex, R::Elem)>) -> Result<Self> {
        let ranked = terms
            .into_iter()
            .map(|(m, c)| {
                basis
                    .rank(&m)
                    .map(|r| (r, c))
                    .ok_or_else(|| Error::RingMismatch(format!("monomial {m:?} outside basis")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_terms(ring, basis, ranked))
    }

    pub(crate) fn from_sorted(ring: &R, basis: &Arc<MonomialBasis>, terms: Vec<(u32, R::Elem)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !ring.is_zero(c)));
        Self { ring: ring.clone(), basis: basis.clone(), terms }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn terms(&self) -> &[(u32, R::Elem)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, rank: usize) -> R::Elem {
        match self.terms.binary_search_by_key(&(rank as u32), |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => self.ring.zero(),
        }
    }

    pub fn coeff_of(&self, mono: &MonoIndex) -> R::Elem {
        self.basis.rank(mono).map(|r| self.coeff(r)).unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coeff(0)
    }

    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.first().map(|(r, _)| self.basis.degree(*r as usize))
    }

    fn same_basis(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis)
            || (self.basis.n() == other.basis.n() && self.basis.max_degree() == other.basis.max_degree())
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                self.ring.describe(),
                other.ring.describe()
            )));
        }
        if !self.same_basis(other) {
            return Err(Error::RingMismatch(format!(
                "(n={}, D={}) vs (n={}, D={})",
                self.basis.n(),
                self.basis.max_degree(),
                other.basis.n(),
                other.basis.max_degree()
            )));
        }
        Ok(())
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let ring = &self.ring;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let take_b = |c: &R::Elem| if negate_other { ring.neg(c) } else { c.clone() };
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, take_b(&b[j].1)));
                j += 1;
            } else {
                let c = if negate_other { ring.sub(&a[i].1, &b[j].1) } else { ring.add(&a[i].1, &b[j].1) };
                if !ring.is_zero(&c) {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Self { ring: ring.clone(), basis: self.basis.clone(), terms: out }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.merge(other, false))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.merge(other, true))
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(r, c)| (*r, self.ring.neg(c))).collect();
        Self { ring: self.ring.clone(), basis: self.basis.clone(), terms }
    }

    pub fn scale(&self, s: &R::Elem) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(r, c)| (*r, self.ring.mul(c, s)))
            .filter(|(_, c)| !self.ring.is_zero(c))
            .collect();
        Self { ring: self.ring.clone(), basis: self.basis.clone(), terms }
    }

    pub(crate) fn mul_into(&self, other: &Self, acc: &mut Accumulator<R>) -> Self {
        let ring = &self.ring;
        let basis = &self.basis;
        let d = basis.max_degree();
        for (i, a) in &self.terms {
            let i = *i as usize;
            let limit = basis.count_upto(d - basis.degree(i)) as u32;
            let row = basis.product_row(i);
            for (j, b) in &other.terms {
                if *j >= limit {
                    break;
                }
                acc.mul_acc(ring, row[*j as usize] as usize, a, b);
            }
        }
        Self::from_sorted(ring, basis, acc.drain(ring))
    }

    /// Product truncated to total degree `≤ D`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.ring, &self.basis));
        }
        let mut acc = Accumulator::new(&self.ring, self.basis.len());
        Ok(self.mul_into(other, &mut acc))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::constant(&self.ring, &self.basis, self.ring.one());
        let mut base = self.clone();
        let mut scratch = Accumulator::new(&self.ring, self.basis.len());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_into(&base, &mut scratch);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_into(&base, &mut scratch);
            }
        }
        acc
    }

    /// Replaces `T_v` by `images[v]`; every image must have zero constant term.
    pub fn substitute(&self, images: &[Series<R>]) -> Result<Self> {
        Ok(substitute_many(&[self], images)?.pop().expect("one output"))
    }

    /// Coefficientwise map into another ring; zeros are dropped.
    pub fn map_coeffs<S: CoeffRing>(&self, target: &S, f: impl Fn(&R::Elem) -> S::Elem) -> Series<S> {
        let terms = self
            .terms
            .iter()
            .map(|(r, c)| (*r, f(c)))
            .filter(|(_, c)| !target.is_zero(c))
            .collect();
        Series { ring: target.clone(), basis: self.basis.clone(), terms }
    }

    /// Coefficientwise map that may fail.
    pub fn try_map_coeffs<S: CoeffRing, E>(
        &self,
        target: &S,
        mut f: impl FnMut(usize, &R::Elem) -> std::result::Result<S::Elem, E>,
    ) -> std::result::Result<Series<S>, E> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (r, c) in &self.terms {
            let v = f(*r as usize, c)?;
            if !target.is_zero(&v) {
                terms.push((*r, v));
            }
        }
        Ok(Series { ring: target.clone(), basis: self.basis.clone(), terms })
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(r, _)| self.basis.degree(*r as usize) == d)
            .cloned()
            .collect();
        Self { ring: self.ring.clone(), basis: self.basis.clone(), terms }
    }

    pub fn without_constant(&self) -> Self {
        let terms = self.terms.iter().filter(|(r, _)| *r != 0).cloned().collect();
        Self { ring: self.ring.clone(), basis: self.basis.clone(), terms }
    }

    /// `(monomial name, formatted coefficient)` pairs in graded-lex order.
    pub fn describe_terms(&self) -> Vec<(String, String)> {
        self.terms
            .iter()
            .map(|(r, c)| (self.basis.mono_name(*r as usize), self.ring.format_elem(c)))
            .collect()
    }
}

impl<R: CoeffRing> std::fmt::Display for Series<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .describe_terms()
            .into_iter()
            .map(|(m, c)| if m == "1" { c } else { format!("{c}*{m}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Substitutes `T_v ↦ images[v]` into each of `fs`, sharing the images of
/// monomials across the outputs. Monomial images are built degree by degree
/// and only the previous level is retained.
pub fn substitute_many<R: CoeffRing>(fs: &[&Series<R>], images: &[Series<R>]) -> Result<Vec<Series<R>>> {
    let Some(first) = fs.first() else {
        return Ok(Vec::new());
    };
    let ring = first.ring.clone();
    let basis = first.basis.clone();
    if images.len() != basis.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "{} substitution images for {} variables",
            images.len(),
            basis.nvars()
        )));
    }
    for f in fs {
        first.check_compatible(f)?;
    }
    for (v, img) in images.iter().enumerate() {
        first.check_compatible(img)?;
        if !ring.is_zero(&img.constant_term()) {
            return Err(Error::NonzeroConstantTerm(v));
        }
    }
    let len = basis.len();
    // which monomial images are needed, including the chains of parents
    let mut needed = vec![false; len];
    for f in fs {
        for (r, _) in &f.terms {
            needed[*r as usize] = true;
        }
    }
    let mut store = vec![false; len];
    for r in (1..len).rev() {
        if needed[r] {
            let parent = basis.parent(r).1;
            needed[parent] = true;
            store[parent] = true;
        }
    }
    // dense coefficient views of the inputs
    let mut coeff_of: Vec<Vec<Option<&R::Elem>>> = Vec::with_capacity(fs.len());
    for f in fs {
        let mut dense = vec![None; len];
        for (r, c) in &f.terms {
            dense[*r as usize] = Some(c);
        }
        coeff_of.push(dense);
    }
    let mut outs: Vec<Accumulator<R>> = fs.iter().map(|_| Accumulator::new(&ring, len)).collect();
    let one = ring.one();
    for (o, dense) in outs.iter_mut().zip(&coeff_of) {
        if let Some(c) = dense[0] {
            o.mul_acc(&ring, 0, c, &one);
        }
    }
    let mut scratch = Accumulator::new(&ring, len);
    let mut prev: std::collections::HashMap<usize, Series<R>> = std::collections::HashMap::new();
    prev.insert(0, Series::constant(&ring, &basis, ring.one()));
    for d in 1..=basis.max_degree() {
        let mut cur = std::collections::HashMap::new();
        for r in basis.count_upto(d - 1)..basis.count_upto(d) {
            if !needed[r] {
                continue;
            }
            let (v, parent) = basis.parent(r);
            let img = prev[&parent].mul_into(&images[v], &mut scratch);
            for (o, dense) in outs.iter_mut().zip(&coeff_of) {
                if let Some(c) = dense[r] {
                    for (k, t) in &img.terms {
                        o.mul_acc(&ring, *k as usize, c, t);
                    }
                }
            }
            if store[r] {
                cur.insert(r, img);
            }
        }
        prev = cur;
    }
    Ok(outs.iter_mut().map(|o| Series::from_sorted(&ring, &basis, o.drain(&ring))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ResidueRing;
    use crate::series::coeff::Rationals;

    fn t(basis: &Arc<MonomialBasis>, v: usize) -> Series<Rationals> {
        Series::var(&Rationals, basis, v)
    }

    fn c(basis: &Arc<MonomialBasis>, v: i64) -> Series<Rationals> {
        Series::from_int(&Rationals, basis, v)
    }

    #[test]
    fn product_examples() {
        let b = MonomialBasis::get(2, 2);
        let one = c(&b, 1);
        let t11 = t(&b, 0);
        let lhs = one.add(&t11).unwrap().mul(&one.sub(&t11).unwrap()).unwrap();
        let rhs = one.sub(&t11.mul(&t11).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert!(t11.mul(&Series::zero(&Rationals, &b)).unwrap().is_zero());
    }

    #[test]
    fn associativity_example() {
        let b = MonomialBasis::get(2, 3);
        let one = c(&b, 1);
        let f = one.add(&t(&b, 0)).unwrap();
        let g = one.add(&t(&b, 1)).unwrap();
        let h = one.add(&t(&b, 2)).unwrap();
        assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
    }

    #[test]
    fn pow_examples() {
        let b = MonomialBasis::get(1, 3);
        let x = c(&b, 1).add(&t(&b, 0)).unwrap();
        let cube = x.pow(3);
        let coeffs: Vec<String> = (0..4).map(|r| cube.coeff(r).to_string()).collect();
        assert_eq!(coeffs, ["1", "3", "3", "1"]);
        let b2 = MonomialBasis::get(2, 2);
        assert!(t(&b2, 1).pow(3).is_zero());
    }

    #[test]
    fn substitution_examples() {
        let b = MonomialBasis::get(2, 2);
        let f = t(&b, 0).mul(&t(&b, 0)).unwrap().add(&c(&b, 3)).unwrap();
        let ident: Vec<_> = (0..4).map(|v| t(&b, v)).collect();
        assert_eq!(f.substitute(&ident).unwrap(), f);

        let sq = t(&b, 0).mul(&t(&b, 0)).unwrap();
        let mut images = ident.clone();
        images[0] = t(&b, 0).add(&t(&b, 1)).unwrap();
        let got = sq.substitute(&images).unwrap();
        let s = t(&b, 0).add(&t(&b, 1)).unwrap();
        assert_eq!(got, s.mul(&s).unwrap());
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn power_map_composition() {
        // (1+T)^3 at T -> (1+T)^5 - 1 equals (1+T)^15, degree 4
        let b = MonomialBasis::get(1, 4);
        let x = c(&b, 1).add(&t(&b, 0)).unwrap();
        let img = x.pow(5).sub(&c(&b, 1)).unwrap();
        assert_eq!(x.pow(3).substitute(&[img]).unwrap(), x.pow(15));
    }

    #[test]
    fn nonzero_constant_image_rejected() {
        let b = MonomialBasis::get(1, 2);
        let x = c(&b, 1).add(&t(&b, 0)).unwrap();
        assert_eq!(x.substitute(&[x.clone()]), Err(Error::NonzeroConstantTerm(0)));
    }

    #[test]
    fn ring_mismatch() {
        let b = MonomialBasis::get(1, 2);
        let r3 = ResidueRing::new(3, 4).unwrap();
        let r5 = ResidueRing::new(5, 4).unwrap();
        let f = Series::var(&r3, &b, 0);
        let g = Series::var(&r5, &b, 0);
        assert!(matches!(f.mul(&g), Err(Error::RingMismatch(_))));
        let h = Series::var(&r3, &MonomialBasis::get(1, 3), 0);
        assert!(matches!(f.add(&h), Err(Error::RingMismatch(_))));
    }
}
