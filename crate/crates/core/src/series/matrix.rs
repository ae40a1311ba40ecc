use std::sync::Arc;

use super::basis::MonomialBasis;
use super::coeff::CoeffRing;
use super::series::{substitute_many, Accumulator, Series};
use crate::error::{Error, Result};

/// An n×n matrix over the truncated series ring in the n² variables `T_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSeries<R: CoeffRing> {
    n: usize,
    entries: Vec<Series<R>>,
}

impl<R: CoeffRing> MatrixSeries<R> {
    /// Row-major entries; all must share ring and basis, and the basis must
    /// have matrix dimension `n`.
    pub fn from_entries(n: usize, entries: Vec<Series<R>>) -> Result<Self> {
        if entries.len() != n * n || n == 0 {
            return Err(Error::DimensionMismatch(format!("{} entries for a {n}x{n} matrix", entries.len())));
        }
        if entries[0].basis().n() != n {
            return Err(Error::DimensionMismatch(format!(
                "basis for n={} used in a {n}x{n} matrix",
                entries[0].basis().n()
            )));
        }
        for e in &entries[1..] {
            entries[0].check_compatible(e)?;
        }
        Ok(Self { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Series<R>) -> Result<Self> {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::from_entries(n, entries)
    }

    pub fn zero(ring: &R, basis: &Arc<MonomialBasis>) -> Self {
        let n = basis.n();
        Self { n, entries: vec![Series::zero(ring, basis); n * n] }
    }

    pub fn identity(ring: &R, basis: &Arc<MonomialBasis>) -> Self {
        let n = basis.n();
        Self::from_fn(n, |i, j| Series::from_int(ring, basis, (i == j) as i64)).expect("shape")
    }

    /// Constant matrix from ring elements.
    pub fn constant(ring: &R, basis: &Arc<MonomialBasis>, rows: &[Vec<R::Elem>]) -> Result<Self> {
        let n = basis.n();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("constant matrix is not {n}x{n}")));
        }
        Self::from_fn(n, |i, j| Series::constant(ring, basis, rows[i][j].clone()))
    }

    /// The generic point `x = 1 + T`.
    pub fn coordinate(ring: &R, basis: &Arc<MonomialBasis>) -> Self {
        let n = basis.n();
        Self::from_fn(n, |i, j| {
            let t = Series::var(ring, basis, i * n + j);
            if i == j {
                t.add(&Series::from_int(ring, basis, 1)).expect("same ring")
            } else {
                t
            }
        })
        .expect("shape")
    }

    /// The variables `T_ij` as a matrix.
    pub fn variables(ring: &R, basis: &Arc<MonomialBasis>) -> Self {
        let n = basis.n();
        Self::from_fn(n, |i, j| Series::var(ring, basis, i * n + j)).expect("shape")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &R {
        self.entries[0].ring()
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        self.entries[0].basis()
    }

    pub fn get(&self, i: usize, j: usize) -> &Series<R> {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Series<R>] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Series<R>> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Series::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", self.n, self.n, other.n, other.n)));
        }
        self.entries[0].check_compatible(&other.entries[0])
    }

    fn zip(&self, other: &Self, f: impl Fn(&Series<R>, &Series<R>) -> Result<Series<R>>) -> Result<Self> {
        self.check(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect::<Result<_>>()?;
        Ok(Self { n: self.n, entries })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, Series::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, Series::sub)
    }

    pub fn neg(&self) -> Self {
        self.map(Series::neg)
    }

    pub fn scale(&self, s: &R::Elem) -> Self {
        self.map(|e| e.scale(s))
    }

    pub fn map(&self, f: impl Fn(&Series<R>) -> Series<R>) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    pub fn map_ring<S: CoeffRing>(&self, f: impl Fn(&Series<R>) -> Series<S>) -> MatrixSeries<S> {
        MatrixSeries { n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        Self { n, entries: (0..n * n).map(|k| self.entries[(k % n) * n + k / n].clone()).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.n;
        let ring = self.ring().clone();
        let basis = self.basis().clone();
        let mut acc = Accumulator::new(&ring, basis.len());
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // accumulate all n products into one buffer
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    let d = basis.max_degree();
                    for (ia, ca) in a.terms() {
                        let ia = *ia as usize;
                        let limit = basis.count_upto(d - basis.degree(ia)) as u32;
                        let row = basis.product_row(ia);
                        for (jb, cb) in b.terms() {
                            if *jb >= limit {
                                break;
                            }
                            acc.mul_acc(&ring, row[*jb as usize] as usize, ca, cb);
                        }
                    }
                }
                entries.push(Series::from_sorted(&ring, &basis, acc.drain(&ring)));
            }
        }
        Ok(Self { n, entries })
    }

    /// Matrix of constant terms.
    pub fn constant_term(&self) -> Vec<Vec<R::Elem>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).constant_term()).collect()).collect()
    }

    pub fn is_identity_at_zero(&self) -> bool {
        let ring = self.ring();
        let c = self.constant_term();
        (0..self.n).all(|i| (0..self.n).all(|j| c[i][j] == if i == j { ring.one() } else { ring.zero() }))
    }

    /// Minimal total degree carrying a nonzero coefficient; `None` for zero.
    pub fn lowest_nonzero_degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(Series::lowest_degree).min()
    }

    /// Inverse of `M(0)` followed by the geometric series in the positive part.
    pub fn inverse(&self) -> Result<Self> {
        let ring = self.ring().clone();
        let basis = self.basis().clone();
        let c0_inv = invert_constant(&ring, &self.constant_term()).ok_or(Error::SingularConstantTerm)?;
        let c0_inv = Self::constant(&ring, &basis, &c0_inv)?;
        let positive = self.map(Series::without_constant);
        let g = c0_inv.mul(&positive)?.neg();
        let mut acc = Self::identity(&ring, &basis);
        let mut term = acc.clone();
        for _ in 0..basis.max_degree() {
            term = term.mul(&g)?;
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term)?;
        }
        acc.mul(&c0_inv)
    }

    /// Entrywise substitution `T_v ↦ images[v]`.
    pub fn substitute(&self, images: &[Series<R>]) -> Result<Self> {
        let refs: Vec<&Series<R>> = self.entries.iter().collect();
        Ok(Self { n: self.n, entries: substitute_many(&refs, images)? })
    }

    pub fn entrywise_pow(&self, e: u64) -> Self {
        self.map(|s| s.pow(e))
    }

    /// Whether `self^t == eps * self`.
    pub fn is_eps_symmetric(&self, eps: i8) -> bool {
        let t = self.transpose();
        if eps > 0 {
            t == *self
        } else {
            t == self.neg()
        }
    }
}

/// Gauss-Jordan inversion of a constant matrix, pivoting on units.
pub fn invert_constant<R: CoeffRing>(ring: &R, m: &[Vec<R::Elem>]) -> Option<Vec<Vec<R::Elem>>> {
    let n = m.len();
    let mut a: Vec<Vec<R::Elem>> = m.to_vec();
    let mut inv: Vec<Vec<R::Elem>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect()).collect();
    for col in 0..n {
        let (piv, piv_inv) = (col..n).find_map(|r| ring.inv(&a[r][col]).map(|iv| (r, iv)))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        for j in 0..n {
            a[col][j] = ring.mul(&a[col][j], &piv_inv);
            inv[col][j] = ring.mul(&inv[col][j], &piv_inv);
        }
        for r in 0..n {
            if r == col || ring.is_zero(&a[r][col]) {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = ring.mul(&f, &a[col][j]);
                a[r][j] = ring.sub(&a[r][j], &t);
                let t = ring.mul(&f, &inv[col][j]);
                inv[r][j] = ring.sub(&inv[r][j], &t);
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rational::int;
    use crate::series::coeff::Rationals;

    #[test]
    fn identity_and_transpose() {
        let b = MonomialBasis::get(2, 2);
        let x = MatrixSeries::coordinate(&Rationals, &b);
        let id = MatrixSeries::identity(&Rationals, &b);
        assert_eq!(id.mul(&x).unwrap(), x);
        assert_eq!(x.transpose().transpose(), x);
        assert_eq!(x.lowest_nonzero_degree(), Some(0));
        assert_eq!(MatrixSeries::zero(&Rationals, &b).lowest_nonzero_degree(), None);
    }

    #[test]
    fn lowest_degree_of_single_entry() {
        let b = MonomialBasis::get(2, 3);
        let m = MatrixSeries::from_fn(2, |i, j| {
            if (i, j) == (0, 0) {
                Series::var(&Rationals, &b, 1)
            } else {
                Series::zero(&Rationals, &b)
            }
        })
        .unwrap();
        assert_eq!(m.lowest_nonzero_degree(), Some(1));
    }

    #[test]
    fn geometric_series_inverse() {
        let b = MonomialBasis::get(1, 3);
        let x = MatrixSeries::coordinate(&Rationals, &b);
        let inv = x.inverse().unwrap();
        let coeffs: Vec<String> = (0..4).map(|r| inv.get(0, 0).coeff(r).to_string()).collect();
        assert_eq!(coeffs, ["1", "-1", "1", "-1"]);
        let id = MatrixSeries::identity(&Rationals, &b);
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn singular_constant_rejected() {
        let b = MonomialBasis::get(2, 2);
        let t = MatrixSeries::variables(&Rationals, &b);
        assert_eq!(t.inverse(), Err(Error::SingularConstantTerm));
    }

    #[test]
    fn constant_inverse_with_pivoting() {
        let m = vec![vec![int(0), int(1)], vec![int(-1), int(0)]];
        let inv = invert_constant(&Rationals, &m).unwrap();
        assert_eq!(inv, vec![vec![int(0), int(-1)], vec![int(1), int(0)]]);
    }
}
