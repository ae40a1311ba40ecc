//! Monomials in the n² variables `T_ij`, truncated at total degree D.
//!
//! Monomials are ranked in graded-lex order: by total degree first, then
//! lexicographically descending exponent vectors, variables in row-major
//! order `T_11, T_12, …, T_nn`. Since lower degrees come first, the
//! monomials of degree `≤ d` form a prefix of the ranking, which the
//! product kernel relies on.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonoIndex {
    pub exponents: Vec<u32>,
}

impl MonoIndex {
    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

pub struct MonomialBasis {
    n: usize,
    nvars: usize,
    max_degree: u32,
    exps: Vec<u8>,
    degrees: Vec<u8>,
    /// `deg_end[d]` = number of monomials of degree `≤ d`.
    deg_end: Vec<usize>,
    lookup: HashMap<Box<[u8]>, u32>,
    /// `products[i][j]` = rank of `m_i * m_j` for all `j` with
    /// `deg(m_i) + deg(m_j) ≤ D`.
    products: Vec<Box<[u32]>>,
    /// For nonconstant monomials: the first variable present and the rank of
    /// the monomial divided by it.
    parents: Vec<(u32, u32)>,
}

impl fmt::Debug for MonomialBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonomialBasis")
            .field("n", &self.n)
            .field("max_degree", &self.max_degree)
            .field("len", &self.len())
            .finish()
    }
}

fn push_compositions(nvars: usize, degree: u32, prefix: &mut Vec<u8>, out: &mut Vec<u8>) {
    if prefix.len() + 1 == nvars {
        prefix.push(degree as u8);
        out.extend_from_slice(prefix);
        prefix.pop();
        return;
    }
    for e in (0..=degree).rev() {
        prefix.push(e as u8);
        push_compositions(nvars, degree - e, prefix, out);
        prefix.pop();
    }
}

impl MonomialBasis {
    fn build(n: usize, max_degree: u32) -> Self {
        assert!(n >= 1, "matrix dimension must be positive");
        let nvars = n * n;
        let mut exps = Vec::new();
        let mut deg_end = Vec::new();
        for d in 0..=max_degree {
            push_compositions(nvars, d, &mut Vec::with_capacity(nvars), &mut exps);
            deg_end.push(exps.len() / nvars);
        }
        let len = exps.len() / nvars;
        let mut degrees = Vec::with_capacity(len);
        let mut lookup = HashMap::with_capacity(len);
        for r in 0..len {
            let e = &exps[r * nvars..(r + 1) * nvars];
            degrees.push(e.iter().map(|&x| x as u32).sum::<u32>() as u8);
            lookup.insert(e.to_vec().into_boxed_slice(), r as u32);
        }
        let mut scratch = vec![0u8; nvars];
        let mut products = Vec::with_capacity(len);
        let mut parents = Vec::with_capacity(len);
        for i in 0..len {
            let ei = &exps[i * nvars..(i + 1) * nvars];
            let limit = deg_end[(max_degree - degrees[i] as u32) as usize];
            let row: Vec<u32> = (0..limit)
                .map(|j| {
                    let ej = &exps[j * nvars..(j + 1) * nvars];
                    for v in 0..nvars {
                        scratch[v] = ei[v] + ej[v];
                    }
                    lookup[&scratch[..]]
                })
                .collect();
            products.push(row.into_boxed_slice());
            match ei.iter().position(|&x| x > 0) {
                Some(v) => {
                    scratch.copy_from_slice(ei);
                    scratch[v] -= 1;
                    parents.push((v as u32, lookup[&scratch[..]]));
                }
                None => parents.push((0, 0)),
            }
        }
        Self { n, nvars, max_degree, exps, degrees, deg_end, lookup, products, parents }
    }

    /// Shared basis for matrix dimension `n` and truncation degree `max_degree`.
    pub fn get(n: usize, max_degree: u32) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().expect("basis cache poisoned");
        guard
            .entry((n, max_degree))
            .or_insert_with(|| Arc::new(Self::build(n, max_degree)))
            .clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn exponents(&self, rank: usize) -> &[u8] {
        &self.exps[rank * self.nvars..(rank + 1) * self.nvars]
    }

    pub fn degree(&self, rank: usize) -> u32 {
        self.degrees[rank] as u32
    }

    /// Number of monomials of total degree `≤ d`.
    pub fn count_upto(&self, d: u32) -> usize {
        self.deg_end[d.min(self.max_degree) as usize]
    }

    pub fn rank_of(&self, exps: &[u8]) -> Option<usize> {
        self.lookup.get(exps).map(|&r| r as usize)
    }

    pub fn rank(&self, mono: &MonoIndex) -> Option<usize> {
        if mono.exponents.len() != self.nvars || mono.exponents.iter().any(|&e| e > u8::MAX as u32) {
            return None;
        }
        let e: Vec<u8> = mono.exponents.iter().map(|&x| x as u8).collect();
        self.rank_of(&e)
    }

    pub fn mono(&self, rank: usize) -> MonoIndex {
        MonoIndex { exponents: self.exponents(rank).iter().map(|&x| x as u32).collect() }
    }

    /// Rank of the variable `T_v` (degree-1 monomial).
    pub fn var_rank(&self, v: usize) -> usize {
        debug_assert!(v < self.nvars && self.max_degree >= 1);
        1 + v
    }

    #[inline]
    pub(crate) fn product_row(&self, i: usize) -> &[u32] {
        &self.products[i]
    }

    pub(crate) fn parent(&self, rank: usize) -> (usize, usize) {
        let (v, p) = self.parents[rank];
        (v as usize, p as usize)
    }

    /// Human-readable name of a monomial, e.g. `T11^2*T12`; `1` for the constant.
    pub fn mono_name(&self, rank: usize) -> String {
        let parts: Vec<String> = self
            .exponents(rank)
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| {
                let name = var_name(self.n, v);
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

pub fn var_name(n: usize, v: usize) -> String {
    let (i, j) = (v / n + 1, v % n + 1);
    if n < 10 {
        format!("T{i}{j}")
    } else {
        format!("T{i}_{j}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn sizes_match_binomials() {
        for (n, d) in [(1, 6), (2, 4), (3, 4), (4, 4)] {
            let b = MonomialBasis::get(n, d);
            assert_eq!(b.len(), binom(n * n + d as usize, d as usize), "n={n} d={d}");
        }
        assert_eq!(MonomialBasis::get(4, 4).len(), 4845);
    }

    #[test]
    fn graded_lex_order() {
        let b = MonomialBasis::get(2, 2);
        let names: Vec<String> = (0..b.len()).map(|r| b.mono_name(r)).collect();
        assert_eq!(&names[..6], &["1", "T11", "T12", "T21", "T22", "T11^2"]);
        assert_eq!(names[6], "T11*T12");
        assert_eq!(names.last().unwrap(), "T22^2");
        for r in 1..b.len() {
            assert!(b.degree(r - 1) <= b.degree(r));
        }
    }

    #[test]
    fn products_and_parents_consistent() {
        let b = MonomialBasis::get(2, 3);
        for i in 0..b.len() {
            for (j, &k) in b.product_row(i).iter().enumerate() {
                let k = k as usize;
                for v in 0..4 {
                    assert_eq!(b.exponents(k)[v], b.exponents(i)[v] + b.exponents(j)[v]);
                }
            }
            if i > 0 {
                let (v, parent) = b.parent(i);
                assert_eq!(b.product_row(parent)[b.var_rank(v)] as usize, i);
            }
        }
    }

    #[test]
    fn rank_roundtrip() {
        let b = MonomialBasis::get(3, 3);
        for r in 0..b.len() {
            assert_eq!(b.rank(&b.mono(r)), Some(r));
        }
        assert_eq!(b.rank(&MonoIndex { exponents: vec![4, 0, 0, 0, 0, 0, 0, 0, 0] }), None);
    }
}
