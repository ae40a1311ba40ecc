//! Classical linear connections over polynomial coefficients: curvature
//! `F_ij`, the Chern connection and the Levi-Civita connection of a metric.
//!
//! Polynomials stand in for smooth functions; every identity checked here is
//! polynomial, and lowered Christoffel symbols avoid inverting `q`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::rational::format_rational;
use crate::ring::Rational;

/// A polynomial in `x_1..x_m` with rational coefficients, in expanded form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch(format!("exponent vector of length {} in {nvars} variables", e.len())));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// `∂/∂x_i`.
    pub fn deriv(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * Rational::from_integer(e[i].into()));
            }
        }
        out
    }

    /// The same polynomial in `nvars + extra` variables.
    pub fn widen(&self, extra: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2.resize(self.nvars + extra, 0);
                (e2, c.clone())
            })
            .collect();
        Self { nvars: self.nvars + extra, terms }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{k}", i + 1) })
                    .collect();
                if mono.is_empty() {
                    format_rational(c)
                } else {
                    format!("{}*{}", format_rational(c), mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub type PolyMatrix = Vec<Vec<Poly>>;

fn mat_zero(nvars: usize, n: usize) -> PolyMatrix {
    vec![vec![Poly::zero(nvars); n]; n]
}

pub fn mat_mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let n = a.len();
    let nvars = a[0][0].nvars();
    let mut out = mat_zero(nvars, n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j]));
            }
        }
    }
    out
}

fn mat_zip(a: &PolyMatrix, b: &PolyMatrix, f: impl Fn(&Poly, &Poly) -> Poly) -> PolyMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| f(x, y)).collect()).collect()
}

fn mat_map(a: &PolyMatrix, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
    a.iter().map(|r| r.iter().map(&f).collect()).collect()
}

fn transpose(a: &PolyMatrix) -> PolyMatrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].clone()).collect()).collect()
}

fn check_square(a: &PolyMatrix, n: usize, nvars: usize) -> Result<()> {
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("expected a {n}x{n} matrix")));
    }
    if a.iter().flatten().any(|p| p.nvars() != nvars) {
        return Err(Error::DimensionMismatch(format!("entries must be polynomials in {nvars} variables")));
    }
    Ok(())
}

/// A linear connection `δ_i x = A_i x` on `GL_n` over `Q[x_1..x_m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConn {
    m: usize,
    n: usize,
    a: Vec<PolyMatrix>,
}

impl LinearConn {
    pub fn new(m: usize, n: usize, a: Vec<PolyMatrix>) -> Result<Self> {
        if a.len() != m || n == 0 {
            return Err(Error::DimensionMismatch(format!("expected {m} matrices, got {}", a.len())));
        }
        for ai in &a {
            check_square(ai, n, m)?;
        }
        Ok(Self { m, n, a })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self, i: usize) -> &PolyMatrix {
        &self.a[i]
    }

    /// Christoffel matrices `Γ_i = −A_iᵗ`.
    pub fn christoffel(&self) -> Vec<PolyMatrix> {
        self.a.iter().map(|ai| mat_map(&transpose(ai), Poly::neg)).collect()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.m {
            return Err(Error::IndexOutOfRange(format!("direction {i} with m = {}", self.m)));
        }
        Ok(())
    }
}

/// `F_ij = ∂_i A_j − ∂_j A_i − [A_i, A_j]` (indices from 0).
pub fn curvature_f(conn: &LinearConn, i: usize, j: usize) -> Result<PolyMatrix> {
    conn.check_index(i)?;
    conn.check_index(j)?;
    let (ai, aj) = (&conn.a[i], &conn.a[j]);
    let d = mat_zip(&mat_map(aj, |p| p.deriv(i)), &mat_map(ai, |p| p.deriv(j)), Poly::sub);
    let bracket = mat_zip(&mat_mul(ai, aj), &mat_mul(aj, ai), Poly::sub);
    Ok(mat_zip(&d, &bracket, Poly::sub))
}

/// Variable index of the matrix entry `x_kl` in the extended ring `Q[x_1..x_m, X_11..X_nn]`.
fn entry_var(conn: &LinearConn, k: usize, l: usize) -> usize {
    conn.m + k * conn.n + l
}

fn entry_matrix(conn: &LinearConn) -> PolyMatrix {
    let nv = conn.m + conn.n * conn.n;
    (0..conn.n).map(|k| (0..conn.n).map(|l| Poly::var(nv, entry_var(conn, k, l))).collect()).collect()
}

/// The derivation `δ_i` on `Q[x_1..x_m, X]`: coefficient differentiation plus `δ_i X = A_i X`.
pub fn apply_derivation(conn: &LinearConn, i: usize, f: &Poly) -> Result<Poly> {
    conn.check_index(i)?;
    let n = conn.n;
    let nv = conn.m + n * n;
    if f.nvars() != nv {
        return Err(Error::DimensionMismatch(format!("expected {nv} variables")));
    }
    let ai = mat_map(&conn.a[i], |p| p.widen(n * n));
    let ax = mat_mul(&ai, &entry_matrix(conn));
    let mut out = f.deriv(i);
    for k in 0..n {
        for l in 0..n {
            out = out.add(&f.deriv(entry_var(conn, k, l)).mul(&ax[k][l]));
        }
    }
    Ok(out)
}

/// Whether `[δ_i, δ_j] X = F_ij X` holds identically.
pub fn check_operator_identity(conn: &LinearConn, i: usize, j: usize) -> Result<bool> {
    let x = entry_matrix(conn);
    let f = mat_map(&curvature_f(conn, i, j)?, |p| p.widen(conn.n * conn.n));
    let fx = mat_mul(&f, &x);
    for k in 0..conn.n {
        for l in 0..conn.n {
            let lhs = apply_derivation(conn, i, &apply_derivation(conn, j, &x[k][l])?)?
                .sub(&apply_derivation(conn, j, &apply_derivation(conn, i, &x[k][l])?)?);
            if lhs != fx[k][l] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An `n×n` polynomial matrix over `Q[x_1..x_m]` with declared symmetry `ε`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricPoly {
    m: usize,
    q: PolyMatrix,
    epsilon: i8,
}

impl MetricPoly {
    pub fn new(m: usize, q: PolyMatrix, epsilon: i8) -> Result<Self> {
        let n = q.len();
        check_square(&q, n, m)?;
        if n == 0 || (epsilon != 1 && epsilon != -1) {
            return Err(Error::InvalidForm("need n >= 1 and epsilon = +-1".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let t = if epsilon > 0 { q[j][i].clone() } else { q[j][i].neg() };
                if q[i][j] != t {
                    return Err(Error::SymmetryViolation(format!("entries ({i},{j}) and ({j},{i})")));
                }
            }
        }
        Ok(Self { m, q, epsilon })
    }

    pub fn symmetric(m: usize, q: PolyMatrix) -> Result<Self> {
        Self::new(m, q, 1)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &PolyMatrix {
        &self.q
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    fn require_symmetric(&self) -> Result<()> {
        if self.epsilon < 0 {
            return Err(Error::SymmetryViolation("a symmetric metric is required".into()));
        }
        Ok(())
    }
}

/// Lowered Christoffel symbols `Γ_ijk`, `i` a direction and `j, k` bundle indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Christoffel {
    m: usize,
    n: usize,
    g: Vec<Poly>,
}

impl Christoffel {
    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize, usize) -> Poly) -> Self {
        let mut g = Vec::with_capacity(m * n * n);
        for i in 0..m {
            for j in 0..n {
                for k in 0..n {
                    g.push(f(i, j, k));
                }
            }
        }
        Self { m, n, g }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Poly {
        &self.g[(i * self.n + j) * self.n + k]
    }

    pub fn is_zero(&self) -> bool {
        self.g.iter().all(Poly::is_zero)
    }

    fn indices(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let (m, n) = (self.m, self.n);
        (0..m).flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
    }
}

/// `Γ_ijk = ½ ∂_i q_jk`.
pub fn chern_classical(q: &MetricPoly) -> Result<Christoffel> {
    q.require_symmetric()?;
    let half = Rational::new(1.into(), 2.into());
    Ok(Christoffel::from_fn(q.m, q.n(), |i, j, k| q.q[j][k].deriv(i).scale(&half)))
}

/// `Γ_kij = ½ (∂_k q_ij + ∂_i q_jk − ∂_j q_ki)`, for `m = n`.
pub fn levi_civita_classical(q: &MetricPoly) -> Result<Christoffel> {
    q.require_symmetric()?;
    if q.m != q.n() {
        return Err(Error::DimensionMismatch(format!("m = {} but n = {}", q.m, q.n())));
    }
    let half = Rational::new(1.into(), 2.into());
    let qq = &q.q;
    Ok(Christoffel::from_fn(q.m, q.n(), |k, i, j| {
        qq[i][j].deriv(k).add(&qq[j][k].deriv(i)).sub(&qq[k][i].deriv(j)).scale(&half)
    }))
}

/// `q` is parallel: `∂_i q_jk = Γ_ijk + Γ_ikj`.
pub fn is_parallel(q: &MetricPoly, g: &Christoffel) -> bool {
    g.indices().all(|(i, j, k)| q.q[j][k].deriv(i) == g.get(i, j, k).add(g.get(i, k, j)))
}

/// `Γ_ijk = Γ_ikj`.
pub fn is_bundle_symmetric(g: &Christoffel) -> bool {
    g.indices().all(|(i, j, k)| g.get(i, j, k) == g.get(i, k, j))
}

/// `Γ_ijk = Γ_jik` (requires `m = n`).
pub fn is_torsion_free(g: &Christoffel) -> bool {
    g.m == g.n && g.indices().all(|(i, j, k)| g.get(i, j, k) == g.get(j, i, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondCondition {
    BundleSymmetric,
    TorsionFree,
}

/// Solves parallelism plus the second condition as a linear system in the
/// unknown coefficients of `Γ`, one monomial at a time.
///
/// Returns `None` when the solution is not unique or does not exist.
pub fn solve_christoffel(q: &MetricPoly, cond: SecondCondition) -> Option<Christoffel> {
    let (m, n) = (q.m, q.n());
    if cond == SecondCondition::TorsionFree && m != n {
        return None;
    }
    let unknowns = m * n * n;
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let derivs: Vec<Poly> = (0..m)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .map(|(i, j, k)| q.q[j][k].deriv(i))
        .collect();
    let mut monos: Vec<Vec<u32>> = derivs.iter().flat_map(|p| p.terms().keys().cloned()).collect();
    monos.sort();
    monos.dedup();

    let mut rows: Vec<(Vec<Rational>, usize)> = Vec::new();
    for i in 0..m {
        for j in 0..n {
            for k in 0..n {
                let mut r = vec![Rational::zero(); unknowns];
                r[idx(i, j, k)] += Rational::one();
                r[idx(i, k, j)] += Rational::one();
                rows.push((r, idx(i, j, k)));
            }
        }
    }
    let mut homogeneous: Vec<Vec<Rational>> = Vec::new();
    for i in 0..m {
        for j in 0..n {
            for k in 0..n {
                let other = match cond {
                    SecondCondition::BundleSymmetric => idx(i, k, j),
                    SecondCondition::TorsionFree => idx(j, i, k),
                };
                let mut r = vec![Rational::zero(); unknowns];
                r[idx(i, j, k)] += Rational::one();
                r[other] -= Rational::one();
                homogeneous.push(r);
            }
        }
    }

    let mut solution = vec![Poly::zero(m); unknowns];
    for mono in &monos {
        let mut system: Vec<Vec<Rational>> = Vec::new();
        for (r, d) in &rows {
            let rhs = derivs[*d].terms().get(mono).cloned().unwrap_or_else(Rational::zero);
            let mut row = r.clone();
            row.push(rhs);
            system.push(row);
        }
        for r in &homogeneous {
            let mut row = r.clone();
            row.push(Rational::zero());
            system.push(row);
        }
        let values = gauss_unique(system, unknowns)?;
        for (u, v) in values.into_iter().enumerate() {
            solution[u] = solution[u].add(&Poly::from_terms(m, [(mono.clone(), v)]).expect("arity"));
        }
    }
    if monos.is_empty() {
        let zero_system: Vec<Vec<Rational>> = rows
            .iter()
            .map(|(r, _)| r.clone())
            .chain(homogeneous.iter().cloned())
            .map(|mut r| {
                r.push(Rational::zero());
                r
            })
            .collect();
        gauss_unique(zero_system, unknowns)?;
    }
    Some(Christoffel { m, n, g: solution })
}

/// Unique solution of an augmented system, or `None`.
fn gauss_unique(mut a: Vec<Vec<Rational>>, cols: usize) -> Option<Vec<Rational>> {
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let r = (pivot_row..a.len()).find(|&r| !a[r][c].is_zero())?;
        a.swap(pivot_row, r);
        let inv = a[pivot_row][c].recip();
        for x in a[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..a.len() {
            if r != pivot_row && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for cc in c..=cols {
                    let t = &f * &a[pivot_row][cc];
                    a[r][cc] -= t;
                }
            }
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    if a[pivot_row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&r| a[r][cols].clone()).collect())
}

/// A random polynomial in `nvars` variables of total degree at most `deg`.
pub fn random_poly<G: Rng>(rng: &mut G, nvars: usize, deg: u32) -> Poly {
    let mut p = Poly::zero(nvars);
    for _ in 0..rng.gen_range(1..=4) {
        let mut e = vec![0u32; nvars];
        for _ in 0..rng.gen_range(0..=deg) {
            e[rng.gen_range(0..nvars)] += 1;
        }
        let c = Rational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=3).into());
        p.add_term(e, c);
    }
    p
}

pub fn random_conn<G: Rng>(rng: &mut G, m: usize, n: usize, deg: u32) -> LinearConn {
    let a = (0..m)
        .map(|_| (0..n).map(|_| (0..n).map(|_| random_poly(rng, m, deg)).collect()).collect())
        .collect();
    LinearConn::new(m, n, a).expect("consistent shapes")
}

pub fn random_metric<G: Rng>(rng: &mut G, m: usize, n: usize, deg: u32) -> MetricPoly {
    let mut q = mat_zero(m, n);
    for i in 0..n {
        for j in i..n {
            let p = random_poly(rng, m, deg);
            q[i][j] = p.clone();
            q[j][i] = p;
        }
    }
    MetricPoly::symmetric(m, q).expect("symmetric by construction")
}

/// Counts of randomized inputs on which each classical identity held.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassicalSuite {
    pub samples: usize,
    /// Parallelism and bundle symmetry of the Chern symbols, plus uniqueness.
    pub chern: usize,
    /// Parallelism and torsion-freeness of the Levi-Civita symbols, plus uniqueness.
    pub levi_civita: usize,
    /// `[δ_i, δ_j] X = F_ij X` and `F_ij = −F_ji` for all `i, j`.
    pub curvature: usize,
}

impl ClassicalSuite {
    pub fn all_hold(&self) -> bool {
        self.chern == self.samples && self.levi_civita == self.samples && self.curvature == self.samples
    }
}

/// Checks every classical identity on `samples` random inputs with
/// `2 ≤ m, n ≤ 3` and coefficient degree at most 2.
pub fn classical_suite(samples: usize, seed: u64) -> Result<ClassicalSuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ClassicalSuite { samples, ..Default::default() };
    for _ in 0..samples {
        let (m, n) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let q = random_metric(&mut rng, m, n, 2);
        let g = chern_classical(&q)?;
        if is_parallel(&q, &g)
            && is_bundle_symmetric(&g)
            && solve_christoffel(&q, SecondCondition::BundleSymmetric).as_ref() == Some(&g)
        {
            out.chern += 1;
        }
        let q = random_metric(&mut rng, m, m, 2);
        let g = levi_civita_classical(&q)?;
        if is_parallel(&q, &g) && is_torsion_free(&g) && solve_christoffel(&q, SecondCondition::TorsionFree).as_ref() == Some(&g) {
            out.levi_civita += 1;
        }
        let conn = random_conn(&mut rng, m, n, 2);
        let mut ok = true;
        for i in 0..m {
            for j in 0..m {
                let fij = curvature_f(&conn, i, j)?;
                let fji = curvature_f(&conn, j, i)?;
                ok &= fij == mat_map(&fji, Poly::neg);
                if i < j {
                    ok &= check_operator_identity(&conn, i, j)?;
                }
            }
        }
        if ok {
            out.curvature += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rational::int;

    fn c(nv: usize, v: i64) -> Poly {
        Poly::constant(nv, int(v))
    }

    #[test]
    fn poly_arithmetic() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.add(&y).mul(&x.sub(&y));
        assert_eq!(p, x.mul(&x).sub(&y.mul(&y)));
        assert_eq!(p.deriv(0), x.scale(&int(2)));
        assert_eq!(p.degree(), Some(2));
        assert!(p.sub(&p).is_zero());
        assert_eq!(x.add(&c(2, 1)).to_string(), "1 + 1*x1");
    }

    #[test]
    fn commuting_constants_are_flat() {
        let a = vec![vec![c(2, 1), c(2, 2)], vec![c(2, 0), c(2, 3)]];
        let conn = LinearConn::new(2, 2, vec![a.clone(), a]).unwrap();
        let f = curvature_f(&conn, 0, 1).unwrap();
        assert!(f.iter().flatten().all(Poly::is_zero));
    }

    #[test]
    fn nilpotent_example() {
        let z = Poly::zero(2);
        let a1 = vec![vec![z.clone(), Poly::var(2, 1)], vec![z.clone(), z.clone()]];
        let a2 = vec![vec![z.clone(), z.clone()], vec![z.clone(), z.clone()]];
        let conn = LinearConn::new(2, 2, vec![a1, a2]).unwrap();
        let f = curvature_f(&conn, 0, 1).unwrap();
        assert_eq!(f, vec![vec![z.clone(), c(2, -1)], vec![z.clone(), z.clone()]]);
        assert!(check_operator_identity(&conn, 0, 1).unwrap());
        assert!(curvature_f(&conn, 0, 2).is_err());
    }

    #[test]
    fn chern_example() {
        let q = vec![vec![c(1, 1).add(&Poly::var(1, 0)), c(1, 0)], vec![c(1, 0), c(1, 1)]];
        let q = MetricPoly::symmetric(1, q).unwrap();
        let g = chern_classical(&q).unwrap();
        assert_eq!(g.get(0, 0, 0), &Poly::constant(1, Rational::new(1.into(), 2.into())));
        assert!(g.get(0, 0, 1).is_zero() && g.get(0, 1, 0).is_zero() && g.get(0, 1, 1).is_zero());
        assert!(is_parallel(&q, &g) && is_bundle_symmetric(&g));
        assert_eq!(solve_christoffel(&q, SecondCondition::BundleSymmetric), Some(g));
    }

    #[test]
    fn levi_civita_example() {
        let q = vec![vec![c(2, 1).add(&Poly::var(2, 1)), c(2, 0)], vec![c(2, 0), c(2, 1)]];
        let q = MetricPoly::symmetric(2, q).unwrap();
        let g = levi_civita_classical(&q).unwrap();
        // Γ_112 with 1-based indices
        assert_eq!(g.get(0, 0, 1), &Poly::constant(2, Rational::new((-1).into(), 2.into())));
        assert!(is_parallel(&q, &g) && is_torsion_free(&g));
        assert_eq!(solve_christoffel(&q, SecondCondition::TorsionFree), Some(g));
    }

    #[test]
    fn constant_metric_has_zero_symbols() {
        let q = MetricPoly::symmetric(2, vec![vec![c(2, 2), c(2, 1)], vec![c(2, 1), c(2, 1)]]).unwrap();
        assert!(chern_classical(&q).unwrap().is_zero());
        assert!(levi_civita_classical(&q).unwrap().is_zero());
    }

    #[test]
    fn randomized_suite_holds() {
        let s = classical_suite(5, 7).unwrap();
        assert!(s.all_hold(), "{s:?}");
    }

    #[test]
    fn validation() {
        let bad = vec![vec![c(1, 1), c(1, 2)], vec![c(1, 3), c(1, 1)]];
        assert!(matches!(MetricPoly::symmetric(1, bad), Err(Error::SymmetryViolation(_))));
        let anti = MetricPoly::new(1, vec![vec![c(1, 0), c(1, 1)], vec![c(1, -1), c(1, 0)]], -1).unwrap();
        assert!(chern_classical(&anti).is_err());
        let q = MetricPoly::symmetric(1, vec![vec![c(1, 1), c(1, 0)], vec![c(1, 0), c(1, 1)]]).unwrap();
        assert!(matches!(levi_civita_classical(&q), Err(Error::DimensionMismatch(_))));
    }
}
