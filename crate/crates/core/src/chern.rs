//! The arithmetic Chern connection attached to an (anti)symmetric form `q`:
//! the Frobenius lift `Λ_p = φ_p(x)` expanded at `x = 1 + T`, solved by
//! linear Hensel lifting from `Λ ≡ x^(p) (mod p)`.
//!
//! The lift is characterized by two identities over `Z_p[[T]]` (truncated):
//!
//! * (I)   `Λᵗ q^φ Λ = ((xᵗ q x)_ij^p)_ij`
//! * (II′) `s := (x^(p))ᵗ q^φ Λ` satisfies `s = ε sᵗ`
//!
//! where `x^(p)` is the entrywise p-th power and `ε = ±1` the symmetry of `q`.
//! Writing `Λ_{k+1} = Λ_k + p^k E`, both identities become linear in `E`
//! modulo `p`, with the unique solution `E = ((x^(p))ᵗ q^φ)^{-1} (ρ₁ − ρ₂)/2`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::arith::{is_prime, legendre, prime_power, reduce_rational};
use crate::ring::rational::{format_rational, int};
use crate::ring::{Rational, ResidueRing};
use crate::series::{CoeffRing, MatrixSeries, MonomialBasis, Rationals, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormKind {
    /// `[[0, 1_r], [-1_r, 0]]`
    SplitSp { r: usize },
    /// `[[0, 1_r], [1_r, 0]]`
    SplitSoEven { r: usize },
    /// `[[1, 0, 0], [0, 0, 1_r], [0, 1_r, 0]]`
    SplitSoOdd { r: usize },
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormSpec {
    n: usize,
    epsilon: i8,
    q: Vec<Vec<Rational>>,
    kind: FormKind,
}

fn det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            let f = &a[r][col] / &p;
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
            }
        }
    }
    det
}

impl FormSpec {
    fn block(n: usize, kind: FormKind, epsilon: i8, f: impl Fn(usize, usize) -> i64) -> Self {
        let q = (0..n).map(|i| (0..n).map(|j| int(f(i, j))).collect()).collect();
        Self { n, epsilon, q, kind }
    }

    pub fn split_sp(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidForm("sp(2r) needs r >= 1".into()));
        }
        Ok(Self::block(2 * r, FormKind::SplitSp { r }, -1, |i, j| {
            if j == i + r {
                1
            } else if i == j + r {
                -1
            } else {
                0
            }
        }))
    }

    pub fn split_so_even(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidForm("so(2r) needs r >= 1".into()));
        }
        Ok(Self::block(2 * r, FormKind::SplitSoEven { r }, 1, |i, j| (j == i + r || i == j + r) as i64))
    }

    pub fn split_so_odd(r: usize) -> Result<Self> {
        Ok(Self::block(2 * r + 1, FormKind::SplitSoOdd { r }, 1, |i, j| {
            if i == 0 || j == 0 {
                (i == j) as i64
            } else {
                (j == i + r || i == j + r) as i64
            }
        }))
    }

    /// Any invertible symmetric or antisymmetric rational matrix.
    pub fn custom(q: Vec<Vec<Rational>>) -> Result<Self> {
        let n = q.len();
        if n == 0 || q.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidForm("q must be a nonempty square matrix".into()));
        }
        let symmetric = (0..n).all(|i| (0..n).all(|j| q[i][j] == q[j][i]));
        let antisymmetric = (0..n).all(|i| (0..n).all(|j| q[i][j] == -&q[j][i]));
        let epsilon = match (symmetric, antisymmetric) {
            (true, _) => 1,
            (false, true) => -1,
            _ => return Err(Error::InvalidForm("q is neither symmetric nor antisymmetric".into())),
        };
        if det(&q).is_zero() {
            return Err(Error::InvalidForm("q is singular".into()));
        }
        Ok(Self { n, epsilon, q, kind: FormKind::Custom })
    }

    /// The 1×1 form `(q)`.
    pub fn rank_one(q: i64) -> Result<Self> {
        Self::custom(vec![vec![int(q)]])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    pub fn q(&self) -> &[Vec<Rational>] {
        &self.q
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn is_split(&self) -> bool {
        self.kind != FormKind::Custom
    }

    /// The split shape `q` coincides with, whatever constructor produced it.
    pub fn split_kind(&self) -> Option<FormKind> {
        if self.is_split() {
            return Some(self.kind);
        }
        let n = self.n;
        let candidate = if n % 2 == 1 {
            Self::split_so_odd(n / 2).ok()
        } else if self.epsilon < 0 {
            Self::split_sp(n / 2).ok()
        } else {
            Self::split_so_even(n / 2).ok()
        };
        candidate.filter(|c| c.q == self.q).map(|c| c.kind)
    }

    pub fn det(&self) -> Rational {
        det(&self.q)
    }

    /// Whether every entry is 0 or a root of unity (here: 0 or ±1).
    pub fn entries_roots_of_unity_or_zero(&self) -> bool {
        self.q.iter().flatten().all(|c| c.is_zero() || (c.is_integer() && c.numer().abs().is_one()))
    }

    pub fn label(&self) -> String {
        match self.kind {
            FormKind::SplitSp { r } => format!("sp({})", 2 * r),
            FormKind::SplitSoEven { r } => format!("so({})", 2 * r),
            FormKind::SplitSoOdd { r } => format!("so({})", 2 * r + 1),
            FormKind::Custom => {
                let rows: Vec<String> = self
                    .q
                    .iter()
                    .map(|row| row.iter().map(format_rational).collect::<Vec<_>>().join(","))
                    .collect();
                format!("q=[{}]", rows.join(";"))
            }
        }
    }

    /// `q` as a constant matrix series over the given ring.
    pub fn matrix<R: CoeffRing>(
        &self,
        ring: &R,
        basis: &std::sync::Arc<MonomialBasis>,
        embed: impl Fn(&Rational) -> R::Elem,
    ) -> Result<MatrixSeries<R>> {
        let rows: Vec<Vec<R::Elem>> = self.q.iter().map(|r| r.iter().map(&embed).collect()).collect();
        MatrixSeries::constant(ring, basis, &rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LiftParams {
    pub p: u64,
    /// p-adic precision exponent K.
    pub k: u32,
    /// Truncation total degree D.
    pub d: u32,
}

impl LiftParams {
    pub const DEFAULT_K: u32 = 16;
    pub const DEFAULT_D: u32 = 4;

    pub fn new(p: u64, k: u32, d: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InadmissiblePrime { p, forbidden: "2".into() });
        }
        if k < 2 {
            return Err(Error::InvalidParams(format!("precision K = {k} must be at least 2")));
        }
        if d < 1 {
            return Err(Error::InvalidParams("truncation degree D must be at least 1".into()));
        }
        if prime_power(p, k).is_none() {
            return Err(Error::InvalidParams(format!("{p}^{k} exceeds 2^127")));
        }
        Ok(Self { p, k, d })
    }

    /// Rejects primes dividing `det(q)` or a denominator of `q`.
    pub fn check_form(&self, form: &FormSpec) -> Result<()> {
        let p = BigInt::from(self.p);
        let det = form.det();
        let bad = (det.numer() % &p).is_zero()
            || (det.denom() % &p).is_zero()
            || form.q.iter().flatten().any(|c| (c.denom() % &p).is_zero());
        if bad {
            return Err(Error::InadmissiblePrime {
                p: self.p,
                forbidden: format!("det(q) = {} or a denominator of q", format_rational(&det)),
            });
        }
        Ok(())
    }

    pub fn with_k(&self, k: u32) -> Result<Self> {
        Self::new(self.p, k, self.d)
    }

    pub fn with_d(&self, d: u32) -> Result<Self> {
        Self::new(self.p, self.k, d)
    }
}

/// Maximal p-adic valuation deficits of the defining identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ResidualReport {
    pub identity_one: u32,
    pub identity_two: u32,
    pub congruence: u32,
}

impl ResidualReport {
    pub fn is_clean(&self) -> bool {
        self.identity_one == 0 && self.identity_two == 0 && self.congruence == 0
    }
}

#[derive(Debug, Clone)]
pub struct FrobeniusLiftResult {
    pub lambda: MatrixSeries<ResidueRing>,
    pub params: LiftParams,
    pub form: FormSpec,
    /// Precision `k` to which `lambda` is known to be correct (`k = K` when solved).
    pub precision: u32,
    pub residuals: ResidualReport,
}

impl FrobeniusLiftResult {
    pub fn constant_is_identity(&self) -> bool {
        self.lambda.is_identity_at_zero()
    }

    /// Constant term `Λ(0)` as signed residues in `(-p^K/2, p^K/2]`.
    pub fn constant_term_signed(&self) -> Vec<Vec<i128>> {
        let ring = self.lambda.ring();
        let m = ring.modulus();
        self.lambda
            .constant_term()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        let v = ring.decode(*c);
                        if v > m / 2 {
                            v as i128 - m as i128
                        } else {
                            v as i128
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Precomputed data for lifting one form at one prime.
pub struct LiftContext {
    pub form: FormSpec,
    pub params: LiftParams,
    pub ring: ResidueRing,
    pub basis: std::sync::Arc<MonomialBasis>,
    /// `q^φ` as a constant matrix.
    pub q_phi: MatrixSeries<ResidueRing>,
    /// `x^(p)`, entrywise p-th powers of `x = 1 + T`.
    pub x_p: MatrixSeries<ResidueRing>,
    pub alpha: MatrixSeries<ResidueRing>,
    /// `(x^(p))ᵗ q^φ` and its inverse.
    pub xq: MatrixSeries<ResidueRing>,
    pub xq_inv: MatrixSeries<ResidueRing>,
    inv_two: u128,
}

fn embed_rational(ring: &ResidueRing, c: &Rational) -> u128 {
    ring.encode(reduce_rational(c, ring.modulus()).expect("p-integral entry"))
}

/// `α = ((xᵗ q x)_ij^p)`, the image of `ℋ_q(x)` under the trivial lift.
pub fn alpha_target(form: &FormSpec, params: &LiftParams) -> Result<MatrixSeries<ResidueRing>> {
    params.check_form(form)?;
    let ring = ResidueRing::new(params.p, params.k)?;
    let basis = MonomialBasis::get(form.n, params.d);
    let q = form.matrix(&ring, &basis, |c| embed_rational(&ring, c))?;
    let x = MatrixSeries::coordinate(&ring, &basis);
    Ok(x.transpose().mul(&q)?.mul(&x)?.entrywise_pow(params.p))
}

impl LiftContext {
    pub fn new(form: &FormSpec, params: &LiftParams) -> Result<Self> {
        params.check_form(form)?;
        let ring = ResidueRing::new(params.p, params.k)?;
        let basis = MonomialBasis::get(form.n, params.d);
        // q has rational entries, on which the Frobenius automorphism is trivial
        let q_phi = form.matrix(&ring, &basis, |c| embed_rational(&ring, c))?;
        let x = MatrixSeries::coordinate(&ring, &basis);
        let x_p = x.entrywise_pow(params.p);
        let alpha = alpha_target(form, params)?;
        let xq = x_p.transpose().mul(&q_phi)?;
        let xq_inv = xq.inverse()?;
        let inv_two = ring.inverse(ring.encode(2)).expect("p is odd");
        Ok(Self { form: form.clone(), params: *params, ring, basis, q_phi, x_p, alpha, xq, xq_inv, inv_two })
    }

    /// `Λ₀ = x^(p)`, correct modulo p.
    pub fn initial(&self) -> Result<FrobeniusLiftResult> {
        let mut res = FrobeniusLiftResult {
            lambda: self.x_p.clone(),
            params: self.params,
            form: self.form.clone(),
            precision: 1,
            residuals: ResidualReport::default(),
        };
        res.residuals = self.verify(&res)?;
        Ok(res)
    }

    fn p_power(&self, k: u32) -> u128 {
        prime_power(self.params.p, k).expect("k <= K")
    }

    /// `(m / p^k) mod p`, failing if some coefficient is not divisible by `p^k`.
    fn divide_reduce(&self, m: &MatrixSeries<ResidueRing>, k: u32, what: &str) -> Result<MatrixSeries<ResidueRing>> {
        let ring = self.ring;
        let pk = self.p_power(k);
        let p = self.params.p as u128;
        let entries = m
            .entries()
            .iter()
            .map(|s| {
                s.try_map_coeffs(&ring, |_, c| {
                    let v = ring.decode(*c);
                    if v % pk != 0 {
                        return Err(Error::NonUniqueStep {
                            precision: k,
                            reason: format!("{what} residual is not divisible by p^{k}"),
                        });
                    }
                    Ok(ring.encode((v / pk) % p))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixSeries::from_entries(m.dim(), entries)
    }

    fn reduce_mod_p(&self, m: &MatrixSeries<ResidueRing>) -> MatrixSeries<ResidueRing> {
        let ring = self.ring;
        let p = self.params.p as u128;
        m.map(|s| s.map_coeffs(&ring, |c| ring.encode(ring.decode(*c) % p)))
    }

    fn eps_transpose(&self, m: &MatrixSeries<ResidueRing>) -> MatrixSeries<ResidueRing> {
        let t = m.transpose();
        if self.form.epsilon > 0 {
            t
        } else {
            t.neg()
        }
    }

    fn step_lambda(&self, lambda: &MatrixSeries<ResidueRing>, k: u32) -> Result<MatrixSeries<ResidueRing>> {
        let gram = lambda.transpose().mul(&self.q_phi.mul(lambda)?)?;
        let rho1 = self.divide_reduce(&self.alpha.sub(&gram)?, k, "identity (I)")?;
        if rho1 != self.reduce_mod_p(&self.eps_transpose(&rho1)) {
            return Err(Error::NonUniqueStep {
                precision: k,
                reason: "identity (I) residual is not eps-symmetric modulo p".into(),
            });
        }
        let s = self.xq.mul(lambda)?;
        let rho2 = self.divide_reduce(&s.sub(&self.eps_transpose(&s))?, k, "identity (II')")?;
        let u = self.reduce_mod_p(&rho1.sub(&rho2)?.scale(&self.inv_two));
        let e = self.reduce_mod_p(&self.xq_inv.mul(&u)?);
        let pk = self.ring.encode(self.p_power(k));
        lambda.add(&e.scale(&pk))
    }

    /// One linear Hensel step from precision `k` to `k + 1`.
    pub fn hensel_step(&self, current: &FrobeniusLiftResult) -> Result<FrobeniusLiftResult> {
        let k = current.precision;
        if k >= self.params.k {
            return Err(Error::InvalidParams(format!("already at full precision {k}")));
        }
        let lambda = self.step_lambda(&current.lambda, k)?;
        let mut next = FrobeniusLiftResult {
            lambda,
            params: self.params,
            form: self.form.clone(),
            precision: k + 1,
            residuals: ResidualReport::default(),
        };
        next.residuals = self.verify(&next)?;
        Ok(next)
    }

    pub fn solve(&self) -> Result<FrobeniusLiftResult> {
        let mut lambda = self.x_p.clone();
        for k in 1..self.params.k {
            lambda = self.step_lambda(&lambda, k)?;
        }
        let mut res = FrobeniusLiftResult {
            lambda,
            params: self.params,
            form: self.form.clone(),
            precision: self.params.k,
            residuals: ResidualReport::default(),
        };
        res.residuals = self.verify(&res)?;
        Ok(res)
    }

    fn deficit(&self, m: &MatrixSeries<ResidueRing>, required: u32) -> u32 {
        let min_val = m
            .entries()
            .iter()
            .flat_map(|s| s.terms().iter().filter_map(|(_, c)| self.ring.valuation(*c)))
            .min();
        match min_val {
            None => 0,
            Some(v) => required.saturating_sub(v),
        }
    }

    /// Recomputes (I), (II′) and `Λ ≡ x^(p) (mod p)` from scratch.
    pub fn verify(&self, result: &FrobeniusLiftResult) -> Result<ResidualReport> {
        let lambda = &result.lambda;
        let gram = lambda.transpose().mul(&self.q_phi.mul(lambda)?)?;
        let r1 = self.alpha.sub(&gram)?;
        let s = self.xq.mul(lambda)?;
        let r2 = s.sub(&self.eps_transpose(&s))?;
        let r3 = lambda.sub(&self.x_p)?;
        Ok(ResidualReport {
            identity_one: self.deficit(&r1, result.precision),
            identity_two: self.deficit(&r2, result.precision),
            congruence: self.deficit(&r3, 1),
        })
    }
}

/// Solves for the Frobenius lift to precision `p^K` and truncation degree D.
pub fn solve_frobenius_lift(form: &FormSpec, params: &LiftParams) -> Result<FrobeniusLiftResult> {
    LiftContext::new(form, params)?.solve()
}

pub fn verify_lift_identities(result: &FrobeniusLiftResult) -> Result<ResidualReport> {
    LiftContext::new(&result.form, &result.params)?.verify(result)
}

/// `q^{(p-1)/2} (q/p) (1 + T)^p` for the rank-one form `(q)`.
pub fn closed_form_rank1(q: i64, params: &LiftParams) -> Result<MatrixSeries<ResidueRing>> {
    if q == 0 || q.rem_euclid(params.p as i64) == 0 {
        return Err(Error::InadmissiblePrime { p: params.p, forbidden: format!("2q = {}", 2 * q) });
    }
    let ring = ResidueRing::new(params.p, params.k)?;
    let basis = MonomialBasis::get(1, params.d);
    let qe = ring.encode_i128(q as i128);
    let mut c = ring.encode(1);
    for _ in 0..(params.p - 1) / 2 {
        c = ring.mont_mul(c, qe);
    }
    if legendre(q as i128, params.p) < 0 {
        c = ring.neg(c);
    }
    let x = Series::var(&ring, &basis, 0).add(&Series::from_int(&ring, &basis, 1))?;
    MatrixSeries::from_entries(1, vec![x.pow(params.p).scale(&c)])
}

/// Wraps an externally supplied Λ for verification.
pub fn lift_result_from(form: &FormSpec, params: &LiftParams, lambda: MatrixSeries<ResidueRing>) -> Result<FrobeniusLiftResult> {
    let ctx = LiftContext::new(form, params)?;
    let mut res = FrobeniusLiftResult { lambda, params: *params, form: form.clone(), precision: params.k, residuals: ResidualReport::default() };
    res.residuals = ctx.verify(&res)?;
    Ok(res)
}

/// Exact `α` over the rationals (used by certificates).
pub fn alpha_exact(form: &FormSpec, d: u32, p: u64) -> Result<MatrixSeries<Rationals>> {
    let basis = MonomialBasis::get(form.n, d);
    let q = form.matrix(&Rationals, &basis, |c| c.clone())?;
    let x = MatrixSeries::coordinate(&Rationals, &basis);
    let h = x.transpose().mul(&q)?.mul(&x)?;
    crate::series::exact::entrywise_pow(&h, p.to_u32().expect("small prime"))
}
