//! Analytic continuation along primes: recovering the p-adic lift as an exact
//! rational matrix series and certifying it is the true truncated lift.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::chern::{alpha_exact, solve_frobenius_lift, FormSpec, FrobeniusLiftResult, LiftParams};
use crate::error::{Error, Result};
use crate::ring::arith::{prime_power, rational_reconstruct, reduce_rational};
use crate::ring::ResidueRing;
use crate::series::{exact, MatrixSeries, MonomialBasis, Rationals, Series};

/// Pass/fail of each exact check, with the precision `K` used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub precision: u32,
    pub constant_is_identity: bool,
    pub identity_one: bool,
    pub identity_two: bool,
    /// p-integrality and `Λ ≡ x^(p) (mod p)`.
    pub congruence: bool,
    pub reduction_matches: bool,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.constant_is_identity && self.identity_one && self.identity_two && self.congruence && self.reduction_matches
    }

    fn failures(&self) -> String {
        let checks = [
            (self.constant_is_identity, "constant term"),
            (self.identity_one, "identity (I)"),
            (self.identity_two, "identity (II')"),
            (self.congruence, "congruence mod p"),
            (self.reduction_matches, "reduction mod p^K"),
        ];
        checks.iter().filter(|(ok, _)| !ok).map(|(_, n)| *n).collect::<Vec<_>>().join(", ")
    }
}

#[derive(Debug, Clone)]
pub struct GlobalLift {
    pub lambda_exact: MatrixSeries<Rationals>,
    /// The solver output the exact lift was reconstructed from.
    pub padic: MatrixSeries<ResidueRing>,
    pub p: u64,
    pub form: FormSpec,
    pub d: u32,
    pub certificate: Certificate,
}

impl GlobalLift {
    /// `Φ = Λ − I`, the image of the generator matrix `T`.
    pub fn generator_image(&self) -> MatrixSeries<Rationals> {
        let basis = self.lambda_exact.basis().clone();
        self.lambda_exact
            .sub(&MatrixSeries::identity(&Rationals, &basis))
            .expect("same basis")
    }

    pub fn precision(&self) -> u32 {
        self.certificate.precision
    }
}

fn constant_string(res: &FrobeniusLiftResult) -> String {
    let rows: Vec<String> = res
        .constant_term_signed()
        .iter()
        .map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    format!("[{}] mod {}^{}", rows.join(";"), res.params.p, res.params.k)
}

/// Reconstructs every coefficient and certifies the result.
pub fn reconstruct_global_lift(result: &FrobeniusLiftResult) -> Result<GlobalLift> {
    if !result.constant_is_identity() {
        return Err(Error::NotGlobalAlongIdentity { constant: constant_string(result) });
    }
    let (p, k) = (result.params.p, result.params.k);
    let ring = *result.lambda.ring();
    let n = result.lambda.dim();
    let basis = result.lambda.basis().clone();
    let mut entries = Vec::with_capacity(n * n);
    for (idx, s) in result.lambda.entries().iter().enumerate() {
        let mut terms = Vec::with_capacity(s.len());
        for (r, c) in s.terms() {
            let q = rational_reconstruct(ring.decode(*c), p, k).ok_or(Error::AmbiguousReconstruction {
                row: idx / n,
                col: idx % n,
                coefficient: *r as usize,
                precision: k,
            })?;
            terms.push((*r as usize, q));
        }
        entries.push(Series::from_terms(&Rationals, &basis, terms));
    }
    let mut lift = GlobalLift {
        lambda_exact: MatrixSeries::from_entries(n, entries)?,
        padic: result.lambda.clone(),
        p,
        form: result.form.clone(),
        d: result.params.d,
        certificate: Certificate {
            precision: k,
            constant_is_identity: false,
            identity_one: false,
            identity_two: false,
            congruence: false,
            reduction_matches: false,
        },
    };
    lift.certificate = certify_global(&lift)?;
    if !lift.certificate.passed() {
        return Err(Error::CertificateFailure(lift.certificate.failures()));
    }
    Ok(lift)
}

fn eps_transpose(m: &MatrixSeries<Rationals>, eps: i8) -> MatrixSeries<Rationals> {
    if eps > 0 {
        m.transpose()
    } else {
        m.transpose().neg()
    }
}

/// Re-verifies every invariant of a global lift in exact arithmetic.
pub fn certify_global(lift: &GlobalLift) -> Result<Certificate> {
    let lambda = &lift.lambda_exact;
    let basis: Arc<MonomialBasis> = lambda.basis().clone();
    let p = lift.p;
    let pe = p as u32;
    let q = lift.form.matrix(&Rationals, &basis, |c| c.clone())?;
    let x_p = exact::entrywise_pow(&MatrixSeries::coordinate(&Rationals, &basis), pe)?;

    let constant_is_identity = lambda.is_identity_at_zero();

    let gram = exact::matrix_mul(&lambda.transpose(), &q.mul(lambda)?)?;
    let identity_one = gram == alpha_exact(&lift.form, lift.d, p)?;

    let s = exact::matrix_mul(&x_p.transpose().mul(&q)?, lambda)?;
    let identity_two = s == eps_transpose(&s, lift.form.epsilon());

    let pb = BigInt::from(p);
    let p_integral = lambda
        .entries()
        .iter()
        .all(|e| e.terms().iter().all(|(_, c)| !(c.denom() % &pb).is_zero()));
    let congruence = p_integral
        && lambda.sub(&x_p)?.entries().iter().all(|e| {
            e.terms().iter().all(|(_, c)| (c.numer() % &pb).is_zero())
        });

    let k = lift.certificate.precision;
    let reduction_matches = match prime_power(p, k) {
        Some(m) if p_integral && lift.padic.dim() == lambda.dim() && Arc::ptr_eq(lift.padic.basis(), lambda.basis()) => {
            let ring = *lift.padic.ring();
            ring.modulus() == m
                && lambda.entries().iter().zip(lift.padic.entries()).all(|(e, pe)| {
                    let reduced = e.map_coeffs(&ring, |c| ring.encode(reduce_rational(c, m).expect("p-integral")));
                    &reduced == pe
                })
        }
        _ => false,
    };

    Ok(Certificate {
        precision: k,
        constant_is_identity,
        identity_one,
        identity_two,
        congruence,
        reduction_matches,
    })
}

/// Solves and globalizes, retrying once at `K + 8` on reconstruction or
/// certificate failure when `escalate` is set.
pub fn globalize(form: &FormSpec, params: &LiftParams, escalate: bool) -> Result<GlobalLift> {
    let attempt = |params: &LiftParams| solve_frobenius_lift(form, params).and_then(|r| reconstruct_global_lift(&r));
    match attempt(params) {
        Err(Error::AmbiguousReconstruction { .. } | Error::CertificateFailure(_)) if escalate => {
            attempt(&params.with_k(params.k + 8)?)
        }
        other => other,
    }
}

/// Whether globalizing at `K` and at `K + 8` gives the same exact lift.
pub fn is_stable(form: &FormSpec, params: &LiftParams) -> Result<bool> {
    let low = globalize(form, params, false)?;
    let high = globalize(form, &params.with_k(params.k + 8)?, false)?;
    Ok(low.lambda_exact == high.lambda_exact)
}

/// The exact lift `Λ = (1+T)^(p)` for the trivial rank-one form.
pub fn trivial_rank_one(p: u64, d: u32) -> Result<MatrixSeries<Rationals>> {
    let basis = MonomialBasis::get(1, d);
    let x = Series::var(&Rationals, &basis, 0).add(&Series::constant(&Rationals, &basis, num_rational::BigRational::one()))?;
    MatrixSeries::from_entries(1, vec![x.pow(p)])
}
