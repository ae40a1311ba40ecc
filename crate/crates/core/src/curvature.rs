//! Curvature `(1/pp′)[φ_p, φ_p′]` of a pair of global lifts, represented by
//! its value on the generator matrix `T`.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::chern::{FormSpec, LiftParams};
use crate::error::{Error, Result};
use crate::global::{globalize, GlobalLift};
use crate::ring::arith::valuation;
use crate::ring::rational::format_rational;
use crate::ring::Rational;
use crate::series::{exact, MatrixSeries, MonoIndex, Rationals};

/// The endomorphism of `A[[T]]` fixing coefficients and sending `T ↦ Φ`.
#[derive(Debug, Clone)]
pub struct EndoImage {
    phi: MatrixSeries<Rationals>,
    p: u64,
}

impl EndoImage {
    pub fn new(phi: MatrixSeries<Rationals>, p: u64) -> Result<Self> {
        if let Some(v) = phi.entries().iter().position(|e| !e.constant_term().is_zero()) {
            return Err(Error::NonzeroConstantTerm(v));
        }
        Ok(Self { phi, p })
    }

    /// `Φ_p = Λ_p − I` of a certified lift.
    pub fn from_lift(lift: &GlobalLift) -> Result<Self> {
        if !lift.certificate.passed() {
            return Err(Error::CertificateFailure(format!("lift at p = {} is not certified", lift.p)));
        }
        Self::new(lift.generator_image(), lift.p)
    }

    pub fn phi(&self) -> &MatrixSeries<Rationals> {
        &self.phi
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

/// Entrywise substitution `T ↦ Φ` into `m`.
pub fn apply_endo(e: &EndoImage, m: &MatrixSeries<Rationals>) -> Result<MatrixSeries<Rationals>> {
    exact::substitute_matrix(m, e.phi.entries())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremItem {
    /// `n ≥ 4`: nonzero curvature for distinct primes.
    CurvedForLargeRank,
    /// `n` even: curvature vanishes modulo `(T)^3`.
    VanishesModT3,
    /// `n = 2`, antisymmetric: zero curvature.
    FlatSymplecticPlane,
    /// `n = 1`: zero curvature.
    FlatRankOne,
}

impl TheoremItem {
    pub fn label(&self) -> &'static str {
        match self {
            Self::CurvedForLargeRank => "nonvanishing (n >= 4)",
            Self::VanishesModT3 => "vanishing mod (T)^3 (n even)",
            Self::FlatSymplecticPlane => "vanishing (n = 2, antisymmetric)",
            Self::FlatRankOne => "vanishing (n = 1)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Nonvanishing expected but no nonzero coefficient up to the searched degree.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub item: TheoremItem,
    pub status: Status,
    pub detail: String,
}

impl Verdict {
    pub fn line(&self) -> String {
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Inconclusive => "inconclusive",
        };
        format!("{}: {}", self.item.label(), status)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientValuation {
    pub row: usize,
    pub col: usize,
    pub monomial: MonoIndex,
    pub v_p: i64,
    pub v_p_prime: i64,
}

/// A nonzero curvature coefficient of lowest total degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    pub monomial: MonoIndex,
    pub name: String,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub p: u64,
    pub p_prime: u64,
    pub form: FormSpec,
    pub d: u32,
    pub commutator: MatrixSeries<Rationals>,
    pub curvature: MatrixSeries<Rationals>,
    pub valuations: Vec<CoefficientValuation>,
    pub lowest_degree: Option<u32>,
    pub witness: Option<Witness>,
    /// Measurements with no applicable claim carry no verdicts.
    pub verdicts: Vec<Verdict>,
}

impl CurvatureReport {
    pub fn is_zero(&self) -> bool {
        self.curvature.is_zero()
    }

    pub fn worst_status(&self) -> Option<Status> {
        if self.verdicts.iter().any(|v| v.status == Status::Fail) {
            Some(Status::Fail)
        } else if self.verdicts.iter().any(|v| v.status == Status::Inconclusive) {
            Some(Status::Inconclusive)
        } else if self.verdicts.is_empty() {
            None
        } else {
            Some(Status::Pass)
        }
    }
}

fn lowest_witness(m: &MatrixSeries<Rationals>) -> Option<Witness> {
    let n = m.dim();
    let basis = m.basis();
    m.entries()
        .iter()
        .enumerate()
        .filter_map(|(idx, e)| e.terms().first().map(|(r, c)| (*r, idx, c)))
        .min_by_key(|(r, idx, _)| (*r, *idx))
        .map(|(r, idx, c)| Witness {
            row: idx / n,
            col: idx % n,
            monomial: basis.mono(r as usize),
            name: basis.mono_name(r as usize),
            value: c.clone(),
        })
}

/// The claims applicable to a form and prime pair.
pub fn applicable_items(form: &FormSpec, p: u64, p_prime: u64) -> Vec<TheoremItem> {
    if form.split_kind().is_none() {
        return Vec::new();
    }
    let n = form.n();
    let mut items = Vec::new();
    if n >= 4 && p != p_prime {
        items.push(TheoremItem::CurvedForLargeRank);
    }
    if n % 2 == 0 {
        items.push(TheoremItem::VanishesModT3);
    }
    if n == 2 && form.epsilon() < 0 {
        items.push(TheoremItem::FlatSymplecticPlane);
    }
    if n == 1 {
        items.push(TheoremItem::FlatRankOne);
    }
    items
}

fn judge(item: TheoremItem, lowest: Option<u32>, d: u32) -> Verdict {
    let (status, detail) = match item {
        TheoremItem::CurvedForLargeRank => match lowest {
            Some(k) => (Status::Pass, format!("first nonzero coefficient in degree {k}")),
            None => (Status::Inconclusive, format!("zero up to degree {d}")),
        },
        TheoremItem::VanishesModT3 => match lowest {
            Some(k) if k < 3 => (Status::Fail, format!("nonzero coefficient in degree {k}")),
            Some(k) => (Status::Pass, format!("lowest degree {k}")),
            None => (Status::Pass, format!("zero up to degree {d}")),
        },
        TheoremItem::FlatSymplecticPlane | TheoremItem::FlatRankOne => match lowest {
            Some(k) => (Status::Fail, format!("nonzero coefficient in degree {k}")),
            None => (Status::Pass, format!("zero up to degree {d}")),
        },
    };
    Verdict { item, status, detail }
}

/// Computes the curvature of two certified lifts of the same form and degree.
pub fn curvature_pair(lift_p: &GlobalLift, lift_p_prime: &GlobalLift) -> Result<CurvatureReport> {
    if lift_p.form != lift_p_prime.form {
        return Err(Error::FormMismatch(format!("{} vs {}", lift_p.form.label(), lift_p_prime.form.label())));
    }
    if lift_p.d != lift_p_prime.d {
        return Err(Error::FormMismatch(format!("truncation degrees {} vs {}", lift_p.d, lift_p_prime.d)));
    }
    let (e, e2) = (EndoImage::from_lift(lift_p)?, EndoImage::from_lift(lift_p_prime)?);
    let (p, p2) = (e.p, e2.p);
    // φ_p∘φ_p′ and φ_p′∘φ_p evaluated on T
    let commutator = apply_endo(&e, &e2.phi)?.sub(&apply_endo(&e2, &e.phi)?)?;

    let n = commutator.dim();
    let basis = commutator.basis().clone();
    let mut valuations = Vec::new();
    for (idx, entry) in commutator.entries().iter().enumerate() {
        for (r, c) in entry.terms() {
            let v_p = valuation(c, p).expect("nonzero");
            let v_p_prime = valuation(c, p2).expect("nonzero");
            for (prime, v) in [(p, v_p), (p2, v_p_prime)] {
                if v < 1 {
                    return Err(Error::CurvatureNotDivisible { p: prime, value: format_rational(c) });
                }
            }
            valuations.push(CoefficientValuation {
                row: idx / n,
                col: idx % n,
                monomial: basis.mono(*r as usize),
                v_p,
                v_p_prime,
            });
        }
    }
    let scale = Rational::from_integer(BigInt::from(p) * BigInt::from(p2)).recip();
    let curvature = commutator.scale(&scale);
    let lowest_degree = curvature.lowest_nonzero_degree();
    let witness = lowest_witness(&curvature);
    let d = lift_p.d;
    let verdicts = applicable_items(&lift_p.form, p, p2).into_iter().map(|i| judge(i, lowest_degree, d)).collect();
    Ok(CurvatureReport {
        p,
        p_prime: p2,
        form: lift_p.form.clone(),
        d,
        commutator,
        curvature,
        valuations,
        lowest_degree,
        witness,
        verdicts,
    })
}

/// All curvature reports of a theorem-check run, in (form, p, p′) order.
#[derive(Debug, Clone)]
pub struct TheoremSummary {
    pub reports: Vec<CurvatureReport>,
}

impl TheoremSummary {
    pub fn worst_status(&self) -> Option<Status> {
        let all: Vec<Status> = self.reports.iter().filter_map(|r| r.worst_status()).collect();
        if all.contains(&Status::Fail) {
            Some(Status::Fail)
        } else if all.contains(&Status::Inconclusive) {
            Some(Status::Inconclusive)
        } else if all.is_empty() {
            None
        } else {
            Some(Status::Pass)
        }
    }
}

/// Global lifts at every prime, computed at truncation degree `d`.
fn lifts_at(form: &FormSpec, primes: &[u64], k: u32, d: u32, escalate: bool) -> Result<Vec<GlobalLift>> {
    primes.iter().map(|&p| globalize(form, &LiftParams::new(p, k, d)?, escalate)).collect()
}

/// Runs the pipeline on every form and every pair `p < p′` of the given primes.
///
/// With `escalate`, reconstruction may retry at `K + 8`, and a pair whose
/// nonvanishing is undetected at degree `D` is recomputed once at `D + 1`.
pub fn theorem_checks(forms: &[FormSpec], primes: &[u64], k: u32, d: u32, escalate: bool) -> Result<TheoremSummary> {
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    if primes.len() < 2 {
        return Err(Error::InvalidParams("need at least two distinct primes".into()));
    }
    let mut reports = Vec::new();
    for form in forms {
        let lifts = lifts_at(form, &primes, k, d, escalate)?;
        let mut higher: Option<Vec<GlobalLift>> = None;
        for i in 0..primes.len() {
            for j in i + 1..primes.len() {
                let mut report = curvature_pair(&lifts[i], &lifts[j])?;
                if escalate && report.worst_status() == Some(Status::Inconclusive) {
                    if higher.is_none() {
                        higher = Some(lifts_at(form, &primes, k, d + 1, escalate)?);
                    }
                    let h = higher.as_ref().expect("computed above");
                    report = curvature_pair(&h[i], &h[j])?;
                }
                reports.push(report);
            }
        }
    }
    Ok(TheoremSummary { reports })
}
