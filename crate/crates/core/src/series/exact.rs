//! Exact rational series arithmetic by multi-modular evaluation.
//!
//! Inputs are scaled to integer series with a common denominator, the
//! computation runs over `Z/ℓ` for word-size primes `ℓ`, and coefficients are
//! recovered by Chinese remaindering. The number of primes is chosen from an
//! ℓ1-norm bound on the integer result, so recovery is exact, not heuristic.

use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::basis::MonomialBasis;
use super::coeff::Rationals;
use super::matrix::MatrixSeries;
use super::series::Series;
use crate::error::{Error, Result};
use crate::ring::arith::{inv_mod, is_prime};
use crate::ring::{Rational, ResidueRing};

type IntTerms = Vec<(u32, BigInt)>;

/// Primes just below 2^62, descending.
pub fn crt_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut c = (1u64 << 62) - 1;
        while out.len() < 256 {
            if is_prime(c) {
                out.push(c);
            }
            c -= 2;
        }
        out
    })
}

fn lcm_denominators<'a>(series: impl IntoIterator<Item = &'a Series<Rationals>>) -> BigInt {
    let mut den = BigInt::one();
    for s in series {
        for (_, c) in s.terms() {
            den = den.lcm(c.denom());
        }
    }
    den
}

fn scaled(s: &Series<Rationals>, den: &BigInt) -> IntTerms {
    s.terms().iter().map(|(r, c)| (*r, c.numer() * (den / c.denom()))).collect()
}

fn l1(terms: &IntTerms) -> BigUint {
    terms.iter().map(|(_, c)| c.magnitude().clone()).sum()
}

fn reduce(ring: &ResidueRing, basis: &Arc<MonomialBasis>, terms: &IntTerms) -> Series<ResidueRing> {
    let l = BigInt::from(ring.modulus());
    let t = terms
        .iter()
        .map(|(r, c)| {
            let v: u128 = c.mod_floor(&l).try_into().expect("reduced below modulus");
            (*r as usize, ring.encode(v))
        })
        .collect();
    Series::from_terms(ring, basis, t)
}

/// Runs `f` over `Z/ℓ` for enough primes that integer outputs bounded by
/// `bound` in absolute value are recovered exactly.
fn evaluate<F>(basis: &Arc<MonomialBasis>, inputs: &[IntTerms], bound: &BigUint, f: F) -> Result<Vec<IntTerms>>
where
    F: Fn(&[Series<ResidueRing>]) -> Result<Vec<Series<ResidueRing>>>,
{
    let target = bound * 2u32 + 1u32;
    let mut primes = Vec::new();
    let mut prod = BigUint::one();
    for &p in crt_primes() {
        if prod > target {
            break;
        }
        primes.push(p);
        prod *= p;
    }
    if prod <= target {
        return Err(Error::RingMismatch("coefficient bound exceeds the CRT prime table".into()));
    }
    let len = basis.len();
    let mut residues: Vec<Vec<Vec<u64>>> = Vec::new(); // [output][prime][rank]
    for (pi, &p) in primes.iter().enumerate() {
        let ring = ResidueRing::new(p, 1)?;
        let reduced: Vec<_> = inputs.iter().map(|t| reduce(&ring, basis, t)).collect();
        let outs = f(&reduced)?;
        if pi == 0 {
            residues = vec![vec![vec![0u64; len]; primes.len()]; outs.len()];
        }
        for (o, s) in outs.iter().enumerate() {
            for (r, c) in s.terms() {
                residues[o][pi][*r as usize] = ring.decode(*c) as u64;
            }
        }
    }
    // Garner mixed-radix reconstruction
    let t = primes.len();
    let mut inv_prefix = vec![0u128; t]; // (p_0 … p_{i-1})^{-1} mod p_i
    for i in 1..t {
        let pi = primes[i] as u128;
        let mut pre = 1u128;
        for &pj in &primes[..i] {
            pre = pre * (pj as u128 % pi) % pi;
        }
        inv_prefix[i] = inv_mod(pre, pi).expect("distinct primes");
    }
    let modulus = BigInt::from_biguint(Sign::Plus, prod);
    let half = &modulus >> 1;
    let mut outputs = Vec::with_capacity(residues.len());
    let mut digits = vec![0u128; t];
    for per_prime in &residues {
        let mut terms = Vec::new();
        for r in 0..len {
            if per_prime.iter().all(|v| v[r] == 0) {
                continue;
            }
            for i in 0..t {
                let pi = primes[i] as u128;
                // value of the partial mixed-radix number modulo p_i
                let mut acc = 0u128;
                for j in (0..i).rev() {
                    acc = (acc * (primes[j] as u128 % pi) + digits[j]) % pi;
                }
                let diff = (per_prime[i][r] as u128 + pi - acc) % pi;
                digits[i] = if i == 0 { diff } else { diff * inv_prefix[i] % pi };
            }
            let mut x = BigInt::zero();
            for i in (0..t).rev() {
                x = x * primes[i] + BigInt::from(digits[i]);
            }
            if x > half {
                x -= &modulus;
            }
            terms.push((r as u32, x));
        }
        outputs.push(terms);
    }
    Ok(outputs)
}

fn to_rational(basis: &Arc<MonomialBasis>, terms: IntTerms, den: &BigInt) -> Series<Rationals> {
    let t = terms
        .into_iter()
        .map(|(r, c)| (r as usize, Rational::new(c, den.clone())))
        .collect();
    Series::from_terms(&Rationals, basis, t)
}

/// Exact product of two rational series.
pub fn mul(f: &Series<Rationals>, g: &Series<Rationals>) -> Result<Series<Rationals>> {
    f.check_compatible(g)?;
    let basis = f.basis().clone();
    let (df, dg) = (lcm_denominators([f]), lcm_denominators([g]));
    let (ff, gg) = (scaled(f, &df), scaled(g, &dg));
    let bound = l1(&ff) * l1(&gg);
    let mut out = evaluate(&basis, &[ff, gg], &bound, |ins| Ok(vec![ins[0].mul(&ins[1])?]))?;
    Ok(to_rational(&basis, out.pop().expect("one output"), &(df * dg)))
}

/// Exact `f^e`.
pub fn pow(f: &Series<Rationals>, e: u32) -> Result<Series<Rationals>> {
    let basis = f.basis().clone();
    let d = lcm_denominators([f]);
    let ff = scaled(f, &d);
    let bound = num_traits::pow(l1(&ff), e as usize);
    let mut out = evaluate(&basis, &[ff], &bound, |ins| Ok(vec![ins[0].pow(e as u64)]))?;
    Ok(to_rational(&basis, out.pop().expect("one output"), &num_traits::pow(d, e as usize)))
}

pub fn entrywise_pow(m: &MatrixSeries<Rationals>, e: u32) -> Result<MatrixSeries<Rationals>> {
    let entries = m.entries().iter().map(|s| pow(s, e)).collect::<Result<Vec<_>>>()?;
    MatrixSeries::from_entries(m.dim(), entries)
}

/// Exact matrix product.
pub fn matrix_mul(a: &MatrixSeries<Rationals>, b: &MatrixSeries<Rationals>) -> Result<MatrixSeries<Rationals>> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch(format!("{n}x{n} times {0}x{0}", b.dim())));
    }
    a.entries()[0].check_compatible(&b.entries()[0])?;
    let basis = a.basis().clone();
    let (da, db) = (lcm_denominators(a.entries()), lcm_denominators(b.entries()));
    let mut inputs: Vec<IntTerms> = a.entries().iter().map(|s| scaled(s, &da)).collect();
    inputs.extend(b.entries().iter().map(|s| scaled(s, &db)));
    let norms: Vec<BigUint> = inputs.iter().map(l1).collect();
    let mut bound = BigUint::zero();
    for i in 0..n {
        for j in 0..n {
            let s: BigUint = (0..n).map(|k| &norms[i * n + k] * &norms[n * n + k * n + j]).sum();
            bound = bound.max(s);
        }
    }
    let outs = evaluate(&basis, &inputs, &bound, |ins| {
        let ma = MatrixSeries::from_entries(n, ins[..n * n].to_vec())?;
        let mb = MatrixSeries::from_entries(n, ins[n * n..].to_vec())?;
        Ok(ma.mul(&mb)?.into_entries())
    })?;
    let den = da * db;
    MatrixSeries::from_entries(n, outs.into_iter().map(|t| to_rational(&basis, t, &den)).collect())
}

/// Exact entrywise substitution `T_v ↦ images[v]` (zero constant terms).
pub fn substitute_matrix(
    m: &MatrixSeries<Rationals>,
    images: &[Series<Rationals>],
) -> Result<MatrixSeries<Rationals>> {
    let n = m.dim();
    let basis = m.basis().clone();
    if images.len() != basis.nvars() {
        return Err(Error::DimensionMismatch(format!("{} images for {} variables", images.len(), basis.nvars())));
    }
    for (v, img) in images.iter().enumerate() {
        m.entries()[0].check_compatible(img)?;
        if !img.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm(v));
        }
    }
    let dmax = basis.max_degree();
    let e = lcm_denominators(m.entries());
    let d = lcm_denominators(images);
    let d_pows: Vec<BigInt> = (0..=dmax).map(|k| num_traits::pow(d.clone(), k as usize)).collect();
    // f_m * e * d^(D - |m|) is an integer
    let mut inputs: Vec<IntTerms> = m
        .entries()
        .iter()
        .map(|s| {
            s.terms()
                .iter()
                .map(|(r, c)| {
                    let deg = basis.degree(*r as usize);
                    (*r, c.numer() * (&e / c.denom()) * &d_pows[(dmax - deg) as usize])
                })
                .collect()
        })
        .collect();
    let img_ints: Vec<IntTerms> = images.iter().map(|s| scaled(s, &d)).collect();
    let img_norms: Vec<BigUint> = img_ints.iter().map(l1).collect();
    let mut mono_norm = vec![BigUint::one(); basis.len()];
    for r in 1..basis.len() {
        let (v, parent) = basis.parent(r);
        mono_norm[r] = &mono_norm[parent] * &img_norms[v];
    }
    let bound = inputs
        .iter()
        .map(|t| t.iter().map(|(r, c)| c.magnitude() * &mono_norm[*r as usize]).sum::<BigUint>())
        .max()
        .unwrap_or_default();
    let count = inputs.len();
    inputs.extend(img_ints);
    let outs = evaluate(&basis, &inputs, &bound, |ins| {
        let refs: Vec<&Series<_>> = ins[..count].iter().collect();
        super::series::substitute_many(&refs, &ins[count..])
    })?;
    let den = e * &d_pows[dmax as usize];
    MatrixSeries::from_entries(n, outs.into_iter().map(|t| to_rational(&basis, t, &den)).collect())
}

/// Exact substitution into a single series.
pub fn substitute(f: &Series<Rationals>, images: &[Series<Rationals>]) -> Result<Series<Rationals>> {
    let n = f.basis().n();
    let zero = Series::zero(&Rationals, f.basis());
    let mut entries = vec![zero; n * n];
    entries[0] = f.clone();
    let m = MatrixSeries::from_entries(n, entries)?;
    Ok(substitute_matrix(&m, images)?.into_entries().swap_remove(0))
}
