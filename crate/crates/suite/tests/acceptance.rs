//! Acceptance suite: one line per criterion, exact arithmetic throughout.
//!
//! Exits 0 when every criterion passes, 3 when the only shortfall is an
//! inconclusive nonvanishing search, and 1 on any failure.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use arithcurv_core::chern::{closed_form_rank1, solve_frobenius_lift, FormSpec, LiftParams};
use arithcurv_core::classical::classical_suite;
use arithcurv_core::curvature::{curvature_pair, CurvatureReport, Status, TheoremItem};
use arithcurv_core::global::{certify_global, globalize, GlobalLift};
use arithcurv_core::report;
use arithcurv_core::ring::arith::valuation;
use arithcurv_core::ring::{BaseRingDesc, CycloScalar, Rational};
use arithcurv_core::series::{MatrixSeries, Rationals, Series};
use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

struct Line {
    id: u32,
    outcome: Outcome,
    detail: String,
    elapsed: Duration,
}

fn verdict(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

const PAIRS: [(u64, u64); 3] = [(3, 5), (3, 7), (5, 7)];

fn split_forms() -> Vec<FormSpec> {
    vec![
        FormSpec::split_sp(1).unwrap(),
        FormSpec::split_sp(2).unwrap(),
        FormSpec::split_so_even(2).unwrap(),
        FormSpec::split_so_odd(1).unwrap(),
        FormSpec::split_so_odd(2).unwrap(),
    ]
}

fn random_element(rng: &mut ChaCha8Rng, ring: &Arc<BaseRingDesc>) -> CycloScalar {
    let coeffs = (0..ring.degree())
        .map(|_| {
            let den = 2i64.pow(rng.gen_range(0..3)) * 3i64.pow(rng.gen_range(0..3));
            Rational::new(rng.gen_range(-20i64..=20).into(), den.into())
        })
        .collect();
    CycloScalar::from_coeffs(ring, coeffs).unwrap()
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_1() -> (bool, String) {
    let ring = BaseRingDesc::new(6, 12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    let mut checks = 0;
    for _ in 0..200 {
        let (a, b) = (random_element(&mut rng, &ring), random_element(&mut rng, &ring));
        for p in [5u64, 7] {
            let (fa, fb) = (a.frobenius(p).unwrap(), b.frobenius(p).unwrap());
            let (da, db) = (a.p_derivation(p).unwrap(), b.p_derivation(p).unwrap());
            let pr = Rational::from_integer(p.into());
            // C_p(a, b) = -sum_{0<i<p} (binom(p,i)/p) a^i b^(p-i)
            let mut c = CycloScalar::zero(&ring);
            for i in 1..p {
                let coef = -Rational::new(binomial(p, i), BigInt::from(p));
                c = c.add(&a.pow(i).mul(&b.pow(p - i)).scale(&coef));
            }
            let laws = [
                a.add(&b).frobenius(p).unwrap() == fa.add(&fb),
                a.mul(&b).frobenius(p).unwrap() == fa.mul(&fb),
                a.add(&b).p_derivation(p).unwrap() == da.add(&db).add(&c),
                a.mul(&b).p_derivation(p).unwrap()
                    == a.pow(p).mul(&db).add(&b.pow(p).mul(&da)).add(&da.mul(&db).scale(&pr)),
            ];
            checks += laws.len();
            failures += laws.iter().filter(|ok| !**ok).count();
        }
    }
    (failures == 0, format!("{checks} law instances, {failures} violations"))
}

fn criterion_2() -> (bool, String) {
    let mut cases = 0;
    let mut bad = Vec::new();
    for q in [1i64, 2, 3, 5] {
        for p in [3u64, 5, 7, 11, 13] {
            if (2 * q) % p as i64 == 0 {
                continue;
            }
            cases += 1;
            let params = LiftParams::new(p, 20, 6).unwrap();
            let solved = solve_frobenius_lift(&FormSpec::rank_one(q).unwrap(), &params).unwrap();
            if !solved.residuals.is_clean() || solved.lambda != closed_form_rank1(q, &params).unwrap() {
                bad.push(format!("q={q},p={p}"));
            }
        }
    }
    (bad.is_empty(), format!("{cases} (q, p) cases, mismatches: {bad:?}"))
}

struct Lifts {
    lifts: Vec<(FormSpec, u64, GlobalLift)>,
}

fn criterion_3() -> (bool, String) {
    let mut bad = Vec::new();
    let mut n = 0;
    for form in split_forms() {
        for p in [3u64, 5, 7] {
            n += 1;
            match solve_frobenius_lift(&form, &LiftParams::new(p, 16, 4).unwrap()) {
                Ok(r) if r.residuals.is_clean() && r.constant_is_identity() => {}
                Ok(r) => bad.push(format!("{} p={p}: {:?}", form.label(), r.residuals)),
                Err(e) => bad.push(format!("{} p={p}: {e}", form.label())),
            }
        }
    }
    (bad.is_empty(), format!("{n} lifts at K=16, D=4, problems: {bad:?}"))
}

fn criterion_4(out: &mut Option<Lifts>) -> (bool, String) {
    let mut bad = Vec::new();
    let mut lifts = Vec::new();
    for form in split_forms() {
        for p in [3u64, 5, 7] {
            let low = globalize(&form, &LiftParams::new(p, 16, 4).unwrap(), false);
            let high = globalize(&form, &LiftParams::new(p, 24, 4).unwrap(), false);
            match (low, high) {
                (Ok(l), Ok(h)) => {
                    if !l.certificate.passed() || !h.certificate.passed() || l.lambda_exact != h.lambda_exact {
                        bad.push(format!("{} p={p}", form.label()));
                    }
                    lifts.push((form.clone(), p, l));
                }
                (l, h) => bad.push(format!("{} p={p}: {:?} {:?}", form.label(), l.err(), h.err())),
            }
        }
    }
    let n = lifts.len();
    *out = Some(Lifts { lifts });
    (bad.is_empty(), format!("{n} certified lifts, stable K=16 -> 24, problems: {bad:?}"))
}

fn lift_for(form: &FormSpec, p: u64, d: u32) -> GlobalLift {
    globalize(form, &LiftParams::new(p, 16, d).unwrap(), true).unwrap()
}

fn pair_reports(form: &FormSpec, d: u32, computed: &mut Vec<CurvatureReport>) -> Vec<CurvatureReport> {
    let lifts: Vec<GlobalLift> = [3u64, 5, 7].iter().map(|&p| lift_for(form, p, d)).collect();
    let idx = |p: u64| [3u64, 5, 7].iter().position(|&x| x == p).unwrap();
    let out: Vec<CurvatureReport> = PAIRS
        .iter()
        .map(|&(p, p2)| curvature_pair(&lifts[idx(p)], &lifts[idx(p2)]).unwrap())
        .collect();
    computed.extend(out.iter().cloned());
    out
}

fn criterion_6(computed: &mut Vec<CurvatureReport>) -> (bool, String) {
    let reports = pair_reports(&FormSpec::rank_one(1).unwrap(), 6, computed);
    let ok = reports.iter().all(|r| r.is_zero());
    (ok, format!("{} pairs at D=6, all zero: {ok}", reports.len()))
}

fn criterion_7(computed: &mut Vec<CurvatureReport>) -> (bool, String) {
    let reports = pair_reports(&FormSpec::split_sp(1).unwrap(), 4, computed);
    let ok = reports.iter().all(|r| r.is_zero());
    (ok, format!("{} pairs at D=4, all zero: {ok}", reports.len()))
}

fn low_degree_vanishes(r: &CurvatureReport) -> bool {
    let basis = r.curvature.basis();
    r.curvature
        .entries()
        .iter()
        .all(|e| e.terms().iter().all(|(rank, _)| basis.degree(*rank as usize) > 2))
}

fn criterion_8(computed: &mut Vec<CurvatureReport>, d4: &mut Vec<(String, Vec<CurvatureReport>)>) -> (bool, String) {
    let mut ok = true;
    let mut details = Vec::new();
    for form in [FormSpec::split_sp(2).unwrap(), FormSpec::split_so_even(2).unwrap()] {
        let reports = pair_reports(&form, 4, computed);
        let good = reports.iter().all(low_degree_vanishes);
        ok &= good;
        details.push(format!("{}: {}", form.label(), if good { "zero in degrees <= 2" } else { "nonzero low degree" }));
        d4.push((form.label(), reports));
    }
    (ok, details.join(", "))
}

fn criterion_9(computed: &mut Vec<CurvatureReport>, d4: &[(String, Vec<CurvatureReport>)]) -> (Outcome, String) {
    let mut outcome = Outcome::Pass;
    let mut details = Vec::new();
    for (label, reports) in d4 {
        let form = reports[0].form.clone();
        let found = |rs: &[CurvatureReport]| {
            rs.iter().find_map(|r| {
                let item = r.verdicts.iter().find(|v| v.item == TheoremItem::CurvedForLargeRank)?;
                (item.status == Status::Pass).then(|| r.clone())
            })
        };
        let hit = found(reports).or_else(|| found(&pair_reports(&form, 5, computed)));
        match hit {
            Some(r) => {
                let w = r.witness.as_ref().unwrap();
                details.push(format!(
                    "{label}: ({}, {}) witness ({},{}) {} = {}",
                    r.p,
                    r.p_prime,
                    w.row + 1,
                    w.col + 1,
                    w.name,
                    w.value
                ));
            }
            None => {
                outcome = Outcome::Inconclusive;
                // evidence for manual review, outside the permitted search window
                let lifts = (lift_for(&form, 3, 6), lift_for(&form, 5, 6));
                let r = curvature_pair(&lifts.0, &lifts.1).unwrap();
                let beyond = match (&r.lowest_degree, &r.witness) {
                    (Some(d), Some(w)) => {
                        format!("first nonzero at degree {d}: (3, 5) ({},{}) {} = {}", w.row + 1, w.col + 1, w.name, w.value)
                    }
                    _ => "still zero at degree 6".into(),
                };
                computed.push(r);
                details.push(format!("{label}: zero through degree 5 for all pairs; manual review: {beyond}"));
            }
        }
    }
    (outcome, details.join("; "))
}

fn criterion_5(computed: &[CurvatureReport]) -> (bool, String) {
    let mut coefficients = 0;
    let mut violations = 0;
    for r in computed {
        let pp = Rational::from_integer(BigInt::from(r.p) * BigInt::from(r.p_prime));
        if r.curvature.scale(&pp) != r.commutator {
            violations += 1;
        }
        for e in r.commutator.entries() {
            for (_, c) in e.terms() {
                coefficients += 1;
                let vp = valuation(c, r.p).unwrap();
                let vq = valuation(c, r.p_prime).unwrap();
                if vp < 1 || vq < 1 {
                    violations += 1;
                }
            }
        }
    }
    (
        violations == 0,
        format!("{} pairs, {coefficients} nonzero commutator coefficients, {violations} violations", computed.len()),
    )
}

fn criterion_10() -> (bool, String) {
    let s = classical_suite(50, 2024).unwrap();
    (
        s.all_hold(),
        format!(
            "chern {}/{n}, levi-civita {}/{n}, curvature operator identity {}/{n}",
            s.chern,
            s.levi_civita,
            s.curvature,
            n = s.samples
        ),
    )
}

fn mutate(lift: &GlobalLift, rng: &mut ChaCha8Rng) -> GlobalLift {
    let mut out = lift.clone();
    let basis = lift.lambda_exact.basis().clone();
    let n = lift.lambda_exact.dim();
    let mut entries = lift.lambda_exact.clone().into_entries();
    let idx = rng.gen_range(0..n * n);
    let rank = rng.gen_range(0..basis.len());
    let delta = match rng.gen_range(0..3) {
        0 => Rational::one(),
        1 => Rational::from_integer(BigInt::from(lift.p).pow(rng.gen_range(1..20))),
        _ => Rational::new(rng.gen_range(1i64..50).into(), 2.into()),
    };
    let bump = Series::from_terms(&Rationals, &basis, vec![(rank, delta)]);
    entries[idx] = entries[idx].add(&bump).unwrap();
    out.lambda_exact = MatrixSeries::from_entries(n, entries).unwrap();
    out
}

fn criterion_11(lifts: &Lifts) -> (bool, String) {
    let form = FormSpec::split_sp(2).unwrap();
    let render = || {
        let a = lift_for(&form, 3, 4);
        let b = lift_for(&form, 5, 4);
        let r = curvature_pair(&a, &b).unwrap();
        let mut s = serde_json::to_string(&report::curvature_json(&r)).unwrap();
        s += &report::curvature_markdown(std::slice::from_ref(&r));
        s += &report::curvature_csv(std::slice::from_ref(&r));
        s += &serde_json::to_string(&report::global_lift_json(&a)).unwrap();
        s
    };
    let deterministic = render() == render();

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut trials = 0;
    let mut caught = 0;
    for (_, _, lift) in &lifts.lifts {
        for _ in 0..20 {
            trials += 1;
            if !certify_global(&mutate(lift, &mut rng)).unwrap().passed() {
                caught += 1;
            }
        }
    }
    (
        deterministic && caught == trials,
        format!("reports byte-identical: {deterministic}, mutations caught {caught}/{trials}"),
    )
}

fn main() -> ExitCode {
    let mut lines = Vec::new();
    let mut record = |id: u32, start: Instant, budget: Option<Duration>, (outcome, detail): (Outcome, String)| {
        let elapsed = start.elapsed();
        let within = budget.map_or(true, |b| elapsed < b);
        let outcome = if within || outcome != Outcome::Pass { outcome } else { Outcome::Fail };
        let detail = match budget {
            Some(b) => format!("{detail} [{:.2}s, budget {}s]", elapsed.as_secs_f64(), b.as_secs()),
            None => format!("{detail} [{:.2}s]", elapsed.as_secs_f64()),
        };
        lines.push(Line { id, outcome, detail, elapsed });
    };
    let boolean = |(ok, d): (bool, String)| (verdict(ok), d);

    let t = Instant::now();
    record(1, t, Some(Duration::from_secs(10)), boolean(criterion_1()));
    let t = Instant::now();
    record(2, t, Some(Duration::from_secs(30)), boolean(criterion_2()));
    let t = Instant::now();
    record(3, t, Some(Duration::from_secs(600)), boolean(criterion_3()));
    let mut lifts = None;
    let t = Instant::now();
    record(4, t, None, boolean(criterion_4(&mut lifts)));

    let mut computed = Vec::new();
    let mut d4 = Vec::new();
    let t = Instant::now();
    let c6 = boolean(criterion_6(&mut computed));
    record(6, t, None, c6);
    let t = Instant::now();
    let c7 = boolean(criterion_7(&mut computed));
    record(7, t, None, c7);
    let t = Instant::now();
    let c8 = boolean(criterion_8(&mut computed, &mut d4));
    record(8, t, None, c8);
    let t = Instant::now();
    let c9 = criterion_9(&mut computed, &d4);
    record(9, t, None, c9);
    let t = Instant::now();
    record(5, t, None, boolean(criterion_5(&computed)));
    let t = Instant::now();
    record(10, t, Some(Duration::from_secs(30)), boolean(criterion_10()));
    let t = Instant::now();
    record(11, t, None, boolean(criterion_11(lifts.as_ref().expect("criterion 4 ran"))));

    lines.sort_by_key(|l| l.id);
    let mut total = Duration::ZERO;
    for l in &lines {
        let tag = match l.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Inconclusive => "INCONCLUSIVE",
        };
        println!("criterion {:>2}: {tag}: {}", l.id, l.detail);
        total += l.elapsed;
    }
    println!("acceptance total {:.2}s", total.as_secs_f64());
    if lines.iter().any(|l| l.outcome == Outcome::Fail) {
        ExitCode::from(1)
    } else if lines.iter().any(|l| l.outcome == Outcome::Inconclusive) {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
