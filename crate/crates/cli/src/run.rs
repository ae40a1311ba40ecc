//! Command execution and report assembly.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use arithcurv_core::chern::{solve_frobenius_lift, FormSpec, LiftParams};
use arithcurv_core::classical::{self, MetricPoly, Poly};
use arithcurv_core::curvature::{theorem_checks, Status, TheoremSummary};
use arithcurv_core::global::{globalize, reconstruct_global_lift};
use arithcurv_core::report;
use arithcurv_core::ring::rational::int;
use arithcurv_core::Error;
use serde_json::{json, Value};

use crate::config::{Command, Format, Validated};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_MISMATCH: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

pub struct Outcome {
    pub report: String,
    pub exit: u8,
}

pub struct Options {
    pub format: Format,
    pub escalate: bool,
    pub jobs: usize,
}

/// Order-preserving map over at most `jobs` worker threads.
fn par_map<T: Sync, U: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<U>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, items.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= items.len() {
                    break;
                }
                let v = f(&items[i]);
                slots.lock().expect("no poisoning")[i] = Some(v);
            });
        }
    });
    slots.into_inner().expect("no poisoning").into_iter().map(|v| v.expect("every slot filled")).collect()
}

/// Exit status for a failed computation: claims that break are mismatches.
fn failure_exit(e: &Error) -> u8 {
    match e {
        Error::CurvatureNotDivisible { .. }
        | Error::NonUniqueStep { .. }
        | Error::CertificateFailure(_)
        | Error::AmbiguousReconstruction { .. } => EXIT_MISMATCH,
        _ => EXIT_INPUT,
    }
}

pub fn execute(cfg: &Validated, opts: &Options) -> Result<Outcome, (u8, String)> {
    match cfg.command {
        Command::Delta => delta(cfg, opts),
        Command::Lift => lift(cfg, opts),
        Command::Curvature | Command::VerifyTheorems => curvature(cfg, opts),
        Command::Classical => classical_demo(cfg, opts),
    }
}

fn render_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn delta(cfg: &Validated, opts: &Options) -> Result<Outcome, (u8, String)> {
    let a = cfg.a.as_ref().expect("validated");
    let mut rows = Vec::new();
    for &p in &cfg.primes {
        let phi = a.frobenius(p).map_err(|e| (EXIT_INPUT, e.to_string()))?;
        let d = a.p_derivation(p).map_err(|e| (EXIT_INPUT, e.to_string()))?;
        rows.push((p, phi.to_string(), d.to_string()));
    }
    let report = match opts.format {
        Format::Json => render_json(&json!({
            "command": "delta",
            "N0": cfg.ring.n0(),
            "N": cfg.ring.n(),
            "a": a.to_string(),
            "results": rows.iter().map(|(p, phi, d)| json!({"p": p, "phi_p": phi, "delta_p": d})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("p,phi_p,delta_p\n");
            for (p, phi, d) in &rows {
                s += &format!("{p},{phi},{d}\n");
            }
            s
        }
        Format::Markdown => {
            let mut s = format!("a = {}\n\n| p | phi_p(a) | delta_p(a) |\n|---|---|---|\n", a);
            for (p, phi, d) in &rows {
                s += &format!("| {p} | {phi} | {d} |\n");
            }
            s
        }
    };
    Ok(Outcome { report, exit: EXIT_OK })
}

struct LiftRun {
    form: FormSpec,
    p: u64,
    padic: Value,
    global: Result<Value, String>,
    matrix_csv: String,
    matrix_md: String,
}

fn lift_one(form: &FormSpec, p: u64, cfg: &Validated, escalate: bool) -> Result<LiftRun, (u8, String)> {
    let params = LiftParams::new(p, cfg.k, cfg.d).map_err(|e| (EXIT_INPUT, e.to_string()))?;
    let res = solve_frobenius_lift(form, &params).map_err(|e| (failure_exit(&e), e.to_string()))?;
    let global = match reconstruct_global_lift(&res) {
        Ok(g) => Ok(g),
        Err(Error::AmbiguousReconstruction { .. } | Error::CertificateFailure(_)) if escalate => {
            globalize(form, &params.with_k(params.k + 8).map_err(|e| (EXIT_INPUT, e.to_string()))?, false)
        }
        Err(e) => Err(e),
    };
    let (global, matrix_csv, matrix_md) = match global {
        Ok(g) => (
            Ok(report::global_lift_json(&g)),
            report::matrix_csv(&g.lambda_exact),
            report::matrix_markdown(&g.lambda_exact),
        ),
        Err(e) => (Err(e.to_string()), report::matrix_csv(&res.lambda), report::matrix_markdown(&res.lambda)),
    };
    Ok(LiftRun { form: form.clone(), p, padic: report::padic_lift_json(&res), global, matrix_csv, matrix_md })
}

fn lift(cfg: &Validated, opts: &Options) -> Result<Outcome, (u8, String)> {
    let tasks: Vec<(FormSpec, u64)> =
        cfg.forms.iter().flat_map(|f| cfg.primes.iter().map(move |&p| (f.clone(), p))).collect();
    let runs = par_map(&tasks, opts.jobs, |(f, p)| lift_one(f, *p, cfg, opts.escalate))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let report = match opts.format {
        Format::Json => render_json(&json!({
            "command": "lift",
            "lifts": runs.iter().map(|r| json!({
                "p": r.p,
                "padic": r.padic,
                "global": match &r.global {
                    Ok(g) => json!({"status": "certified", "lift": g}),
                    Err(reason) => json!({"status": "not-certified", "reason": reason}),
                },
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::new();
            for r in &runs {
                s += &format!("# {} p={}\n{}", r.form.label(), r.p, r.matrix_csv);
            }
            s
        }
        Format::Markdown => {
            let mut s = String::new();
            for r in &runs {
                let status = match &r.global {
                    Ok(_) => "certified global to degree D (exact coefficients)".to_string(),
                    Err(reason) => format!("not certified: {reason} (coefficients mod p^K)"),
                };
                s += &format!("## {} at p = {}\n\n{}\n\n{}\n", r.form.label(), r.p, status, r.matrix_md);
            }
            s
        }
    };
    Ok(Outcome { report, exit: EXIT_OK })
}

fn status_exit(s: Option<Status>) -> u8 {
    match s {
        Some(Status::Fail) => EXIT_MISMATCH,
        Some(Status::Inconclusive) => EXIT_INCONCLUSIVE,
        _ => EXIT_OK,
    }
}

fn curvature(cfg: &Validated, opts: &Options) -> Result<Outcome, (u8, String)> {
    let per_form = par_map(&cfg.forms, opts.jobs, |f| {
        theorem_checks(std::slice::from_ref(f), &cfg.primes, cfg.k, cfg.d, opts.escalate)
    });
    let mut reports = Vec::new();
    for s in per_form {
        reports.extend(s.map_err(|e| (failure_exit(&e), e.to_string()))?.reports);
    }
    let summary = TheoremSummary { reports };
    let status = summary.worst_status();
    let report = match opts.format {
        Format::Json => {
            let mut v = report::summary_json(&summary);
            v["command"] = json!(if cfg.command == Command::Curvature { "curvature" } else { "verify-theorems" });
            render_json(&v)
        }
        Format::Csv => report::curvature_csv(&summary.reports),
        Format::Markdown => {
            let mut lines: Vec<String> = Vec::new();
            for r in &summary.reports {
                for v in &r.verdicts {
                    lines.push(format!("- {} ({}, {}), {}: {}", r.form.label(), r.p, r.p_prime, v.line(), v.detail));
                }
            }
            format!("{}\n\n{}", lines.join("\n"), report::curvature_markdown(&summary.reports))
        }
    };
    Ok(Outcome { report, exit: status_exit(status) })
}

fn classical_demo(cfg: &Validated, opts: &Options) -> Result<Outcome, (u8, String)> {
    let err = |e: Error| (EXIT_INPUT, e.to_string());
    let c = |nv: usize, v: i64| Poly::constant(nv, int(v));
    let chern_q = MetricPoly::symmetric(1, vec![vec![c(1, 1).add(&Poly::var(1, 0)), c(1, 0)], vec![c(1, 0), c(1, 1)]])
        .map_err(err)?;
    let chern = classical::chern_classical(&chern_q).map_err(err)?;
    let lc_q = MetricPoly::symmetric(2, vec![vec![c(2, 1).add(&Poly::var(2, 1)), c(2, 0)], vec![c(2, 0), c(2, 1)]])
        .map_err(err)?;
    let lc = classical::levi_civita_classical(&lc_q).map_err(err)?;
    let suite = classical::classical_suite(cfg.samples, cfg.seed).map_err(err)?;
    let examples = [
        ("chern: q = [[1+x1,0],[0,1]], Gamma_111", chern.get(0, 0, 0).to_string()),
        ("levi-civita: q = [[1+x2,0],[0,1]], Gamma_112", lc.get(0, 0, 1).to_string()),
    ];
    let report = match opts.format {
        Format::Json => render_json(&json!({
            "command": "classical",
            "examples": examples.iter().map(|(k, v)| json!({"case": k, "value": v})).collect::<Vec<_>>(),
            "randomized": suite,
            "seed": cfg.seed,
        })),
        Format::Csv => {
            let mut s = String::from("identity,held,samples\n");
            for (k, v) in [("chern", suite.chern), ("levi_civita", suite.levi_civita), ("curvature", suite.curvature)] {
                s += &format!("{k},{v},{}\n", suite.samples);
            }
            s
        }
        Format::Markdown => {
            let mut s = String::from("| case | value |\n|---|---|\n");
            for (k, v) in &examples {
                s += &format!("| {k} | {v} |\n");
            }
            s += &format!(
                "\n| identity | held |\n|---|---|\n| chern | {}/{n} |\n| levi-civita | {}/{n} |\n| curvature | {}/{n} |\n",
                suite.chern,
                suite.levi_civita,
                suite.curvature,
                n = suite.samples
            );
            s
        }
    };
    let exit = if suite.all_hold() { EXIT_OK } else { EXIT_MISMATCH };
    Ok(Outcome { report, exit })
}
