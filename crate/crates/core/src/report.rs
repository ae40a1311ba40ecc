//! Deterministic JSON, markdown and CSV renderings of computed results.
//!
//! Monomials appear in graded-lex order, prime pairs sorted, and every
//! number is an exact integer or rational string.

use serde::Serializer;
use serde_json::{json, Value};

use crate::chern::{FormSpec, FrobeniusLiftResult};
use crate::curvature::{CurvatureReport, TheoremSummary};
use crate::global::GlobalLift;
use crate::ring::rational::format_rational;
use crate::ring::Rational;
use crate::series::{CoeffRing, MatrixSeries, Rationals, Series};

pub fn ser_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub fn form_json(form: &FormSpec) -> Value {
    let q: Vec<Vec<String>> = form.q().iter().map(|r| r.iter().map(format_rational).collect()).collect();
    json!({
        "label": form.label(),
        "kind": form.kind(),
        "n": form.n(),
        "epsilon": form.epsilon(),
        "q": q,
    })
}

/// Terms of a series as `{monomial, coeff}` records.
pub fn series_json<R: CoeffRing>(s: &Series<R>) -> Value {
    let basis = s.basis();
    let ring = s.ring();
    Value::Array(
        s.terms()
            .iter()
            .map(|(r, c)| json!({"monomial": basis.mono(*r as usize).exponents, "coeff": ring.format_elem(c)}))
            .collect(),
    )
}

pub fn matrix_json<R: CoeffRing>(m: &MatrixSeries<R>) -> Value {
    let n = m.dim();
    Value::Array(
        m.entries()
            .iter()
            .enumerate()
            .map(|(idx, s)| json!({"row": idx / n, "col": idx % n, "terms": series_json(s)}))
            .collect(),
    )
}

pub fn padic_lift_json(res: &FrobeniusLiftResult) -> Value {
    let constant: Vec<Vec<String>> =
        res.constant_term_signed().iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
    json!({
        "form": form_json(&res.form),
        "p": res.params.p,
        "K": res.params.k,
        "D": res.params.d,
        "precision": res.precision,
        "residual_deficits": res.residuals,
        "constant_term": constant,
        "global_along_identity": res.constant_is_identity(),
        "lambda_mod_p_K": matrix_json(&res.lambda),
    })
}

pub fn global_lift_json(lift: &GlobalLift) -> Value {
    json!({
        "form": form_json(&lift.form),
        "p": lift.p,
        "D": lift.d,
        "K": lift.precision(),
        "certificate": lift.certificate,
        "scope": format!("global to degree {}", lift.d),
        "lambda": matrix_json(&lift.lambda_exact),
    })
}

fn by_degree(m: &MatrixSeries<Rationals>) -> Value {
    let n = m.dim();
    let basis = m.basis();
    let mut out = Vec::new();
    for d in 0..=basis.max_degree() {
        let mut coeffs = Vec::new();
        for (idx, s) in m.entries().iter().enumerate() {
            for (r, c) in s.terms() {
                if basis.degree(*r as usize) == d {
                    coeffs.push((*r, idx, c));
                }
            }
        }
        coeffs.sort_by_key(|(r, idx, _)| (*r, *idx));
        let coeffs: Vec<Value> = coeffs
            .into_iter()
            .map(|(r, idx, c)| {
                json!({
                    "row": idx / n,
                    "col": idx % n,
                    "monomial": basis.mono(r as usize).exponents,
                    "value": format_rational(c),
                })
            })
            .collect();
        out.push(json!({"degree": d, "coefficients": coeffs}));
    }
    Value::Array(out)
}

pub fn curvature_json(r: &CurvatureReport) -> Value {
    json!({
        "form": form_json(&r.form),
        "p": r.p,
        "p_prime": r.p_prime,
        "D": r.d,
        "zero_to_degree_D": r.is_zero(),
        "lowest_degree": r.lowest_degree,
        "witness": r.witness,
        "verdicts": r.verdicts,
        "divisibility": r.valuations,
        "curvature_by_degree": by_degree(&r.curvature),
    })
}

pub fn summary_json(s: &TheoremSummary) -> Value {
    json!({
        "status": s.worst_status(),
        "reports": s.reports.iter().map(curvature_json).collect::<Vec<_>>(),
    })
}

fn witness_cell(r: &CurvatureReport) -> String {
    match &r.witness {
        Some(w) => format!("({},{}) {} = {}", w.row + 1, w.col + 1, w.name, format_rational(&w.value)),
        None => "-".into(),
    }
}

fn verdict_cell(r: &CurvatureReport) -> String {
    if r.verdicts.is_empty() {
        "measured, no assertion".into()
    } else {
        r.verdicts.iter().map(|v| v.line()).collect::<Vec<_>>().join("; ")
    }
}

/// Summary table plus one divisibility table per pair.
pub fn curvature_markdown(reports: &[CurvatureReport]) -> String {
    let mut out = String::from("| form | p | p' | D | lowest degree | witness | verdicts |\n|---|---|---|---|---|---|---|\n");
    for r in reports {
        out += &format!(
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            r.form.label(),
            r.p,
            r.p_prime,
            r.d,
            r.lowest_degree.map_or("none".into(), |d| d.to_string()),
            witness_cell(r),
            verdict_cell(r)
        );
    }
    for r in reports {
        out += &format!("\n### {} ({}, {}) divisibility\n\n", r.form.label(), r.p, r.p_prime);
        if r.valuations.is_empty() {
            out += "commutator is zero to degree D\n";
            continue;
        }
        out += "| entry | monomial | v_p | v_p' |\n|---|---|---|---|\n";
        let basis = r.commutator.basis();
        for v in &r.valuations {
            let rank = basis.rank(&v.monomial).expect("monomial of the basis");
            out += &format!(
                "| ({},{}) | {} | {} | {} |\n",
                v.row + 1,
                v.col + 1,
                basis.mono_name(rank),
                v.v_p,
                v.v_p_prime
            );
        }
    }
    out
}

pub fn curvature_csv(reports: &[CurvatureReport]) -> String {
    let mut out = String::from("form,p,p_prime,row,col,monomial,degree,value,v_p,v_p_prime\n");
    for r in reports {
        let basis = r.curvature.basis();
        for v in &r.valuations {
            let rank = basis.rank(&v.monomial).expect("monomial of the basis");
            let value = r.curvature.get(v.row, v.col).coeff(rank);
            out += &format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.form.label().replace(',', " "),
                r.p,
                r.p_prime,
                v.row + 1,
                v.col + 1,
                basis.mono_name(rank),
                basis.degree(rank),
                format_rational(&value),
                v.v_p,
                v.v_p_prime
            );
        }
    }
    out
}

/// Coefficient table of a matrix series.
pub fn matrix_csv<R: CoeffRing>(m: &MatrixSeries<R>) -> String {
    let mut out = String::from("row,col,monomial,degree,coeff\n");
    let n = m.dim();
    let basis = m.basis();
    for (idx, s) in m.entries().iter().enumerate() {
        for (r, c) in s.terms() {
            out += &format!(
                "{},{},{},{},{}\n",
                idx / n + 1,
                idx % n + 1,
                basis.mono_name(*r as usize),
                basis.degree(*r as usize),
                s.ring().format_elem(c)
            );
        }
    }
    out
}

pub fn matrix_markdown<R: CoeffRing>(m: &MatrixSeries<R>) -> String {
    let n = m.dim();
    let mut out = String::from("| entry | series |\n|---|---|\n");
    for (idx, s) in m.entries().iter().enumerate() {
        out += &format!("| ({},{}) | {} |\n", idx / n + 1, idx % n + 1, s);
    }
    out
}
