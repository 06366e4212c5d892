//! `verify`: one report object per catalog row.

use rayon::prelude::*;
use serde_json::{json, Value};

use ddgl2::analysis::{analyze_rep, CaseAnalysis};
use ddgl2::catalog::{self, Params};
use ddgl2::ddq::D_RELATION_NAMES;
use ddgl2::known::{is_hard, KnownDiscrepancies};
use ddgl2::numerics::{Tolerance, C64};

use crate::output::{csv_string, emit, fmt_f, render_json, to_stable_value};
use crate::{parse_scalar, Failure, Format, VerifyArgs, EXIT_FAIL, EXIT_OK};

pub struct CaseOutcome {
    pub id: &'static str,
    pub params: Params,
    pub analysis: CaseAnalysis,
    pub corrected: Option<CaseAnalysis>,
    pub known_flags: Vec<bool>,
}

impl CaseOutcome {
    /// Hard discrepancies not covered by the known list.
    pub fn unlisted_hard(&self) -> usize {
        self.analysis
            .discrepancies
            .iter()
            .zip(&self.known_flags)
            .filter(|(d, known)| is_hard(d.kind) && !**known)
            .count()
    }

    pub fn status(&self) -> &'static str {
        if self.unlisted_hard() > 0 {
            "fail"
        } else if self.analysis.discrepancies.is_empty() {
            "ok"
        } else {
            "reported"
        }
    }
}

pub fn load_known(args: &VerifyArgs) -> Result<KnownDiscrepancies, Failure> {
    match &args.known {
        None => Ok(KnownDiscrepancies::embedded()),
        Some(p) => {
            let src = std::fs::read_to_string(p).map_err(|e| Failure::io(format!("{}: {e}", p.display())))?;
            KnownDiscrepancies::parse(&src).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))
        }
    }
}

pub fn selected_cases(args: &VerifyArgs) -> Result<Vec<&'static str>, Failure> {
    if args.all || args.cases.is_empty() {
        if !args.all {
            return Err(Failure::usage("give --case ID or --all"));
        }
        return Ok(catalog::case_ids());
    }
    args.cases
        .iter()
        .map(|id| {
            catalog::case(id)
                .map(|c| c.id)
                .map_err(|_| Failure::usage(format!("unknown case '{id}'")))
        })
        .collect()
}

pub fn run_case(id: &'static str, q: C64, seed: u64, tol: &Tolerance, known: &KnownDiscrepancies) -> Result<CaseOutcome, String> {
    let params = catalog::sample_parameters_at(id, seed, q).map_err(|e| format!("{id}: {e}"))?;
    let rep = catalog::instantiate_case(id, &params, q).map_err(|e| format!("{id}: {e}"))?;
    let analysis = analyze_rep(id, &rep, &params, tol).map_err(|e| format!("{id}: {e}"))?;
    let corrected = match catalog::instantiate_corrected(id, &params, q).map_err(|e| format!("{id}: {e}"))? {
        Some(fixed) => Some(analyze_rep(id, &fixed, &params, tol).map_err(|e| format!("{id}: {e}"))?),
        None => None,
    };
    let known_flags = analysis.discrepancies.iter().map(|d| known.contains(id, d)).collect();
    Ok(CaseOutcome {
        id,
        params,
        analysis,
        corrected,
        known_flags,
    })
}

pub fn run_cases(ids: &[&'static str], q: C64, seed: u64, tol: &Tolerance, known: &KnownDiscrepancies) -> Result<Vec<CaseOutcome>, Failure> {
    ids.par_iter()
        .map(|id| run_case(id, q, seed, tol, known))
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::io)
}

fn corrected_json(a: &CaseAnalysis, c22: &str, tol: &Tolerance) -> Value {
    json!({
        "C22": c22,
        "relations_pass": a.relations_pass(tol),
        "max_residual": a.relations.max_residual(),
        "determinant": a.determinant_residual,
        "dim_R": a.dim_r,
        "dim_I": a.dim_i,
    })
}

pub fn case_json(o: &CaseOutcome, q: C64, seed: u64, tol: &Tolerance) -> Value {
    let a = &o.analysis;
    let spec = catalog::case(o.id).expect("outcome ids come from the catalog");
    let r = &a.relations;
    let d_rel: serde_json::Map<String, Value> = D_RELATION_NAMES
        .iter()
        .zip(r.d_relations)
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    let mut mismatch: Vec<String> = Vec::new();
    for (label, pm) in [("R", &a.pattern_r), ("I", &a.pattern_i)] {
        mismatch.extend(pm.mismatch_cells.iter().map(|(i, j)| format!("{label}({i},{j})")));
    }
    let discrepancies: Vec<Value> = a
        .discrepancies
        .iter()
        .zip(&o.known_flags)
        .map(|(d, known)| {
            let mut v = to_stable_value(d);
            v["known"] = json!(known);
            v["hard"] = json!(is_hard(d.kind));
            v
        })
        .collect();
    let relations_all = json!({
        "r1": r.r[0], "r2": r.r[1], "r3": r.r[2], "r4": r.r[3], "r5": r.r[4], "r6": r.r[5],
        "d_relations": d_rel,
        "perturbation": r.perturbation_norm,
        "determinant": a.determinant_residual,
        "group_like": a.group_like_residual,
    });
    json!({
        "case": o.id,
        "q": q,
        "seed": seed,
        "params": o.params.values,
        "branch": o.params.branch,
        "residuals": relations_all,
        "relations_pass": a.relations_pass(tol),
        "dims": {
            "R_computed": a.dim_r,
            "R_expected": spec.dim_r,
            "I_computed": a.dim_i,
            "I_expected": spec.dim_i,
        },
        "patterns": {
            "match": a.pattern_r.matches && a.pattern_i.matches,
            "mismatch_cells": mismatch,
            "R": {"match": a.pattern_r.matches, "computed": a.pattern_r.computed, "printed": spec.r_pattern()},
            "I": {"match": a.pattern_i.matches, "computed": a.pattern_i.computed, "printed": spec.i_pattern()},
        },
        "I_in_R": a.i_in_r,
        "coefficients": to_stable_value(&a.coefficients),
        "corrected": o.corrected.as_ref().map(|c| corrected_json(c, spec.correction.map_or("", |k| k.c22), tol)),
        "discrepancies": discrepancies,
        "status": o.status(),
    })
}

pub fn report_json(outcomes: &[CaseOutcome], q: C64, seed: u64, tol: &Tolerance) -> Value {
    let count = |f: &dyn Fn(&CaseOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count();
    let spec = |o: &CaseOutcome| catalog::case(o.id).expect("catalog id");
    json!({
        "schema": 1,
        "command": "verify",
        "q": q,
        "seed": seed,
        "tolerance": tol,
        "cases": outcomes.iter().map(|o| case_json(o, q, seed, tol)).collect::<Vec<_>>(),
        "summary": {
            "cases": outcomes.len(),
            "relations_pass": count(&|o| o.analysis.relations_pass(tol)),
            "dims_match": count(&|o| o.analysis.dim_r == spec(o).dim_r && o.analysis.dim_i == spec(o).dim_i),
            "patterns_match": count(&|o| o.analysis.pattern_r.matches && o.analysis.pattern_i.matches),
            "coefficients_contained": count(&|o| o.analysis.coefficients.contains_table_triple == Some(true)),
            "ok": count(&|o| o.status() == "ok"),
            "reported": count(&|o| o.status() == "reported"),
            "fail": count(&|o| o.status() == "fail"),
        },
    })
}

fn csv_rows(outcomes: &[CaseOutcome], tol: &Tolerance) -> Vec<Vec<String>> {
    outcomes
        .iter()
        .map(|o| {
            let a = &o.analysis;
            let spec = catalog::case(o.id).expect("catalog id");
            let opt = |b: Option<bool>| b.map_or("n/a".to_string(), |x| x.to_string());
            vec![
                o.id.to_string(),
                a.relations_pass(tol).to_string(),
                fmt_f(a.relations.max_residual()),
                fmt_f(a.relations.perturbation_norm),
                fmt_f(a.determinant_residual),
                a.dim_r.to_string(),
                spec.dim_r.to_string(),
                a.dim_i.to_string(),
                spec.dim_i.to_string(),
                a.pattern_r.matches.to_string(),
                a.pattern_i.matches.to_string(),
                opt(a.coefficients.contains_table_triple),
                a.discrepancies.len().to_string(),
                o.status().to_string(),
            ]
        })
        .collect()
}

const CSV_HEADER: [&str; 14] = [
    "case",
    "relations_pass",
    "max_residual",
    "perturbation",
    "determinant",
    "dim_R",
    "dim_R_expected",
    "dim_I",
    "dim_I_expected",
    "pattern_R_match",
    "pattern_I_match",
    "contains_table_triple",
    "discrepancies",
    "status",
];

fn text(outcomes: &[CaseOutcome], tol: &Tolerance) -> String {
    let mut s = String::new();
    for o in outcomes {
        let a = &o.analysis;
        let spec = catalog::case(o.id).expect("catalog id");
        s.push_str(&format!(
            "{:<5} {:<5} rel={} max={:.2e} dimR={}/{} dimI={}/{} patterns={} coeff={}\n",
            o.id,
            o.status(),
            if a.relations_pass(tol) { "pass" } else { "FAIL" },
            a.relations.max_residual(),
            a.dim_r,
            spec.dim_r,
            a.dim_i,
            spec.dim_i,
            if a.pattern_r.matches && a.pattern_i.matches { "match" } else { "differ" },
            a.coefficients
                .contains_table_triple
                .map_or("ill-formed", |b| if b { "contained" } else { "NOT contained" }),
        ));
        for (d, known) in a.discrepancies.iter().zip(&o.known_flags) {
            s.push_str(&format!(
                "      {}{} {}: expected {} computed {}\n",
                d.kind.name(),
                if *known { " (known)" } else { "" },
                d.item,
                d.expected,
                d.computed
            ));
        }
    }
    s
}

pub fn run(args: &VerifyArgs) -> Result<i32, Failure> {
    let tol = args.tol.tolerance().map_err(Failure::usage)?;
    let q = parse_scalar(&args.q)?;
    catalog::check_q(q).map_err(|e| Failure::usage(e.to_string()))?;
    let ids = selected_cases(args)?;
    let known = load_known(args)?;
    let outcomes = run_cases(&ids, q, args.seed, &tol, &known)?;
    let stem = if args.all || ids.len() > 1 {
        format!("verify-all-seed{}", args.seed)
    } else {
        format!("verify-{}-seed{}", ids[0], args.seed)
    };
    let body = match args.out.format {
        Format::Json => render_json(&report_json(&outcomes, q, args.seed, &tol)),
        Format::Csv => csv_string(&CSV_HEADER, &csv_rows(&outcomes, &tol))?,
        Format::Text => text(&outcomes, &tol),
    };
    emit(&args.out, &stem, &body)?;
    Ok(if outcomes.iter().any(|o| o.unlisted_hard() > 0) {
        EXIT_FAIL
    } else {
        EXIT_OK
    })
}
