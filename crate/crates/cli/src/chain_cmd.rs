//! `chain`: Hamiltonian assembly, global symmetry norms and spectrum.

use std::path::Path;

use serde_json::json;

use ddgl2::analysis::solve_invariant_coefficients;
use ddgl2::catalog::{self, CoeffForm, Params};
use ddgl2::chain::{self, ChainError, ChainSpec, Triple};
use ddgl2::ddq::{check_relations, GeneratorQuad};
use ddgl2::numerics::{Tolerance, C64, ONE, ZERO};

use crate::output::{emit, render_json, to_stable_value, write_csv};
use crate::{parse_scalar, parse_triple, ChainArgs, Failure, Format, EXIT_CAP, EXIT_OK};

/// Rescales so the first entry of modulus above `1e-12` is one.
pub fn normalize(t: Triple) -> Triple {
    match t.iter().find(|z| z.norm() > 1e-12) {
        Some(&lead) => t.map(|z| z / lead),
        None => t,
    }
}

/// The catalog triple for the row, falling back to the first solved triple
/// when the printed cell is not usable, and to `(1,1,1)` when any triple
/// is allowed.
pub fn default_coeff(id: &str, params: &Params, rep: &GeneratorQuad, tol: &Tolerance) -> Result<(Triple, &'static str), Failure> {
    let spec = catalog::case(id).map_err(|e| Failure::usage(e.to_string()))?;
    match spec.coeff.form {
        CoeffForm::Arbitrary => Ok(([ONE; 3], "table")),
        CoeffForm::Span(_) => {
            let t = spec.coeff.triples(&params.env(rep.q)).map_err(|e| Failure::io(e.to_string()))?;
            Ok((normalize(t[0]), "table"))
        }
        CoeffForm::IllFormed(_) => {
            let r = solve_invariant_coefficients(rep, &spec.coeff, params, tol).map_err(|e| Failure::io(e.to_string()))?;
            Ok((r.solution_basis.first().copied().map_or([ONE, ZERO, ZERO], normalize), "solved"))
        }
    }
}

fn cap_failure(e: ChainError) -> Failure {
    match e {
        ChainError::SizeCap { .. } => Failure {
            code: EXIT_CAP,
            message: e.to_string(),
        },
        ChainError::TooShort(_) => Failure::usage(e.to_string()),
        other => Failure::io(other.to_string()),
    }
}

fn fmt_c(z: C64) -> [String; 2] {
    [format!("{:.12e}", z.re), format!("{:.12e}", z.im)]
}

pub fn run(args: &ChainArgs) -> Result<i32, Failure> {
    let tol = args.tol.tolerance().map_err(Failure::usage)?;
    let spec = catalog::case(&args.case).map_err(|_| Failure::usage(format!("unknown case '{}'", args.case)))?;
    if args.sites < 2 {
        return Err(Failure::usage("--L must be at least 2"));
    }
    chain::check_cap(catalog::DIM, args.sites, args.max_dim).map_err(cap_failure)?;
    let q = parse_scalar(&args.q)?;
    catalog::check_q(q).map_err(|e| Failure::usage(e.to_string()))?;
    let params = catalog::sample_parameters_at(spec.id, args.seed, q).map_err(|e| Failure::io(e.to_string()))?;
    let rep = catalog::instantiate_case(spec.id, &params, q).map_err(|e| Failure::io(e.to_string()))?;
    let (coeff, source) = match &args.coeff {
        Some(s) => (parse_triple(s)?, "user"),
        None => default_coeff(spec.id, &params, &rep, &tol)?,
    };
    let cs = ChainSpec::uniform(&rep, args.sites, coeff)
        .and_then(|c| c.with_max_dim(args.max_dim))
        .map_err(cap_failure)?;
    let h = chain::chain_hamiltonian(&cs).map_err(cap_failure)?;
    let sym = chain::symmetry_report_for(&h, &cs).map_err(cap_failure)?;
    let spectrum = chain::spectrum_report(&h, &tol).map_err(cap_failure)?;

    if let Some(p) = &args.dump_matrix {
        let mut rows = Vec::new();
        for i in 0..h.rows() {
            for j in 0..h.cols() {
                let z = h[(i, j)];
                if z != ZERO {
                    let [re, im] = fmt_c(z);
                    rows.push(vec![i.to_string(), j.to_string(), re, im]);
                }
            }
        }
        write_csv(Path::new(p), &["row", "col", "re", "im"], &rows)?;
    }
    if let Some(p) = &args.dump_spectrum {
        let rows: Vec<Vec<String>> = spectrum
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, z)| {
                let [re, im] = fmt_c(*z);
                vec![k.to_string(), re, im]
            })
            .collect();
        write_csv(Path::new(p), &["index", "re", "im"], &rows)?;
    }

    let relations = check_relations(&rep, &tol);
    let diagonal = h.is_upper_triangular() && h.is_lower_triangular();
    let stem = format!("chain-{}-L{}-seed{}", spec.id, args.sites, args.seed);
    let report = json!({
        "schema": 1,
        "command": "chain",
        "case": spec.id,
        "L": args.sites,
        "q": q,
        "seed": args.seed,
        "params": params.values,
        "coeff": coeff,
        "coeff_source": source,
        "relations_pass": relations.passes(&tol),
        "hamiltonian": {
            "dim": h.rows(),
            "norm": h.norm(),
            "diagonal": diagonal,
            "hermiticity_defect": spectrum.hermiticity_defect,
        },
        "symmetry": to_stable_value(&sym),
        "spectrum": to_stable_value(&spectrum),
    });
    let body = match args.out.format {
        Format::Json => render_json(&report),
        Format::Csv => {
            let rows: Vec<Vec<String>> = sym
                .norms
                .iter()
                .map(|(g, n)| vec![g.to_string(), format!("{:.6e}", n.abs), format!("{:.6e}", n.rel)])
                .collect();
            crate::output::csv_string(&["generator", "commutator_norm", "relative"], &rows)?
        }
        Format::Text => {
            let mut s = format!(
                "case {} L={} coeff=({}, {}, {}) [{}] dim={} diagonal={}\n",
                spec.id, args.sites, coeff[0], coeff[1], coeff[2], source, h.rows(), diagonal
            );
            for (g, n) in &sym.norms {
                s.push_str(&format!("  [H, {g}] = {:.3e} (rel {:.3e})\n", n.abs, n.rel));
            }
            s.push_str(&format!(
                "  {} eigenvalues in {} clusters, degeneracies {:?}\n",
                spectrum.eigenvalues.len(),
                spectrum.clusters.len(),
                spectrum.degeneracy
            ));
            s
        }
    };
    emit(&args.out, &stem, &body)?;
    Ok(EXIT_OK)
}
