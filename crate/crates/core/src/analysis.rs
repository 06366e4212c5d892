//! Per-case structure: the operator algebra generated by the four
//! generator images, its centralizer, support patterns, and the space of
//! bond coefficients `(A, B, C)` that give invariant combinations.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::catalog::{self, CatalogError, CoeffForm, Params, PatternCell, SubspacePattern};
use crate::chain::{bond_terms, ChainError};
use crate::ddq::{self, check_relations, quantum_determinant, GeneratorQuad, RelationReport};
use crate::numerics::{
    commutant, in_span, kron, nullspace, span_basis, span_dim, MatrixC, NumericsError, Tolerance, C64,
};

/// Entries of an orthonormal basis below this are treated as zero when
/// reading off support patterns.
const PATTERN_TOL: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Ddq(#[from] ddq::DdqError),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;

/// Orthonormal basis of the smallest unital algebra containing the four
/// generator images.
pub fn operator_algebra_closure(rep: &GeneratorQuad, tol: &Tolerance) -> Result<Vec<MatrixC>> {
    let n = rep.dim();
    let mut seed = vec![MatrixC::identity(n)];
    seed.extend(rep.generators().into_iter().cloned());
    let mut basis = span_basis(&seed, tol)?;
    loop {
        let mut all = basis.clone();
        for a in &basis {
            for b in &basis {
                all.push(a * b);
            }
        }
        let next = span_basis(&all, tol)?;
        if next.len() == basis.len() {
            return Ok(basis);
        }
        basis = next;
    }
}

/// Orthonormal basis of the matrices commuting with all four generators.
pub fn centralizer(rep: &GeneratorQuad, tol: &Tolerance) -> Result<Vec<MatrixC>> {
    let gens: Vec<MatrixC> = rep.generators().into_iter().cloned().collect();
    Ok(commutant(&gens, rep.dim(), tol)?)
}

/// Finest support pattern describing `span(basis)`: a cell is zero when
/// every member vanishes there, and cells are tied when every member takes
/// equal values on them. Exact for spans that are pattern-shaped.
pub fn computed_pattern(basis: &[MatrixC], n: usize) -> SubspacePattern {
    let profile = |i: usize, j: usize| -> Vec<C64> { basis.iter().map(|b| b[(i, j)]).collect() };
    let mut cells = vec![PatternCell::Zero; n * n];
    let mut profiles: Vec<(Vec<C64>, Vec<usize>)> = Vec::new();
    for k in 0..n * n {
        let v = profile(k / n, k % n);
        if v.iter().all(|z| z.norm() <= PATTERN_TOL) {
            continue;
        }
        match profiles
            .iter_mut()
            .find(|(p, _)| p.iter().zip(&v).all(|(a, b)| (a - b).norm() <= PATTERN_TOL))
        {
            Some((_, members)) => members.push(k),
            None => profiles.push((v, vec![k])),
        }
    }
    let mut class = 0u8;
    for (_, members) in profiles {
        if members.len() == 1 {
            cells[members[0]] = PatternCell::Free;
        } else {
            for k in members {
                cells[k] = PatternCell::Tied(class);
            }
            class += 1;
        }
    }
    SubspacePattern { n, cells }
}

fn tie_partner_set(p: &SubspacePattern, k: usize) -> Vec<usize> {
    match p.cells[k] {
        PatternCell::Tied(c) => (0..p.cells.len()).filter(|&m| p.cells[m] == PatternCell::Tied(c)).collect(),
        other => vec![if other == PatternCell::Zero { usize::MAX } else { k }],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternMatch {
    #[serde(rename = "match")]
    pub matches: bool,
    /// One-based `(row, col)` cells whose zero/free/tied status differs.
    pub mismatch_cells: Vec<(usize, usize)>,
    pub computed: SubspacePattern,
}

/// Whether `span(basis)` equals the subspace described by `pattern`.
pub fn pattern_match(basis: &[MatrixC], pattern: &SubspacePattern, tol: &Tolerance) -> Result<PatternMatch> {
    let n = pattern.n;
    let expected = pattern.basis();
    let orth = span_basis(basis, tol)?;
    let same = span_dim(&expected, tol)? == orth.len() && expected.iter().all(|m| in_span(m, &orth, tol));
    let computed = computed_pattern(&orth, n);
    let mismatch_cells = (0..n * n)
        .filter(|&k| tie_partner_set(&computed, k) != tie_partner_set(pattern, k))
        .map(|k| (k / n + 1, k % n + 1))
        .collect();
    Ok(PatternMatch {
        matches: same,
        mismatch_cells,
        computed,
    })
}

/// Every invariant lies in the operator algebra.
pub fn invariants_within_operator_algebra(operator_basis: &[MatrixC], invariant_basis: &[MatrixC], tol: &Tolerance) -> bool {
    invariant_basis.iter().all(|m| in_span(m, operator_basis, tol))
}

/// Snaps entries within `eps` of zero and reduces the rows to echelon form
/// with unit pivots, giving a basis that depends only on the span.
pub fn canonical_span(vectors: &[[C64; 3]], eps: f64) -> Vec<[C64; 3]> {
    let mut rows: Vec<[C64; 3]> = vectors.to_vec();
    let mut out = Vec::new();
    let mut pivot_row = 0;
    for col in 0..3 {
        let Some(best) = (pivot_row..rows.len())
            .max_by(|&a, &b| rows[a][col].norm().total_cmp(&rows[b][col].norm()))
            .filter(|&r| rows[r][col].norm() > eps)
        else {
            continue;
        };
        rows.swap(pivot_row, best);
        let p = rows[pivot_row][col];
        for z in rows[pivot_row].iter_mut() {
            *z /= p;
        }
        let prow = rows[pivot_row];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row {
                let f = row[col];
                for k in 0..3 {
                    row[k] -= f * prow[k];
                }
            }
        }
        pivot_row += 1;
    }
    for row in rows.into_iter().take(pivot_row) {
        out.push(row.map(|z| snap(z, eps)));
    }
    out
}

fn snap(z: C64, eps: f64) -> C64 {
    let part = |x: f64| if x.abs() <= eps { 0.0 } else { x };
    C64::new(part(z.re), part(z.im))
}

fn triples_nullspace(columns: &[MatrixC], tol: &Tolerance) -> Vec<[C64; 3]> {
    let len = columns[0].rows() * columns[0].cols();
    let mut a = DMatrix::zeros(len, 3);
    for (j, m) in columns.iter().enumerate() {
        for (i, z) in m.vec_row_major().into_iter().enumerate() {
            a[(i, j)] = z;
        }
    }
    let null = nullspace(&a, tol);
    canonical_span(&null.iter().map(|v: &DVector<C64>| [v[0], v[1], v[2]]).collect::<Vec<_>>(), 1e-9)
}

fn stacked_commutators(x: &MatrixC, gens: &[&MatrixC]) -> MatrixC {
    let n = x.rows();
    let mut out = MatrixC::zeros(gens.len() * n, n);
    for (k, g) in gens.iter().enumerate() {
        let c = x.commutator(g);
        for i in 0..n {
            for j in 0..n {
                out[(k * n + i, j)] = c[(i, j)];
            }
        }
    }
    out
}

fn fmt_scalar(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}

/// Human-readable list of triples, e.g. `[(1.000000, -1.000000, 0.000000)]`.
pub fn fmt_triples(ts: &[[C64; 3]]) -> String {
    let parts: Vec<String> = ts
        .iter()
        .map(|t| format!("({}, {}, {})", fmt_scalar(t[0]), fmt_scalar(t[1]), fmt_scalar(t[2])))
        .collect();
    format!("[{}]", parts.join(", "))
}

/// Whether `t` lies in the span of `basis` (already in canonical form).
pub fn triple_in_span(t: &[C64; 3], basis: &[[C64; 3]], tol: &Tolerance) -> bool {
    let norm = t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() {
        return false;
    }
    if norm == 0.0 {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let mut a = DMatrix::zeros(3, basis.len());
    for (j, b) in basis.iter().enumerate() {
        for i in 0..3 {
            a[(i, j)] = b[i];
        }
    }
    let rhs = DVector::from_column_slice(t);
    let Ok(x) = a.clone().svd(true, true).solve(&rhs, 1e-12) else {
        return false;
    };
    (a * x - rhs).norm() <= tol.rank_rel.max(1e-9) * norm
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientReport {
    /// Triples with `A·D + B·C11 + C·C22` in the centralizer.
    pub solution_basis: Vec<[C64; 3]>,
    /// Triples whose two-site bond operator commutes with the four two-site
    /// generator images.
    pub two_site_basis: Vec<[C64; 3]>,
    pub table_cell: &'static str,
    pub table_well_formed: bool,
    pub table_triples: Vec<[C64; 3]>,
    /// `None` when the printed cell is not well formed.
    pub contains_table_triple: Option<bool>,
    pub two_site_contains_table_triple: Option<bool>,
    /// The printed triples span exactly the solution space.
    pub table_span_equal: Option<bool>,
}

pub fn solve_invariant_coefficients(
    rep: &GeneratorQuad,
    table: &catalog::CoeffCell,
    env_params: &Params,
    tol: &Tolerance,
) -> Result<CoefficientReport> {
    let gens = rep.generators();
    let d = quantum_determinant(rep);
    let single: Vec<MatrixC> = [&d, &rep.c11, &rep.c22]
        .iter()
        .map(|m| stacked_commutators(m, &gens))
        .collect();
    let solution_basis = triples_nullspace(&single, tol);

    let t = ddq::chain_matrix(&[rep, rep])?;
    let two_gens = [&t[0][0], &t[0][1], &t[1][0], &t[1][1]];
    let terms = bond_terms(rep, rep)?;
    let two: Vec<MatrixC> = terms.iter().map(|m| stacked_commutators(m, &two_gens)).collect();
    let two_site_basis = triples_nullspace(&two, tol);

    let table_triples = table.triples(&env_params.env(rep.q))?;
    let (contains, two_contains, equal) = if table.is_well_formed() {
        let all_in = |basis: &[[C64; 3]]| table_triples.iter().all(|t| triple_in_span(t, basis, tol));
        let printed = canonical_span(&table_triples, 1e-9);
        let eq = matches!(table.form, CoeffForm::Span(_) | CoeffForm::Arbitrary)
            && printed.len() == solution_basis.len()
            && all_in(&solution_basis);
        (Some(all_in(&solution_basis)), Some(all_in(&two_site_basis)), Some(eq))
    } else {
        (None, None, None)
    };
    Ok(CoefficientReport {
        solution_basis,
        two_site_basis,
        table_cell: table.text,
        table_well_formed: table.is_well_formed(),
        table_triples,
        contains_table_triple: contains,
        two_site_contains_table_triple: two_contains,
        table_span_equal: equal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    #[serde(rename = "dim_R")]
    DimR,
    #[serde(rename = "dim_I")]
    DimI,
    Pattern,
    Coeff,
    Relation,
}

impl DiscrepancyKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::DimR => "dim_R",
            Self::DimI => "dim_I",
            Self::Pattern => "pattern",
            Self::Coeff => "coeff",
            Self::Relation => "relation",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::DimR, Self::DimI, Self::Pattern, Self::Coeff, Self::Relation]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyRecord {
    pub kind: DiscrepancyKind,
    /// What was compared, e.g. `r4`, `determinant`, `R(1,4)`, `contains`.
    pub item: String,
    pub expected: String,
    pub computed: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseAnalysis {
    pub case: &'static str,
    pub relations: RelationReport,
    /// `‖C11C22 - C12C21 - d_family‖_F`.
    pub determinant_residual: f64,
    /// `‖Δ(d) - D⊗D‖_F` with `Δ(d)` in its four-term expansion.
    pub group_like_residual: f64,
    #[serde(skip)]
    pub operator_basis: Vec<MatrixC>,
    #[serde(skip)]
    pub invariant_basis: Vec<MatrixC>,
    pub dim_r: usize,
    pub dim_i: usize,
    pub pattern_r: PatternMatch,
    pub pattern_i: PatternMatch,
    pub i_in_r: bool,
    pub coefficients: CoefficientReport,
    pub discrepancies: Vec<DiscrepancyRecord>,
}

impl CaseAnalysis {
    pub fn relations_pass(&self, tol: &Tolerance) -> bool {
        self.relations.passes(tol)
    }
}

// Negated comparisons keep NaN residuals on the failing side.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn analyze_rep(id: &str, rep: &GeneratorQuad, params: &Params, tol: &Tolerance) -> Result<CaseAnalysis> {
    let spec = catalog::case(id)?;
    let relations = check_relations(rep, tol);
    let d = quantum_determinant(rep);
    let determinant_residual = d.dist(&spec.d_expected(params, rep.q)?);
    let group_like_residual = ddq::determinant_four_term(rep, rep)?.dist(&kron(&d, &d));
    let operator_basis = operator_algebra_closure(rep, tol)?;
    let invariant_basis = centralizer(rep, tol)?;
    let pattern_r = pattern_match(&operator_basis, &spec.r_pattern(), tol)?;
    let pattern_i = pattern_match(&invariant_basis, &spec.i_pattern(), tol)?;
    let i_in_r = invariants_within_operator_algebra(&operator_basis, &invariant_basis, tol);
    let coefficients = solve_invariant_coefficients(rep, &spec.coeff, params, tol)?;

    let mut disc = Vec::new();
    let mut push = |kind, item: &str, expected: String, computed: String, residual: f64| {
        disc.push(DiscrepancyRecord {
            kind,
            item: item.to_string(),
            expected,
            computed,
            residual,
        })
    };
    for (name, r) in ddq::RELATION_NAMES.iter().zip(relations.r) {
        if !(r <= tol.residual_abs) {
            push(DiscrepancyKind::Relation, name, "0".into(), format!("{r:.3e}"), r);
        }
    }
    if !(relations.perturbation_norm <= 1e-12) {
        let r = relations.perturbation_norm;
        push(DiscrepancyKind::Relation, "perturbation", "0".into(), format!("{r:.3e}"), r);
    }
    if !(determinant_residual <= tol.residual_abs) {
        push(
            DiscrepancyKind::Relation,
            "determinant",
            spec.d_expected_src().into(),
            format!("{determinant_residual:.3e}"),
            determinant_residual,
        );
    }
    if operator_basis.len() != spec.dim_r {
        let r = operator_basis.len() as f64 - spec.dim_r as f64;
        push(DiscrepancyKind::DimR, "dim_R", spec.dim_r.to_string(), operator_basis.len().to_string(), r);
    }
    if invariant_basis.len() != spec.dim_i {
        let r = invariant_basis.len() as f64 - spec.dim_i as f64;
        push(DiscrepancyKind::DimI, "dim_I", spec.dim_i.to_string(), invariant_basis.len().to_string(), r);
    }
    for (label, pm, printed) in [("R", &pattern_r, spec.r_pattern()), ("I", &pattern_i, spec.i_pattern())] {
        if pm.matches {
            continue;
        }
        if pm.mismatch_cells.is_empty() {
            push(DiscrepancyKind::Pattern, label, printed.render(), pm.computed.render(), 0.0);
        }
        for (i, j) in &pm.mismatch_cells {
            let item = format!("{label}({i},{j})");
            let show = |p: &SubspacePattern| format!("{:?}", p.get(i - 1, j - 1));
            push(DiscrepancyKind::Pattern, &item, show(&printed), show(&pm.computed), 0.0);
        }
    }
    match (coefficients.contains_table_triple, spec.coeff.form) {
        (None, CoeffForm::IllFormed(why)) => {
            push(DiscrepancyKind::Coeff, "ill_formed", spec.coeff.text.into(), why.into(), 0.0)
        }
        (Some(false), _) => push(
            DiscrepancyKind::Coeff,
            "contains",
            spec.coeff.text.into(),
            fmt_triples(&coefficients.solution_basis),
            0.0,
        ),
        _ => {}
    }
    Ok(CaseAnalysis {
        case: spec.id,
        relations,
        determinant_residual,
        group_like_residual,
        dim_r: operator_basis.len(),
        dim_i: invariant_basis.len(),
        operator_basis,
        invariant_basis,
        pattern_r,
        pattern_i,
        i_in_r,
        coefficients,
        discrepancies: disc,
    })
}

/// Instantiates row `id` as printed and analyzes it.
pub fn analyze_case(id: &str, params: &Params, q: C64, tol: &Tolerance) -> Result<CaseAnalysis> {
    let rep = catalog::instantiate_case(id, params, q)?;
    analyze_rep(id, &rep, params, tol)
}

/// Count of discrepancies by kind.
pub fn discrepancy_summary(analyses: &[CaseAnalysis]) -> BTreeMap<&'static str, usize> {
    let mut out = BTreeMap::new();
    for a in analyses {
        for d in &a.discrepancies {
            *out.entry(d.kind.name()).or_insert(0) += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{instantiate_case, sample_parameters};
    use crate::numerics::{c, ONE, ZERO};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn rep(id: &str, seed: u64) -> (GeneratorQuad, Params) {
        let p = sample_parameters(id, seed).unwrap();
        (instantiate_case(id, &p, c(2.0)).unwrap(), p)
    }

    #[test]
    fn closure_dimensions() {
        assert_eq!(operator_algebra_closure(&rep("2.2", 1).0, &tol()).unwrap().len(), 4);
        // The printed row ties e33 and e44 through C22; its correction
        // separates them and reaches the tabulated seven.
        let p = sample_parameters("3.1", 1).unwrap();
        let printed = instantiate_case("3.1", &p, c(2.0)).unwrap();
        assert_eq!(operator_algebra_closure(&printed, &tol()).unwrap().len(), 6);
        let fixed = catalog::instantiate_corrected("3.1", &p, c(2.0)).unwrap().unwrap();
        assert_eq!(operator_algebra_closure(&fixed, &tol()).unwrap().len(), 7);
        let t = GeneratorQuad::trivial(4, c(2.0));
        assert_eq!(operator_algebra_closure(&t, &tol()).unwrap().len(), 1);
        assert_eq!(centralizer(&t, &tol()).unwrap().len(), 16);
    }

    #[test]
    fn closure_respects_zero_cells_for_every_seed() {
        // Seed 5 on 2.2 once produced spurious off-diagonal content from
        // inaccurate singular vectors.
        for id in ["2.2", "2.4", "5.7"] {
            let pattern = catalog::case(id).unwrap().r_pattern();
            for seed in 0..12 {
                let basis = operator_algebra_closure(&rep(id, seed).0, &tol()).unwrap();
                assert_eq!(basis.len(), 4, "{id} seed {seed}");
                for b in &basis {
                    for i in 0..4 {
                        for j in 0..4 {
                            if pattern.get(i, j) == catalog::PatternCell::Zero {
                                assert!(b[(i, j)].norm() < 1e-12, "{id} seed {seed} ({i},{j})");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closure_is_a_fixed_point() {
        let (r, _) = rep("1.3", 2);
        let basis = operator_algebra_closure(&r, &tol()).unwrap();
        for a in &basis {
            for b in &basis {
                assert!(in_span(&(a * b), &basis, &tol()));
            }
        }
        let inv = centralizer(&r, &tol()).unwrap();
        for x in &inv {
            for b in &basis {
                assert!(x.commutator(b).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn centralizer_of_one_one() {
        let (r, _) = rep("1.1", 1);
        let inv = centralizer(&r, &tol()).unwrap();
        assert_eq!(inv.len(), 2);
        assert!(in_span(&MatrixC::identity(4), &inv, &tol()));
        assert!(in_span(&MatrixC::unit(4, 2, 3), &inv, &tol()));
        let ops = operator_algebra_closure(&r, &tol()).unwrap();
        assert!(invariants_within_operator_algebra(&ops, &inv, &tol()));
    }

    #[test]
    fn scalar_algebra_does_not_contain_invariants() {
        let t = GeneratorQuad::trivial(4, c(2.0));
        let ops = operator_algebra_closure(&t, &tol()).unwrap();
        let inv = centralizer(&t, &tol()).unwrap();
        assert!(!invariants_within_operator_algebra(&ops, &inv, &tol()));
    }

    #[test]
    fn patterns() {
        let (r, _) = rep("2.2", 1);
        let inv = centralizer(&r, &tol()).unwrap();
        let diag = SubspacePattern::parse("a 0 0 0 / 0 b 0 0 / 0 0 g 0 / 0 0 0 d").unwrap();
        let m = pattern_match(&inv, &diag, &tol()).unwrap();
        assert!(m.matches && m.mismatch_cells.is_empty());

        let (r, _) = rep("1.1", 1);
        let ops = operator_algebra_closure(&r, &tol()).unwrap();
        let m = pattern_match(&ops, &catalog::case("1.1").unwrap().r_pattern(), &tol()).unwrap();
        assert!(!m.matches);
        assert_eq!(m.mismatch_cells, vec![(1, 4)]);

        let own = pattern_match(&ops, &m.computed, &tol()).unwrap();
        assert!(own.matches && own.mismatch_cells.is_empty());
    }

    #[test]
    fn computed_pattern_ties() {
        let basis = vec![MatrixC::identity(2).scale(c(0.5f64.sqrt())), MatrixC::unit(2, 0, 1)];
        let p = computed_pattern(&basis, 2);
        assert_eq!(p.render(), "a * / 0 a");
        assert_eq!(p.dimension(), 2);
    }

    #[test]
    fn coefficients_one_three() {
        let (r, p) = rep("1.3", 1);
        let spec = catalog::case("1.3").unwrap();
        let rep = solve_invariant_coefficients(&r, &spec.coeff, &p, &tol()).unwrap();
        let q = c(2.0);
        let alpha = p.values["alpha"];
        let t = [-alpha / q, alpha, alpha / q];
        assert!(triple_in_span(&t, &rep.solution_basis, &tol()));
        assert_eq!(rep.contains_table_triple, Some(true));
    }

    #[test]
    fn coefficients_six_ten_and_two_two() {
        let (r, p) = rep("6.10", 1);
        let rep610 = solve_invariant_coefficients(&r, &catalog::case("6.10").unwrap().coeff, &p, &tol()).unwrap();
        assert_eq!(rep610.solution_basis.len(), 3);
        assert_eq!(rep610.table_span_equal, Some(true));
        let (r, p) = rep("2.2", 1);
        let rep22 = solve_invariant_coefficients(&r, &catalog::case("2.2").unwrap().coeff, &p, &tol()).unwrap();
        assert!(triple_in_span(&[ZERO, ONE, ZERO], &rep22.solution_basis, &tol()));
        assert_eq!(rep22.solution_basis.len(), 3);
        assert_eq!(rep22.table_span_equal, Some(false));
    }

    #[test]
    fn ill_formed_cells_are_flagged() {
        let (r, p) = rep("5.6", 1);
        let a = analyze_rep("5.6", &r, &p, &tol()).unwrap();
        assert_eq!(a.coefficients.contains_table_triple, None);
        assert!(a.discrepancies.iter().any(|d| d.kind == DiscrepancyKind::Coeff));
    }

    #[test]
    fn canonical_form_is_span_invariant() {
        let a = canonical_span(&[[c(1.0), c(2.0), c(0.0)], [c(0.0), c(1.0), c(1.0)]], 1e-12);
        let b = canonical_span(&[[c(1.0), c(3.0), c(1.0)], [c(2.0), c(4.0), c(0.0)]], 1e-12);
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            for k in 0..3 {
                assert!((x[k] - y[k]).norm() < 1e-12);
            }
        }
        assert!(canonical_span(&[[ZERO; 3]], 1e-12).is_empty());
    }

    #[test]
    fn valid_row_has_no_discrepancies() {
        let a = analyze_case("2.1", &sample_parameters("2.1", 1).unwrap(), c(2.0), &tol()).unwrap();
        assert_eq!((a.dim_r, a.dim_i), (6, 2));
        assert!(a.discrepancies.is_empty(), "{:?}", a.discrepancies);
        assert!(a.group_like_residual < 1e-10);
    }
}
