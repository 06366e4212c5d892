//! Nearest-neighbour quantum chains whose bond terms are two-site coproduct
//! images, their global symmetry operators, and their spectra.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::catalog::{self, CatalogError, Params};
use crate::clifford::{build_gammas, projectors};
use crate::ddq::{self, DdqError, Generator, GeneratorQuad};
use crate::numerics::{c, eigenvalues, kron, mul_sparse, MatrixC, NumericsError, Tolerance, C64, ONE, ZERO};

/// Default bound on the chain Hilbert-space dimension, `4^6`.
pub const DEFAULT_MAX_DIM: usize = 4096;

#[derive(Debug, thiserror::Error)]
pub enum ChainError {
    #[error("chain dimension {dim} exceeds the cap {cap}")]
    SizeCap { dim: u128, cap: usize },
    #[error("chain needs at least two sites, got {0}")]
    TooShort(usize),
    #[error("{sites} sites need {} bond triples, got {bonds}", sites - 1)]
    BondCount { sites: usize, bonds: usize },
    #[error("no printed two-site expression for case {0}")]
    NoExpression(String),
    #[error(transparent)]
    Ddq(#[from] DdqError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

pub type Result<T> = std::result::Result<T, ChainError>;

/// Coefficients `(A, B, C)` of `A·d + B·c11 + C·c22` on one bond.
pub type Triple = [C64; 3];

#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub sites: Vec<GeneratorQuad>,
    pub bonds: Vec<Triple>,
    pub max_dim: usize,
}

impl ChainSpec {
    pub fn new(sites: Vec<GeneratorQuad>, bonds: Vec<Triple>) -> Result<Self> {
        let spec = Self {
            sites,
            bonds,
            max_dim: DEFAULT_MAX_DIM,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn uniform(site: &GeneratorQuad, len: usize, coeff: Triple) -> Result<Self> {
        Self::new(vec![site.clone(); len], vec![coeff; len.saturating_sub(1)])
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Result<Self> {
        self.max_dim = max_dim;
        self.validate()?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn site_dim(&self) -> usize {
        self.sites[0].dim()
    }

    pub fn dim(&self) -> usize {
        self.site_dim().pow(self.len() as u32)
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.sites.len();
        if l < 2 {
            return Err(ChainError::TooShort(l));
        }
        if self.bonds.len() != l - 1 {
            return Err(ChainError::BondCount {
                sites: l,
                bonds: self.bonds.len(),
            });
        }
        let n = self.sites[0].dim();
        if self.sites.iter().any(|s| s.dim() != n) {
            return Err(DdqError::DimensionMismatch(self.sites.iter().map(|s| s.dim()).collect()).into());
        }
        check_cap(n, l, self.max_dim)
    }

    fn site_refs(&self) -> Vec<&GeneratorQuad> {
        self.sites.iter().collect()
    }
}

pub fn check_cap(n: usize, sites: usize, max_dim: usize) -> Result<()> {
    let dim = (n as u128).checked_pow(sites as u32).unwrap_or(u128::MAX);
    if dim > max_dim as u128 {
        return Err(ChainError::SizeCap { dim, cap: max_dim });
    }
    Ok(())
}

/// The three two-site operators multiplied by `A`, `B`, `C`:
/// `Δ(d)` in its four-term expansion, `C11⊗C11 + C12⊗C21`, and
/// `C21⊗C12 + C22⊗C22`.
pub fn bond_terms(left: &GeneratorQuad, right: &GeneratorQuad) -> Result<[MatrixC; 3]> {
    let d = ddq::determinant_four_term(left, right)?;
    let b = kron(&left.c11, &right.c11) + kron(&left.c12, &right.c21);
    let cc = kron(&left.c21, &right.c12) + kron(&left.c22, &right.c22);
    Ok([d, b, cc])
}

pub fn local_hamiltonian(left: &GeneratorQuad, right: &GeneratorQuad, coeff: Triple) -> Result<MatrixC> {
    let [d, b, cc] = bond_terms(left, right)?;
    Ok(d.scale(coeff[0]) + b.scale(coeff[1]) + cc.scale(coeff[2]))
}

/// Adds `I_left ⊗ h ⊗ I_right` into `out` without forming the padded
/// operator.
fn add_embedded(out: &mut MatrixC, h: &MatrixC, left: usize, right: usize) {
    let m = h.rows();
    for a in 0..m {
        for b in 0..m {
            let z = h[(a, b)];
            if z == ZERO {
                continue;
            }
            for l in 0..left {
                let (row, col) = ((l * m + a) * right, (l * m + b) * right);
                for r in 0..right {
                    out[(row + r, col + r)] += z;
                }
            }
        }
    }
}

/// `H = Σ_j I ⊗ … ⊗ H_j ⊗ … ⊗ I` with `H_j` acting on sites `j, j+1`.
pub fn chain_hamiltonian(spec: &ChainSpec) -> Result<MatrixC> {
    spec.validate()?;
    let n = spec.site_dim();
    let l = spec.len();
    let mut out = MatrixC::zeros(spec.dim(), spec.dim());
    for (j, coeff) in spec.bonds.iter().enumerate() {
        let h = local_hamiltonian(&spec.sites[j], &spec.sites[j + 1], *coeff)?;
        add_embedded(&mut out, &h, n.pow(j as u32), n.pow((l - j - 2) as u32));
    }
    Ok(out)
}

/// `π_1 ⊗ … ⊗ π_L (Δ^(L)(g))`.
pub fn global_action(g: Generator, spec: &ChainSpec) -> Result<MatrixC> {
    spec.validate()?;
    Ok(ddq::coproduct_chain(g, &spec.site_refs())?)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CommutatorNorm {
    pub abs: f64,
    /// `‖[H, G]‖ / (‖H‖ ‖G‖)`, zero when either factor vanishes.
    pub rel: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub sites: usize,
    pub norms: BTreeMap<&'static str, CommutatorNorm>,
}

impl SymmetryReport {
    pub fn get(&self, g: Generator) -> CommutatorNorm {
        self.norms[g.name()]
    }
}

pub fn commutator_norm(h: &MatrixC, g: &MatrixC) -> CommutatorNorm {
    let abs = (mul_sparse(h, g) - mul_sparse(g, h)).norm();
    let denom = h.norm() * g.norm();
    CommutatorNorm {
        abs,
        rel: if denom == 0.0 { 0.0 } else { abs / denom },
    }
}

pub fn symmetry_report(spec: &ChainSpec) -> Result<SymmetryReport> {
    let h = chain_hamiltonian(spec)?;
    symmetry_report_for(&h, spec)
}

/// As [`symmetry_report`] for an already assembled `h`.
pub fn symmetry_report_for(h: &MatrixC, spec: &ChainSpec) -> Result<SymmetryReport> {
    let t = ddq::chain_matrix(&spec.site_refs())?;
    let mut norms = BTreeMap::new();
    for g in Generator::ALL {
        let op = match g.index() {
            Some((i, j)) => t[i][j].clone(),
            None => mul_sparse(&t[0][0], &t[1][1]) - mul_sparse(&t[0][1], &t[1][0]),
        };
        norms.insert(g.name(), commutator_norm(h, &op));
    }
    Ok(SymmetryReport {
        sites: spec.len(),
        norms,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    pub center: C64,
    pub size: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<C64>,
    pub clusters: Vec<Cluster>,
    /// Cluster size → number of clusters of that size.
    pub degeneracy: BTreeMap<usize, usize>,
    /// `‖H - H†‖ / ‖H‖`, zero for `H = 0`.
    pub hermiticity_defect: f64,
    pub hermitian: bool,
}

fn lex(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Groups values whose distance is within `rel·max(1, |z|)`, closing the
/// relation transitively.
pub fn cluster_values(values: &[C64], rel: f64) -> Vec<Cluster> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = values[i].norm().max(values[j].norm()).max(1.0);
            if (values[i] - values[j]).norm() <= rel * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
    for (i, &v) in values.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(v);
    }
    let mut clusters: Vec<Cluster> = groups
        .into_values()
        .map(|g| Cluster {
            center: g.iter().sum::<C64>() / g.len() as f64,
            size: g.len(),
        })
        .collect();
    clusters.sort_by(|a, b| lex(&a.center, &b.center));
    clusters
}

pub fn spectrum_report(h: &MatrixC, tol: &Tolerance) -> Result<SpectrumReport> {
    let mut vals = eigenvalues(h, tol)?;
    vals.sort_by(lex);
    let clusters = cluster_values(&vals, tol.cluster_rel);
    let mut degeneracy = BTreeMap::new();
    for cl in &clusters {
        *degeneracy.entry(cl.size).or_insert(0) += 1;
    }
    let norm = h.norm();
    let defect = if norm == 0.0 { 0.0 } else { h.dist(&h.adjoint()) / norm };
    Ok(SpectrumReport {
        eigenvalues: vals,
        clusters,
        degeneracy,
        hermiticity_defect: defect,
        hermitian: defect <= tol.residual_abs,
    })
}

/// Cases with a printed two-site Hamiltonian built from Clifford projectors.
pub const PROJECTOR_CASES: [&str; 5] = ["2.2", "3.5", "4.4", "5.5", "6.10"];

#[derive(Debug, Clone, Serialize)]
pub struct ProjectorComparison {
    pub case: &'static str,
    pub coeff: Triple,
    #[serde(skip)]
    pub expression: MatrixC,
    #[serde(skip)]
    pub coefficient_form: MatrixC,
    /// `‖expression - coefficient_form‖_F`.
    pub residual: f64,
    /// The printed expression is not well formed; the residual is reported
    /// but carries no verdict.
    pub informational: bool,
}

/// Builds the printed projector-form `H_j` for `case_id` and compares it
/// with [`local_hamiltonian`] on the same two sites. Fixed-form cases use
/// their own triple; `4.4` and `6.10` use `coeff`.
pub fn projector_expression(
    case_id: &str,
    left: &Params,
    right: &Params,
    q: C64,
    coeff: Triple,
) -> Result<ProjectorComparison> {
    let spec = catalog::case(case_id)?;
    let case = spec.id;
    let g = build_gammas();
    let p = projectors(&g);
    let i = C64::new(0.0, 1.0);
    let [pp_up, pp_dn, pm_up, pm_dn] = [
        &p.m_plus * &p.s_up,
        &p.m_plus * &p.s_down,
        &p.m_minus * &p.s_up,
        &p.m_minus * &p.s_down,
    ];
    // (γ1 + iγ2)γ3/2 and (γ1 - iγ2)/2.
    let raise = (&g.gamma[1] + g.gamma[2].scale(i)) * &g.gamma[3] * c(0.5);
    let lower = (&g.gamma[1] - g.gamma[2].scale(i)).scale(c(0.5));
    let neg_lower_g3 = (g.gamma[2].scale(i) - &g.gamma[1]) * &g.gamma[3] * c(0.5);
    let diag4 = |a: C64, b: C64, cc: C64, d: C64| {
        pp_up.scale(a) + pp_dn.scale(b) + pm_up.scale(cc) + pm_dn.scale(d)
    };
    let v = |ps: &Params, k: &str| ps.values.get(k).copied().unwrap_or(ONE);
    let id4 = MatrixC::identity(4);

    let (expression, used, informational) = match case {
        "2.2" => {
            let f = |ps: &Params| diag4(ONE, v(ps, "alpha"), v(ps, "beta"), v(ps, "gamma"));
            (kron(&f(left), &f(right)), [ZERO, ONE, ZERO], false)
        }
        "3.5" => {
            let f = |ps: &Params| {
                let a = v(ps, "alpha");
                diag4(q * q / a, q * q / a, ONE, ONE) - (&p.m_plus * &raise).scale(q * q / (a * a))
            };
            (kron(&f(left), &f(right)), [ZERO, ZERO, ONE], false)
        }
        "5.5" => {
            let f = |ps: &Params| {
                let b = v(ps, "beta");
                let q2b = q * q * b;
                diag4(q2b, q2b, q2b, v(ps, "delta")) + (&p.m_plus * &raise).scale(b)
            };
            (kron(&f(left), &f(right)), [ZERO, ONE, ZERO], false)
        }
        "4.4" => {
            let [a, b, cc] = coeff;
            let dterm = |ps: &Params| diag4(v(ps, "alpha"), q * q, q, ONE);
            let bterm = |ps: &Params| diag4(v(ps, "delta"), q, q, ONE);
            let m_lower = &p.m_plus * &lower;
            let m_neg = &p.m_minus * &neg_lower_g3;
            let h = kron(&dterm(left), &dterm(right)).scale(a)
                + kron(&bterm(left), &bterm(right)).scale(b)
                - kron(&m_lower, &m_neg).scale(b * v(left, "gamma") * v(right, "beta"))
                + kron(
                    &diag4(v(left, "alpha") / v(left, "delta"), q, ONE, ONE),
                    &diag4(v(right, "alpha") / v(right, "delta"), q, q, ONE),
                )
                .scale(cc)
                - kron(&m_neg, &m_lower).scale(cc * v(right, "gamma") * v(left, "beta"));
            (h, coeff, false)
        }
        "6.10" => {
            // Read with the unbalanced parentheses closed after each factor.
            let [a, b, cc] = coeff;
            let base = diag4(q * q, q, ONE, ONE);
            let shifted = &id4 + &p.m_minus * &raise;
            let h = kron(&(&base + &p.m_minus * &raise), &base).scale(a) - kron(&shifted, &shifted).scale(b)
                + kron(&base, &base).scale(cc);
            (h, coeff, true)
        }
        _ => return Err(ChainError::NoExpression(case_id.to_string())),
    };
    let l = catalog::instantiate_case(case, left, q)?;
    let r = catalog::instantiate_case(case, right, q)?;
    let coefficient_form = local_hamiltonian(&l, &r, used)?;
    Ok(ProjectorComparison {
        case,
        coeff: used,
        residual: expression.dist(&coefficient_form),
        expression,
        coefficient_form,
        informational,
    })
}
