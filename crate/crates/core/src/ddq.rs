//! Concrete representations of the Dipper-Donkin quantum matrix bialgebra.
//!
//! Relations, with `d = c11c22 - c12c21`:
//!
//! ```text
//! R1  c11c12 = c12c11          R4  c22c12 = q c12c22
//! R2  c21c22 = c22c21          R5  c21c12 = q c12c21
//! R3  c21c11 = q c11c21        R6  c22c11 - c11c22 = (q-1) c12c21
//! ```
//!
//! and the coproduct `Δ(c_ij) = Σ_k c_ik ⊗ c_kj`. With R6 oriented this way
//! `Δ(d) = d ⊗ d` holds as an identity; the reverse orientation breaks it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::numerics::{
    self, inverse_with_condition, kron, mul_sparse, twisted_commutator_operator, MatrixC,
    NumericsError, Tolerance, C64, ONE, ZERO,
};
use nalgebra::DMatrix;

#[derive(Debug, thiserror::Error)]
pub enum DdqError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("generator dimensions disagree: {0:?}")]
    DimensionMismatch(Vec<usize>),
    #[error("chain needs at least one site")]
    EmptyChain,
    #[error("generator index c{0}{1} out of range")]
    BadIndex(usize, usize),
    #[error("premise AB = qBA violated (residual {0:.3e})")]
    PremiseViolation(f64),
}

pub type Result<T> = std::result::Result<T, DdqError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    C11,
    C12,
    C21,
    C22,
    D,
}

impl Generator {
    pub const ALL: [Generator; 5] = [
        Generator::C11,
        Generator::C12,
        Generator::C21,
        Generator::C22,
        Generator::D,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::C11 => "c11",
            Generator::C12 => "c12",
            Generator::C21 => "c21",
            Generator::C22 => "c22",
            Generator::D => "d",
        }
    }

    /// Zero-based matrix position of `c_ij`; `None` for `d`.
    pub fn index(self) -> Option<(usize, usize)> {
        match self {
            Generator::C11 => Some((0, 0)),
            Generator::C12 => Some((0, 1)),
            Generator::C21 => Some((1, 0)),
            Generator::C22 => Some((1, 1)),
            Generator::D => None,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorQuad {
    pub c11: MatrixC,
    pub c12: MatrixC,
    pub c21: MatrixC,
    pub c22: MatrixC,
    pub q: C64,
}

impl GeneratorQuad {
    pub fn new(c11: MatrixC, c12: MatrixC, c21: MatrixC, c22: MatrixC, q: C64) -> Result<Self> {
        let n = c11.rows();
        let ok = [&c11, &c12, &c21, &c22]
            .iter()
            .all(|m| m.shape() == (n, n));
        if !ok {
            return Err(DdqError::DimensionMismatch(
                [&c11, &c12, &c21, &c22].iter().map(|m| m.rows()).collect(),
            ));
        }
        Ok(Self { c11, c12, c21, c22, q })
    }

    /// `C11 = C22 = I`, `C12 = C21 = 0`: the counit representation on `C^n`.
    pub fn trivial(n: usize, q: C64) -> Self {
        Self {
            c11: MatrixC::identity(n),
            c12: MatrixC::zeros(n, n),
            c21: MatrixC::zeros(n, n),
            c22: MatrixC::identity(n),
            q,
        }
    }

    pub fn dim(&self) -> usize {
        self.c11.rows()
    }

    /// Image of `c_ij` with zero-based `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> &MatrixC {
        match (i, j) {
            (0, 0) => &self.c11,
            (0, 1) => &self.c12,
            (1, 0) => &self.c21,
            _ => &self.c22,
        }
    }

    pub fn image(&self, g: Generator) -> MatrixC {
        match g.index() {
            Some((i, j)) => self.entry(i, j).clone(),
            None => quantum_determinant(self),
        }
    }

    pub fn generators(&self) -> [&MatrixC; 4] {
        [&self.c11, &self.c12, &self.c21, &self.c22]
    }

    /// The block matrix `[[C11, C12], [C21, C22]]`.
    pub fn block_matrix(&self) -> MatrixC {
        let n = self.dim();
        MatrixC::from_fn(2 * n, 2 * n, |r, col| self.entry(r / n, col / n)[(r % n, col % n)])
    }
}

pub fn quantum_determinant(rep: &GeneratorQuad) -> MatrixC {
    &rep.c11 * &rep.c22 - &rep.c12 * &rep.c21
}

pub const RELATION_NAMES: [&str; 6] = ["r1", "r2", "r3", "r4", "r5", "r6"];
pub const D_RELATION_NAMES: [&str; 4] = ["d_c11", "d_c22", "c21_d", "d_c12"];

#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub r: [f64; 6],
    pub d_relations: [f64; 4],
    pub perturbation_norm: f64,
}

impl RelationReport {
    pub fn max_residual(&self) -> f64 {
        self.r.iter().copied().fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: &Tolerance) -> bool {
        self.r.iter().all(|&x| x <= tol.residual_abs)
    }

    // NaN residuals count as failures.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn failed(&self, tol: &Tolerance) -> Vec<&'static str> {
        RELATION_NAMES
            .iter()
            .zip(&self.r)
            .filter(|(_, &x)| !(x <= tol.residual_abs))
            .map(|(n, _)| *n)
            .collect()
    }
}

/// Residuals of R1-R6 plus the derived d-relations. Never fails; a quad
/// that is not a representation simply reports nonzero residuals.
pub fn check_relations(rep: &GeneratorQuad, tol: &Tolerance) -> RelationReport {
    RelationReport {
        r: relation_residuals(rep),
        d_relations: determinant_relation_suite(rep, tol).residuals,
        perturbation_norm: (&rep.c12 * &rep.c21).norm(),
    }
}

fn relation_residuals(rep: &GeneratorQuad) -> [f64; 6] {
    let (a, b, cc, d, q) = (&rep.c11, &rep.c12, &rep.c21, &rep.c22, rep.q);
    let c12c21 = b * cc;
    [
        (a * b - b * a).norm(),
        (cc * d - d * cc).norm(),
        (cc * a - (a * cc).scale(q)).norm(),
        (d * b - (b * d).scale(q)).norm(),
        (cc * b - c12c21.scale(q)).norm(),
        ((d * a - a * d) - c12c21.scale(q - ONE)).norm(),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct DeterminantRelations {
    /// `[D,C11]`, `[D,C22]`, `C21·D - q·D·C21`, `D·C12 - q·C12·D`.
    pub residuals: [f64; 4],
    /// False when R1-R6 fail, in which case the residuals are advisory.
    pub applicable: bool,
}

pub fn determinant_relation_suite(rep: &GeneratorQuad, tol: &Tolerance) -> DeterminantRelations {
    let dm = quantum_determinant(rep);
    let q = rep.q;
    let residuals = [
        dm.commutator(&rep.c11).norm(),
        dm.commutator(&rep.c22).norm(),
        (&rep.c21 * &dm - (&dm * &rep.c21).scale(q)).norm(),
        (&dm * &rep.c12 - (&rep.c12 * &dm).scale(q)).norm(),
    ];
    DeterminantRelations {
        residuals,
        applicable: relation_residuals(rep).iter().all(|&x| x <= tol.residual_abs),
    }
}

/// Formal linear combination `d·D + c11·C11 + c22·C22 + c12·C12 + c21·C21`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementExpr {
    pub d: C64,
    pub c11: C64,
    pub c22: C64,
    pub c12: C64,
    pub c21: C64,
}

impl ElementExpr {
    pub const ZERO: ElementExpr = ElementExpr {
        d: ZERO,
        c11: ZERO,
        c22: ZERO,
        c12: ZERO,
        c21: ZERO,
    };

    /// `A·d + B·c11 + C·c22`.
    pub fn triple(a: C64, b: C64, cc: C64) -> Self {
        Self {
            d: a,
            c11: b,
            c22: cc,
            ..Self::ZERO
        }
    }

    pub fn generator(g: Generator) -> Self {
        let mut x = Self::ZERO;
        *x.slot(g) = ONE;
        x
    }

    fn slot(&mut self, g: Generator) -> &mut C64 {
        match g {
            Generator::C11 => &mut self.c11,
            Generator::C12 => &mut self.c12,
            Generator::C21 => &mut self.c21,
            Generator::C22 => &mut self.c22,
            Generator::D => &mut self.d,
        }
    }

    pub fn terms(&self) -> [(Generator, C64); 5] {
        [
            (Generator::D, self.d),
            (Generator::C11, self.c11),
            (Generator::C22, self.c22),
            (Generator::C12, self.c12),
            (Generator::C21, self.c21),
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.terms().iter().all(|(_, z)| *z == ZERO)
    }

    /// Single-site image under `rep`.
    pub fn image(&self, rep: &GeneratorQuad) -> MatrixC {
        let n = rep.dim();
        self.terms()
            .iter()
            .filter(|(_, z)| *z != ZERO)
            .fold(MatrixC::zeros(n, n), |acc, (g, z)| acc + rep.image(*g).scale(*z))
    }
}

fn same_dims(sites: &[&GeneratorQuad]) -> Result<usize> {
    let n = sites.first().ok_or(DdqError::EmptyChain)?.dim();
    if sites.iter().any(|s| s.dim() != n) {
        return Err(DdqError::DimensionMismatch(sites.iter().map(|s| s.dim()).collect()));
    }
    Ok(n)
}

/// The 2×2 array of operators `T_ij = π⊗…⊗π (Δ^(L)(c_ij))`, built by the
/// recursion `T^(m)_ij = Σ_k T^(m-1)_ik ⊗ C^(m)_kj`.
pub fn chain_matrix(sites: &[&GeneratorQuad]) -> Result<[[MatrixC; 2]; 2]> {
    same_dims(sites)?;
    let first = sites[0];
    let mut t = [
        [first.c11.clone(), first.c12.clone()],
        [first.c21.clone(), first.c22.clone()],
    ];
    for site in &sites[1..] {
        t = glue(&t, &[
            [site.c11.clone(), site.c12.clone()],
            [site.c21.clone(), site.c22.clone()],
        ]);
    }
    Ok(t)
}

fn glue(left: &[[MatrixC; 2]; 2], right: &[[MatrixC; 2]; 2]) -> [[MatrixC; 2]; 2] {
    let cell = |i: usize, j: usize| kron(&left[i][0], &right[0][j]) + kron(&left[i][1], &right[1][j]);
    [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]]
}

/// Same operators as [`chain_matrix`], but with the coproduct applied at
/// `split`: the chain sites `[..split]` and `[split..]` are built
/// independently and then glued.
pub fn chain_matrix_split(sites: &[&GeneratorQuad], split: usize) -> Result<[[MatrixC; 2]; 2]> {
    same_dims(sites)?;
    if split == 0 || split >= sites.len() {
        return chain_matrix(sites);
    }
    let l = chain_matrix(&sites[..split])?;
    let r = chain_matrix(&sites[split..])?;
    Ok(glue(&l, &r))
}

fn image_from_matrix(t: &[[MatrixC; 2]; 2], g: Generator) -> MatrixC {
    match g.index() {
        Some((i, j)) => t[i][j].clone(),
        // Δ is an algebra map, so Δ(d) = Δ(c11)Δ(c22) - Δ(c12)Δ(c21).
        None => mul_sparse(&t[0][0], &t[1][1]) - mul_sparse(&t[0][1], &t[1][0]),
    }
}

/// `π^{⊗L} Δ^(L)(g)`. For `d` the image is computed as the determinant of the
/// iterated coproduct matrix, so group-likeness is an output, not an input.
pub fn coproduct_chain(g: Generator, sites: &[&GeneratorQuad]) -> Result<MatrixC> {
    Ok(image_from_matrix(&chain_matrix(sites)?, g))
}

pub fn coproduct_chain_split(g: Generator, sites: &[&GeneratorQuad], split: usize) -> Result<MatrixC> {
    Ok(image_from_matrix(&chain_matrix_split(sites, split)?, g))
}

/// `(π_left ⊗ π_right) Δ(x)` with `Δ(d)` evaluated homomorphically.
pub fn coproduct_two_site(x: &ElementExpr, left: &GeneratorQuad, right: &GeneratorQuad) -> Result<MatrixC> {
    let n = same_dims(&[left, right])?;
    let t = chain_matrix(&[left, right])?;
    Ok(x.terms()
        .iter()
        .filter(|(_, z)| *z != ZERO)
        .fold(MatrixC::zeros(n * n, n * n), |acc, (g, z)| {
            acc + image_from_matrix(&t, *g).scale(*z)
        }))
}

/// The literal expansion
/// `C11C22⊗C11C22 - C11C22⊗C12C21 - C12C21⊗C11C22 + C12C21⊗C12C21`.
pub fn determinant_four_term(left: &GeneratorQuad, right: &GeneratorQuad) -> Result<MatrixC> {
    same_dims(&[left, right])?;
    let (a1, p1) = (&left.c11 * &left.c22, &left.c12 * &left.c21);
    let (a2, p2) = (&right.c11 * &right.c22, &right.c12 * &right.c21);
    Ok(kron(&a1, &a2) - kron(&a1, &p2) - kron(&p1, &a2) + kron(&p1, &p2))
}

/// The inner action `c_ij · v = Σ_k M_ik v (M⁻¹)_kj` through the block
/// matrix `M = [[C11, C12], [C21, C22]]`.
#[derive(Debug, Clone)]
pub struct InnerAction {
    m: MatrixC,
    m_inv: MatrixC,
    n: usize,
    pub condition: f64,
}

impl InnerAction {
    pub fn new(rep: &GeneratorQuad) -> Result<Self> {
        let m = rep.block_matrix();
        let (m_inv, condition) = inverse_with_condition(&m)?;
        Ok(Self {
            m,
            m_inv,
            n: rep.dim(),
            condition,
        })
    }

    fn block(m: &MatrixC, n: usize, i: usize, j: usize) -> MatrixC {
        MatrixC::from_fn(n, n, |r, col| m[(i * n + r, j * n + col)])
    }

    /// One-based `i, j ∈ {1, 2}`.
    pub fn act(&self, i: usize, j: usize, v: &MatrixC) -> Result<MatrixC> {
        if !(1..=2).contains(&i) || !(1..=2).contains(&j) {
            return Err(DdqError::BadIndex(i, j));
        }
        v.ensure_shape((self.n, self.n))?;
        let n = self.n;
        Ok((0..2).fold(MatrixC::zeros(n, n), |acc, k| {
            acc + Self::block(&self.m, n, i - 1, k) * v * Self::block(&self.m_inv, n, k, j - 1)
        }))
    }

    /// `max_ij ‖c_ij·v - δ_ij v‖_F`.
    pub fn counit_defect(&self, v: &MatrixC) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in 1..=2 {
            for j in 1..=2 {
                let mut w = self.act(i, j, v)?;
                if i == j {
                    w = w - v;
                }
                worst = worst.max(w.norm());
            }
        }
        Ok(worst)
    }
}

pub fn adjoint_action(rep: &GeneratorQuad, i: usize, j: usize, v: &MatrixC) -> Result<MatrixC> {
    InnerAction::new(rep)?.act(i, j, v)
}

#[derive(Debug, Clone, Serialize)]
pub struct Admissibility {
    /// Frobenius-orthonormal basis of `{C : CB = qBC, CA = qAC}`.
    #[serde(skip)]
    pub basis: Vec<MatrixC>,
    pub dim: usize,
    pub admissible: bool,
    /// Largest `‖CB‖` seen over basis elements and random combinations.
    pub max_cb_norm: f64,
}

/// Solves for the `c21` images compatible with `d ↦ A`, `c12 ↦ B`.
/// Admissible iff some solution has `CB ≠ 0`.
pub fn admissibility(a: &MatrixC, b: &MatrixC, q: C64, tol: &Tolerance, seed: u64) -> Result<Admissibility> {
    let n = a.rows();
    a.ensure_shape((n, n))?;
    b.ensure_shape((n, n))?;
    let premise = (a * b - (b * a).scale(q)).norm();
    if premise > tol.residual_abs {
        return Err(DdqError::PremiseViolation(premise));
    }
    let mut stacked = DMatrix::zeros(2 * n * n, n * n);
    stacked
        .view_mut((0, 0), (n * n, n * n))
        .copy_from(&twisted_commutator_operator(b, q));
    stacked
        .view_mut((n * n, 0), (n * n, n * n))
        .copy_from(&twisted_commutator_operator(a, q));
    // The operator encodes X ↦ XG - q·GX; the conditions are CB - qBC = 0,
    // i.e. exactly that map applied to C.
    let basis: Vec<MatrixC> = numerics::nullspace(&stacked, tol)
        .into_iter()
        .map(|v| MatrixC::from_vec_row_major(n, n, v.as_slice()))
        .collect();
    let threshold = tol.residual_abs * b.norm().max(1.0);
    let mut max_cb: f64 = basis.iter().map(|x| (x * b).norm()).fold(0.0, f64::max);
    if !basis.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let comb = basis.iter().fold(MatrixC::zeros(n, n), |acc, x| {
                acc + x.scale(C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            });
            max_cb = max_cb.max((&comb * b).norm());
        }
    }
    Ok(Admissibility {
        dim: basis.len(),
        basis,
        admissible: max_cb > threshold,
        max_cb_norm: max_cb,
    })
}

/// Primitive `p`-th root of unity `e^{2πi/p}`.
pub fn primitive_root(p: u32) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI / p as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    fn e(i: usize, j: usize) -> MatrixC {
        MatrixC::unit(4, i - 1, j - 1)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// A 2.1-shaped instance at q=2, α=3, λ=δ=1.
    fn quad_21() -> GeneratorQuad {
        let q = c(2.0);
        GeneratorQuad::new(
            MatrixC::from_real_diag(&[1.0, 3.0, 1.0, 0.5]),
            e(1, 3).scale(c(2.0)),
            e(4, 3),
            MatrixC::from_real_diag(&[4.0, 2.0 / 3.0, 2.0, 2.0]),
            q,
        )
        .unwrap()
    }

    /// Cyclic module with nonzero perturbation (C12·C21 ≠ 0).
    fn cyclic(p: usize) -> GeneratorQuad {
        let q = primitive_root(p as u32);
        let (alpha, beta, eta) = (c(2.0), c(1.5), c(3.0));
        let mut raise = MatrixC::zeros(p, p);
        for k in 0..p - 1 {
            raise[(k + 1, k)] = ONE;
        }
        raise[(0, p - 1)] += eta;
        let qn: Vec<C64> = (0..p).map(|k| q.powu(k as u32)).collect();
        GeneratorQuad::new(
            raise.scale(beta),
            raise,
            MatrixC::from_diag(&qn.iter().map(|z| z * alpha * beta).collect::<Vec<_>>()),
            MatrixC::from_diag(&qn.iter().map(|z| z * alpha).collect::<Vec<_>>()),
            q,
        )
        .unwrap()
    }

    #[test]
    fn relations_on_tabulated_instance() {
        let r = check_relations(&quad_21(), &tol());
        assert!(r.passes(&tol()), "{r:?}");
        assert_eq!(r.perturbation_norm, 0.0);
        let q = quad_21();
        assert_eq!(&q.c21 * &q.c11, e(4, 3));
        assert_eq!(&q.c11 * &q.c21, e(4, 3).scale(c(0.5)));
    }

    #[test]
    fn relations_trivial_and_swapped() {
        let t = GeneratorQuad::trivial(4, c(2.0));
        let r = check_relations(&t, &tol());
        assert_eq!(r.max_residual(), 0.0);
        assert_eq!(quantum_determinant(&t), MatrixC::identity(4));

        let mut q = quad_21();
        std::mem::swap(&mut q.c11, &mut q.c21);
        let r = check_relations(&q, &tol());
        assert!(r.r[2] > 1e-3);
        assert!(r.failed(&tol()).contains(&"r3"));
    }

    #[test]
    fn reverse_orientation_of_r6_fails_on_perturbed_module() {
        let rep = cyclic(3);
        let r = check_relations(&rep, &tol());
        assert!(r.passes(&tol()), "{r:?}");
        assert!(r.perturbation_norm > 1.0);
        let reversed = ((&rep.c11 * &rep.c22 - &rep.c22 * &rep.c11)
            - (&rep.c12 * &rep.c21).scale(rep.q - ONE))
        .norm();
        assert!(reversed > 1.0);
        let dd = coproduct_two_site(&ElementExpr::generator(Generator::D), &rep, &rep).unwrap();
        let dm = quantum_determinant(&rep);
        assert!(dd.dist(&kron(&dm, &dm)) < 1e-10);
    }

    #[test]
    fn determinant_relations() {
        let q = c(2.0);
        let rep = GeneratorQuad::new(
            MatrixC::from_real_diag(&[2.0, 2.0, 1.0, 1.0]) + e(1, 2),
            e(3, 4).scale(c(5.0)),
            e(3, 2).scale(c(3.0)),
            MatrixC::from_real_diag(&[2.0, 2.0, 2.0, 1.0]) - e(1, 2),
            q,
        )
        .unwrap();
        let d = determinant_relation_suite(&rep, &tol());
        assert!(d.applicable);
        assert!(d.residuals.iter().all(|&x| x < 1e-12), "{d:?}");
        let dm = quantum_determinant(&rep);
        assert!(dm.dist(&MatrixC::from_real_diag(&[4.0, 4.0, 2.0, 1.0])) < 1e-12);

        let mut bad = rep.clone();
        bad.c21 = e(2, 3);
        assert!(!determinant_relation_suite(&bad, &tol()).applicable);
    }

    #[test]
    fn two_site_diagonal_and_trivial() {
        let rep = GeneratorQuad::new(
            MatrixC::from_real_diag(&[1.0, 2.0, 3.0, 5.0]),
            MatrixC::zeros(4, 4),
            MatrixC::zeros(4, 4),
            MatrixC::from_real_diag(&[4.0, 1.0, 2.0 / 3.0, 0.2]),
            c(2.0),
        )
        .unwrap();
        let x = ElementExpr::generator(Generator::C11);
        assert_eq!(coproduct_two_site(&x, &rep, &rep).unwrap(), kron(&rep.c11, &rep.c11));
        let t = GeneratorQuad::trivial(4, c(2.0));
        assert_eq!(coproduct_two_site(&x, &t, &t).unwrap(), MatrixC::identity(16));
        let x = ElementExpr::triple(c(1.0), c(2.0), c(3.0));
        assert_eq!(coproduct_two_site(&x, &t, &t).unwrap(), MatrixC::identity(16).scale(c(6.0)));
    }

    #[test]
    fn four_term_equals_group_like_form() {
        let rep = cyclic(3);
        let four = determinant_four_term(&rep, &rep).unwrap();
        let dm = quantum_determinant(&rep);
        assert!(four.dist(&kron(&dm, &dm)) < 1e-12);
    }

    #[test]
    fn chain_coassociativity() {
        let rep = cyclic(3);
        let sites = [&rep, &rep, &rep];
        for g in Generator::ALL {
            let full = coproduct_chain(g, &sites).unwrap();
            let split = coproduct_chain_split(g, &sites, 1).unwrap();
            assert!(full.dist(&split) < 1e-10, "{}", g.name());
        }
        let dm = quantum_determinant(&rep);
        let ddd = coproduct_chain(Generator::D, &sites).unwrap();
        assert!(ddd.dist(&kron(&kron(&dm, &dm), &dm)) < 1e-10);
        assert_eq!(coproduct_chain(Generator::C12, &[&rep]).unwrap(), rep.c12);
        assert!(matches!(coproduct_chain(Generator::C11, &[]), Err(DdqError::EmptyChain)));
    }

    #[test]
    fn two_site_matches_chain_of_two() {
        let rep = quad_21();
        for g in Generator::ALL {
            let a = coproduct_two_site(&ElementExpr::generator(g), &rep, &rep).unwrap();
            let b = coproduct_chain(g, &[&rep, &rep]).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = GeneratorQuad::trivial(2, c(2.0));
        let b = GeneratorQuad::trivial(3, c(2.0));
        assert!(matches!(
            coproduct_two_site(&ElementExpr::generator(Generator::C11), &a, &b),
            Err(DdqError::DimensionMismatch(_))
        ));
        assert!(GeneratorQuad::new(
            MatrixC::identity(2),
            MatrixC::identity(3),
            MatrixC::identity(2),
            MatrixC::identity(2),
            c(2.0)
        )
        .is_err());
    }

    #[test]
    fn inner_action_counit() {
        let rep = quad_21();
        let act = InnerAction::new(&rep).unwrap();
        assert!(act.counit_defect(&MatrixC::identity(4)).unwrap() < 1e-12);
        let t = GeneratorQuad::trivial(4, c(2.0));
        let v = e(1, 2);
        assert_eq!(adjoint_action(&t, 1, 1, &v).unwrap(), v);
        assert!(adjoint_action(&t, 1, 2, &v).unwrap().is_zero());
        assert!(matches!(act.act(0, 1, &v), Err(DdqError::BadIndex(0, 1))));
    }

    #[test]
    fn inner_action_fixes_exactly_the_commutant() {
        let rep = quad_21();
        let act = InnerAction::new(&rep).unwrap();
        let comm = numerics::commutant(&rep.generators().map(|m| m.clone()), 4, &tol()).unwrap();
        for v in &comm {
            assert!(act.counit_defect(v).unwrap() < 1e-10);
        }
        // [e13, C21] = -e43·e13 ≠ 0.
        assert!(act.counit_defect(&e(1, 3)).unwrap() > 1e-3);
    }

    #[test]
    fn singular_block_matrix() {
        let mut rep = GeneratorQuad::trivial(2, c(2.0));
        rep.c22 = MatrixC::zeros(2, 2);
        assert!(matches!(
            InnerAction::new(&rep),
            Err(DdqError::Numerics(NumericsError::Singular { .. }))
        ));
    }

    #[test]
    fn admissibility_examples() {
        let q = c(2.0);
        let a = MatrixC::from_real_diag(&[4.0, 2.0, 1.0, 1.0]);
        let b = e(1, 2);
        let adm = admissibility(&a, &b, q, &tol(), 1).unwrap();
        // Solutions are spanned by e32 and e42, both annihilating e12.
        assert_eq!(adm.dim, 2);
        assert!(!adm.admissible);
        for x in &adm.basis {
            assert!(x[(0, 1)].norm() < 1e-12 && x[(1, 0)].norm() < 1e-12);
        }

        let zero = admissibility(&a, &MatrixC::zeros(4, 4), q, &tol(), 1).unwrap();
        assert!(!zero.admissible);

        let id = MatrixC::identity(4);
        assert!(matches!(
            admissibility(&id, &id, q, &tol(), 1),
            Err(DdqError::PremiseViolation(_))
        ));

        let rep = cyclic(3);
        let adm = admissibility(&quantum_determinant(&rep), &rep.c12, rep.q, &tol(), 1).unwrap();
        assert!(adm.admissible);
        assert!(numerics::in_span(&rep.c21, &adm.basis, &tol()));
    }
}
