//! The Clifford algebra C(1,3) in the Dirac representation.
//!
//! Convention: `γ0 = diag(1, 1, -1, -1)` and `γk = [[0, σk], [-σk, 0]]` in
//! 2×2 blocks, metric `g = diag(1, -1, -1, -1)`. With this choice the
//! mass/spin projector products `m±s↑↓` are the diagonal matrix units.

use itertools::Itertools;
use serde::Serialize;

use crate::numerics::{c, MatrixC, C64, ONE, ZERO};

pub const CONVENTION: &str =
    "Dirac basis: g0=diag(1,1,-1,-1), gk=[[0,sk],[-sk,0]], g=diag(1,-1,-1,-1)";

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct GammaSet {
    pub gamma: [MatrixC; 4],
    pub metric: [f64; 4],
}

#[derive(Debug, Clone)]
pub struct ProjectorSet {
    pub m_plus: MatrixC,
    pub m_minus: MatrixC,
    pub s_up: MatrixC,
    pub s_down: MatrixC,
}

fn pauli(k: usize) -> [[C64; 2]; 2] {
    match k {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => unreachable!("pauli index {k}"),
    }
}

pub fn build_gammas() -> GammaSet {
    let g0 = MatrixC::from_real_diag(&[1.0, 1.0, -1.0, -1.0]);
    let spatial = |k: usize| {
        let s = pauli(k);
        let mut m = MatrixC::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                m[(a, b + 2)] = s[a][b];
                m[(a + 2, b)] = -s[a][b];
            }
        }
        m
    };
    GammaSet {
        gamma: [g0, spatial(1), spatial(2), spatial(3)],
        metric: [1.0, -1.0, -1.0, -1.0],
    }
}

fn permutation_sign(p: &[usize]) -> f64 {
    let inversions = (0..p.len())
        .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl GammaSet {
    pub fn g(&self, mu: usize, nu: usize) -> f64 {
        if mu == nu {
            self.metric[mu]
        } else {
            0.0
        }
    }

    pub fn product(&self, idx: &[usize]) -> MatrixC {
        idx.iter()
            .fold(MatrixC::identity(4), |acc, &k| acc * &self.gamma[k])
    }

    /// Fully antisymmetrized product `γ_[i1 … ik]`, zero when any index
    /// repeats. For two indices this is `(γμγν - γνγμ)/2`.
    pub fn antisym(&self, idx: &[usize]) -> MatrixC {
        let k = idx.len();
        let mut acc = MatrixC::zeros(4, 4);
        let mut count = 0usize;
        for perm in (0..k).permutations(k) {
            let sign = permutation_sign(&perm);
            let word: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
            acc = acc + self.product(&word).scale(c(sign));
            count += 1;
        }
        acc.scale(c(1.0 / count.max(1) as f64))
    }

    /// The 16 monomials `1, γμ, γμν (μ<ν), γρμν (ρ<μ<ν), γ0123`.
    pub fn monomials(&self) -> Vec<(String, MatrixC)> {
        let mut out = Vec::with_capacity(16);
        for k in 0..=4 {
            for idx in (0..4).combinations(k) {
                let label = if idx.is_empty() {
                    "1".to_string()
                } else {
                    format!("g{}", idx.iter().join(""))
                };
                out.push((label, self.product(&idx)));
            }
        }
        out
    }
}

pub fn projectors(g: &GammaSet) -> ProjectorSet {
    let id = MatrixC::identity(4);
    let half = c(0.5);
    let ig12 = g.antisym(&[1, 2]).scale(I);
    ProjectorSet {
        m_plus: (&id + &g.gamma[0]).scale(half),
        m_minus: (&id - &g.gamma[0]).scale(half),
        s_up: (&id + &ig12).scale(half),
        s_down: (&id - &ig12).scale(half),
    }
}

/// `(γ1 + iγ2)γ3 / 2`, which equals `e12 + e34` in the Dirac basis.
pub fn raising_gamma(g: &GammaSet) -> MatrixC {
    (&g.gamma[1] + &g.gamma[2].scale(I)) * &g.gamma[3] * c(0.5)
}

/// `(γ1 - iγ2) / 2`, which equals `e23 - e41` in the Dirac basis.
pub fn lowering_gamma(g: &GammaSet) -> MatrixC {
    (&g.gamma[1] - &g.gamma[2].scale(I)) * c(0.5)
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaDecomposition {
    pub labels: Vec<String>,
    pub coeffs: Vec<C64>,
}

impl GammaDecomposition {
    pub fn get(&self, label: &str) -> Option<C64> {
        self.labels.iter().position(|l| l == label).map(|i| self.coeffs[i])
    }

    pub fn reconstruct(&self, g: &GammaSet) -> MatrixC {
        g.monomials()
            .iter()
            .zip(&self.coeffs)
            .fold(MatrixC::zeros(4, 4), |acc, ((_, m), &k)| acc + m.scale(k))
    }
}

/// Coefficients of `m` on the monomial basis, via the trace form
/// `c_A = tr(Γ_A^{-1} m)/4` with `Γ_A^{-1} = Γ_A / Γ_A²` and `Γ_A² = ±1`.
pub fn gamma_decompose(g: &GammaSet, m: &MatrixC) -> GammaDecomposition {
    assert_eq!(m.shape(), (4, 4), "gamma_decompose expects a 4x4 matrix");
    let (labels, coeffs) = g
        .monomials()
        .into_iter()
        .map(|(label, gm)| {
            let square = (&gm * &gm)[(0, 0)];
            let inv = gm.scale(ONE / square);
            (label, (&inv * m).trace() / 4.0)
        })
        .unzip();
    GammaDecomposition { labels, coeffs }
}

#[derive(Debug, Clone, Serialize)]
pub struct CliffordResiduals {
    pub anticommutator: f64,
    pub vector_vector: f64,
    pub vector_bivector: f64,
    pub vector_trivector: f64,
    pub instances: usize,
}

impl CliffordResiduals {
    pub fn max(&self) -> f64 {
        self.anticommutator
            .max(self.vector_vector)
            .max(self.vector_bivector)
            .max(self.vector_trivector)
    }
}

/// Checks every index instance of
/// `γμγν = gμν + γμν`,
/// `γργμν = gρμ γν − gρν γμ + γρμν`,
/// `γλγμνρ = gλμ γνρ − gλν γμρ + gλρ γμν + γλμνρ`,
/// and the anticommutator table.
pub fn clifford_relation_suite(g: &GammaSet) -> CliffordResiduals {
    let id = MatrixC::identity(4);
    let gm = |mu: usize, nu: usize| c(g.g(mu, nu));
    let mut out = CliffordResiduals {
        anticommutator: 0.0,
        vector_vector: 0.0,
        vector_bivector: 0.0,
        vector_trivector: 0.0,
        instances: 0,
    };
    for mu in 0..4 {
        for nu in 0..4 {
            let anti = &g.gamma[mu] * &g.gamma[nu] + &g.gamma[nu] * &g.gamma[mu];
            out.anticommutator = out.anticommutator.max(anti.dist(&id.scale(gm(mu, nu) * 2.0)));
            let lhs = &g.gamma[mu] * &g.gamma[nu];
            let rhs = id.scale(gm(mu, nu)) + g.antisym(&[mu, nu]);
            out.vector_vector = out.vector_vector.max(lhs.dist(&rhs));
            out.instances += 2;
        }
    }
    for rho in 0..4 {
        for mu in 0..4 {
            for nu in 0..4 {
                let lhs = &g.gamma[rho] * &g.antisym(&[mu, nu]);
                let rhs = g.gamma[nu].scale(gm(rho, mu)) - g.gamma[mu].scale(gm(rho, nu))
                    + g.antisym(&[rho, mu, nu]);
                out.vector_bivector = out.vector_bivector.max(lhs.dist(&rhs));
                out.instances += 1;
            }
        }
    }
    for lam in 0..4 {
        for mu in 0..4 {
            for nu in 0..4 {
                for rho in 0..4 {
                    let lhs = &g.gamma[lam] * &g.antisym(&[mu, nu, rho]);
                    let rhs = g.antisym(&[nu, rho]).scale(gm(lam, mu))
                        - g.antisym(&[mu, rho]).scale(gm(lam, nu))
                        + g.antisym(&[mu, nu]).scale(gm(lam, rho))
                        + g.antisym(&[lam, mu, nu, rho]);
                    out.vector_trivector = out.vector_trivector.max(lhs.dist(&rhs));
                    out.instances += 1;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize, j: usize) -> MatrixC {
        MatrixC::unit(4, i - 1, j - 1)
    }

    #[test]
    fn squares_follow_metric() {
        let g = build_gammas();
        let id = MatrixC::identity(4);
        assert_eq!(&g.gamma[0] * &g.gamma[0], id);
        for k in 1..4 {
            assert_eq!(&g.gamma[k] * &g.gamma[k], id.scale(c(-1.0)));
        }
        let anti = &g.gamma[0] * &g.gamma[1] + &g.gamma[1] * &g.gamma[0];
        assert!(anti.is_zero());
    }

    #[test]
    fn hermiticity() {
        let g = build_gammas();
        assert_eq!(g.gamma[0].adjoint(), g.gamma[0]);
        for k in 1..4 {
            assert_eq!(g.gamma[k].adjoint(), g.gamma[k].scale(c(-1.0)));
        }
    }

    #[test]
    fn projector_products_are_matrix_units() {
        let g = build_gammas();
        let p = projectors(&g);
        assert_eq!(&p.m_plus * &p.s_up, e(1, 1));
        assert_eq!(&p.m_plus * &p.s_down, e(2, 2));
        assert_eq!(&p.m_minus * &p.s_up, e(3, 3));
        assert_eq!(&p.m_minus * &p.s_down, e(4, 4));
        assert_eq!(&p.m_plus + &p.m_minus, MatrixC::identity(4));
        assert_eq!(&p.s_up + &p.s_down, MatrixC::identity(4));
        for x in [&p.m_plus, &p.m_minus, &p.s_up, &p.s_down] {
            assert_eq!(x * x, x.clone());
        }
        assert!((&p.m_plus * &p.m_minus).is_zero());
        assert!((&p.s_up * &p.s_down).is_zero());
        assert!(p.m_plus.commutator(&p.s_up).is_zero());
        assert!(p.m_minus.commutator(&p.s_down).is_zero());
    }

    #[test]
    fn off_diagonal_gamma_units() {
        let g = build_gammas();
        let p = projectors(&g);
        let r = raising_gamma(&g);
        assert_eq!(&p.m_plus * &r, e(1, 2));
        assert_eq!(&p.m_minus * &r, e(3, 4));
        let l = lowering_gamma(&g);
        assert_eq!(&p.m_plus * &l, e(2, 3));
    }

    #[test]
    fn decompose_examples() {
        let g = build_gammas();
        let d = gamma_decompose(&g, &MatrixC::identity(4));
        assert!((d.get("1").unwrap() - ONE).norm() < 1e-15);
        assert!(d.coeffs.iter().skip(1).all(|z| z.norm() < 1e-15));

        let d = gamma_decompose(&g, &g.gamma[2]);
        for (l, z) in d.labels.iter().zip(&d.coeffs) {
            let want = if l == "g2" { ONE } else { ZERO };
            assert!((z - want).norm() < 1e-15, "{l}");
        }

        // e11 = (1 + γ0)(1 + iγ12)/4 = (1 + γ0 + iγ12 + iγ0γ12)/4.
        let d = gamma_decompose(&g, &e(1, 1));
        let quarter = c(0.25);
        for (l, z) in d.labels.iter().zip(&d.coeffs) {
            let want = match l.as_str() {
                "1" | "g0" => quarter,
                "g12" | "g012" => I * 0.25,
                _ => ZERO,
            };
            assert!((z - want).norm() < 1e-15, "{l}: {z}");
        }
    }

    #[test]
    fn decompose_reconstructs_matrix_units() {
        let g = build_gammas();
        for i in 1..=4 {
            for j in 1..=4 {
                let m = e(i, j);
                let d = gamma_decompose(&g, &m);
                assert!(d.reconstruct(&g).dist(&m) < 1e-14);
            }
        }
    }

    #[test]
    fn monomials_are_independent() {
        let g = build_gammas();
        let mats: Vec<MatrixC> = g.monomials().into_iter().map(|(_, m)| m).collect();
        let tol = crate::numerics::Tolerance::default();
        assert_eq!(crate::numerics::span_dim(&mats, &tol).unwrap(), 16);
    }

    #[test]
    fn relation_suite_vanishes() {
        let g = build_gammas();
        let r = clifford_relation_suite(&g);
        assert_eq!(r.anticommutator, 0.0);
        assert!(r.max() < 1e-14, "{r:?}");
        assert_eq!(r.instances, 32 + 64 + 256);
    }

    #[test]
    fn spot_checks() {
        let g = build_gammas();
        // γ0γ12 equals the antisymmetrized trivector since 0,1,2 are distinct.
        let lhs = &g.gamma[0] * &g.antisym(&[1, 2]);
        assert_eq!(lhs.dist(&g.antisym(&[0, 1, 2])), 0.0);
        // γ1γ01 = g10 γ1 − g11 γ0 + γ101 = γ0.
        let lhs = &g.gamma[1] * &g.antisym(&[0, 1]);
        assert_eq!(lhs.dist(&g.gamma[0]), 0.0);
        assert!(g.antisym(&[1, 0, 1]).is_zero());
    }
}
