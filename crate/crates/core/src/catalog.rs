//! The tabulated inner actions on 4×4 matrices, with their expected
//! operator-algebra and invariant data, and the cyclic module at a root of
//! unity.
//!
//! Every matrix is stored as the printed expression over matrix units.
//! Printed side conditions become machine constraints; where a row's
//! condition leaves a choice (ties such as `delta := gamma`, or one of
//! several alternatives) the choice is encoded separately and picked by the
//! sampler. Nothing here adjusts a printed matrix.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::ddq::GeneratorQuad;
use crate::expr::{self, Env, ExprError};
use crate::numerics::{kron, MatrixC, Tolerance, C64, ONE, ZERO};

pub const DIM: usize = 4;

/// `q^m ≠ 1` is checked for `1 ≤ m ≤ Q_ORDER_BOUND`.
pub const Q_ORDER_BOUND: u32 = 24;

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown case '{0}'")]
    UnknownCase(String),
    #[error("{0} violated")]
    Constraint(String),
    #[error("q = {0} is zero or a root of unity of order <= {Q_ORDER_BOUND}")]
    BadQ(C64),
    #[error("missing parameter '{0}'")]
    MissingParam(String),
    #[error("no admissible parameters found for case {0}")]
    Exhausted(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid cyclic module: {0}")]
    Cyclic(String),
}

pub type Result<T> = std::result::Result<T, CatalogError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PatternCell {
    Zero,
    Free,
    Tied(u8),
}

/// Support pattern of a subspace of n×n matrices: zero cells, free cells,
/// and classes of cells constrained to be equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspacePattern {
    pub n: usize,
    pub cells: Vec<PatternCell>,
}

impl SubspacePattern {
    /// Rows separated by `/`, cells by whitespace: `0`, `*`, or a class
    /// label. Labels are local to one pattern.
    pub fn parse(src: &str) -> std::result::Result<Self, String> {
        let rows: Vec<Vec<&str>> = src.split('/').map(|r| r.split_whitespace().collect()).collect();
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(format!("pattern '{src}' is not square"));
        }
        let mut labels: Vec<&str> = Vec::new();
        let mut cells = Vec::with_capacity(n * n);
        for tok in rows.iter().flatten() {
            cells.push(match *tok {
                "0" => PatternCell::Zero,
                "*" => PatternCell::Free,
                label => {
                    let id = labels.iter().position(|l| *l == label).unwrap_or_else(|| {
                        labels.push(label);
                        labels.len() - 1
                    });
                    PatternCell::Tied(id as u8)
                }
            });
        }
        Ok(Self { n, cells })
    }

    pub fn get(&self, i: usize, j: usize) -> PatternCell {
        self.cells[i * self.n + j]
    }

    pub fn classes(&self) -> Vec<u8> {
        let mut ids: Vec<u8> = self
            .cells
            .iter()
            .filter_map(|c| match c {
                PatternCell::Tied(k) => Some(*k),
                _ => None,
            })
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn dimension(&self) -> usize {
        self.cells.iter().filter(|c| **c == PatternCell::Free).count() + self.classes().len()
    }

    /// Spanning set of the subspace: one unit per free cell and one sum of
    /// units per tie class.
    pub fn basis(&self) -> Vec<MatrixC> {
        let n = self.n;
        let mut out: Vec<MatrixC> = (0..n * n)
            .filter(|&k| self.cells[k] == PatternCell::Free)
            .map(|k| MatrixC::unit(n, k / n, k % n))
            .collect();
        for class in self.classes() {
            let mut m = MatrixC::zeros(n, n);
            for k in 0..n * n {
                if self.cells[k] == PatternCell::Tied(class) {
                    m[(k / n, k % n)] = ONE;
                }
            }
            out.push(m);
        }
        out
    }

    /// Canonical text form, labelling classes `a`, `b`, … in first-seen order.
    pub fn render(&self) -> String {
        let mut order: Vec<u8> = Vec::new();
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| match self.get(i, j) {
                        PatternCell::Zero => "0".to_string(),
                        PatternCell::Free => "*".to_string(),
                        PatternCell::Tied(k) => {
                            let pos = order.iter().position(|x| *x == k).unwrap_or_else(|| {
                                order.push(k);
                                order.len() - 1
                            });
                            ((b'a' + pos as u8) as char).to_string()
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        rows.join(" / ")
    }
}

impl Serialize for SubspacePattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

/// Machine reading of a coefficient cell, normalized up to overall scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoeffForm {
    /// The printed triples `(A, B, C)` span the intended set.
    Span(&'static [[&'static str; 3]]),
    /// All of `(A, B, C)`-space.
    Arbitrary,
    /// The cell does not define a set of triples.
    IllFormed(&'static str),
}

#[derive(Debug, Clone, Copy)]
pub struct CoeffCell {
    pub text: &'static str,
    pub form: CoeffForm,
}

impl CoeffCell {
    pub fn is_well_formed(&self) -> bool {
        !matches!(self.form, CoeffForm::IllFormed(_))
    }

    /// Printed triples evaluated at the given parameters.
    pub fn triples(&self, env: &Env) -> Result<Vec<[C64; 3]>> {
        match self.form {
            CoeffForm::Span(rows) => rows
                .iter()
                .map(|row| {
                    let mut t = [ZERO; 3];
                    for (slot, src) in t.iter_mut().zip(row) {
                        *slot = expr::eval_scalar(src, env)?;
                    }
                    Ok(t)
                })
                .collect(),
            CoeffForm::Arbitrary => Ok(vec![[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]]),
            CoeffForm::IllFormed(_) => Ok(Vec::new()),
        }
    }
}

/// A variant of a row that does satisfy the relations, kept for reference.
#[derive(Debug, Clone, Copy)]
pub struct Correction {
    pub c22: &'static str,
    pub note: &'static str,
}

#[derive(Debug, Clone, Copy)]
pub struct CaseSpec {
    pub id: &'static str,
    pub family: u8,
    pub params: &'static [&'static str],
    pub c12: &'static str,
    pub c21: &'static str,
    pub c11: &'static str,
    pub c22: &'static str,
    /// Side condition as printed.
    pub constraint_text: &'static str,
    /// Checkable reading of the side condition, see [`check_constraint`].
    pub constraints: &'static [&'static str],
    /// Assignments the sampler applies, always.
    pub ties: &'static [&'static str],
    /// Alternative assignment sets; the sampler picks one.
    pub branches: &'static [&'static [&'static str]],
    pub r_pattern: &'static str,
    pub i_pattern: &'static str,
    pub dim_r: usize,
    pub dim_i: usize,
    pub coeff: CoeffCell,
    pub correction: Option<Correction>,
}

pub const FAMILY_D: [&str; 6] = [
    "diag(q^2,q,1,1)",
    "diag(q^2,q,q,1)",
    "diag(q^2,q^2,q,1)",
    "diag(alpha,q^2,q,1)",
    "diag(q^2,q^2,q,1)+e12",
    "diag(q^2,q,1,1)+e34",
];

const FAMILY4: &[&str] = &[
    "alpha != 0",
    "alpha != q^-1",
    "alpha != 1",
    "alpha != q",
    "alpha != q^2",
    "alpha != q^3",
];
const FAMILY4_TEXT: &str = "alpha != 0, q^-1, 1, q, q^2, q^3";

const A0: &[[&str; 3]] = &[["0", "1", "0"]];
const B0: &[[&str; 3]] = &[["0", "0", "1"]];
const AC: &[[&str; 3]] = &[["-1/q", "1", "1/q"]];
const AB: &[[&str; 3]] = &[["-1/q", "1/q", "1"]];

macro_rules! cell {
    ($text:expr, $rows:expr) => {
        CoeffCell {
            text: $text,
            form: CoeffForm::Span($rows),
        }
    };
}

const DIAG_R: &str = "* 0 0 0 / 0 * 0 0 / 0 0 * 0 / 0 0 0 *";

pub static CASES: &[CaseSpec] = &[
    CaseSpec {
        id: "1.1",
        family: 1,
        params: &["alpha", "beta"],
        c12: "alpha*e12 + beta*e24",
        c21: "0",
        c11: "1 + e34",
        c22: "diag(q^2,q,1,1) - e34",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "* * 0 0 / 0 * 0 * / 0 0 e * / 0 0 0 e",
        i_pattern: "a 0 0 0 / 0 a 0 0 / 0 0 a g / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=C_j=0", A0),
        correction: None,
    },
    CaseSpec {
        id: "1.2",
        family: 1,
        params: &["alpha", "beta"],
        c12: "0",
        c21: "alpha*e21 + beta*e32",
        c11: "diag(1,q^-1,q^-2,q^-2) + e34",
        c22: "q^2 - q^4*e34",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "* 0 0 0 / * * 0 0 / 0 * e * / 0 0 0 e",
        i_pattern: "a 0 0 0 / 0 a 0 0 / 0 0 a b / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=B_j=0", B0),
        correction: None,
    },
    CaseSpec {
        id: "1.3",
        family: 1,
        params: &["alpha", "beta"],
        c12: "alpha*e12",
        c21: "beta*e32",
        c11: "diag(1,1,q^-1,q^-1) + e34",
        c22: "diag(q^2,q,q,q) - q^2*e34",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "* * 0 0 / 0 * 0 0 / 0 * e * / 0 0 0 e",
        i_pattern: "a 0 0 0 / 0 a 0 0 / 0 0 a b / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=-C_j=-alpha*q^-1, B_j=alpha", AC),
        correction: None,
    },
    CaseSpec {
        id: "2.1",
        family: 2,
        params: &["alpha", "delta", "lambda"],
        c12: "q*lambda*delta*e13",
        c21: "delta*e43",
        c11: "diag(1,alpha,1,q^-1)",
        c22: "diag(q^2,q/alpha,q,q)",
        constraint_text: "alpha != 1",
        constraints: &["alpha != 1"],
        ties: &[],
        branches: &[],
        r_pattern: "* 0 * 0 / 0 * 0 0 / 0 0 * 0 / 0 0 * *",
        i_pattern: "a 0 0 0 / 0 b 0 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!(
            "A_j=-C_j=alpha*(q^-1-1)/(q-1), B_j=alpha",
            &[["(q^-1-1)/(q-1)", "1", "-(q^-1-1)/(q-1)"]]
        ),
        correction: None,
    },
    CaseSpec {
        id: "2.2",
        family: 2,
        params: &["alpha", "beta", "gamma"],
        c12: "0",
        c21: "0",
        c11: "diag(1,alpha,beta,gamma)",
        c22: "diag(q^2,q/alpha,q/beta,1/gamma)",
        constraint_text: "alpha != beta != gamma != 1",
        constraints: &["distinct(alpha,beta,gamma,1)"],
        ties: &[],
        branches: &[],
        r_pattern: DIAG_R,
        i_pattern: "a 0 0 0 / 0 b 0 0 / 0 0 g 0 / 0 0 0 d",
        dim_r: 4,
        dim_i: 4,
        coeff: cell!("A_j=C_j=0", A0),
        correction: None,
    },
    CaseSpec {
        id: "2.3",
        family: 2,
        params: &["alpha", "beta", "gamma"],
        c12: "0",
        c21: "0",
        c11: "diag(1,alpha,beta,gamma)",
        c22: "diag(q^2,q/alpha,q/beta,1/gamma)",
        constraint_text: "alpha != beta",
        constraints: &["alpha != beta"],
        ties: &[],
        branches: &[],
        r_pattern: DIAG_R,
        i_pattern: "a 0 0 0 / 0 b 0 0 / 0 0 g 0 / 0 0 0 d",
        dim_r: 4,
        dim_i: 4,
        coeff: cell!("A_j=C_j=0", A0),
        correction: None,
    },
    CaseSpec {
        id: "2.4",
        family: 2,
        params: &["alpha", "beta"],
        c12: "0",
        c21: "0",
        c11: "diag(1,alpha,alpha,beta) + e23",
        c22: "diag(q^2,q/alpha,q/alpha,1/beta) - q/alpha^2*e23",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 e * 0 / 0 0 e 0 / 0 0 0 *",
        i_pattern: "a 0 0 0 / 0 g d 0 / 0 0 g 0 / 0 0 0 b",
        dim_r: 4,
        dim_i: 4,
        coeff: cell!("A_j=B_j=0", B0),
        correction: None,
    },
    CaseSpec {
        id: "2.5",
        family: 2,
        params: &["delta", "lambda"],
        c12: "q*lambda*delta*e13",
        c21: "delta*e43",
        c11: "diag(1,1,1,q^-1) + e23",
        c22: "diag(q^2,q,q,q) - q*e23",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "* 0 * 0 / 0 e * 0 / 0 0 e 0 / 0 0 * *",
        i_pattern: "a 0 0 0 / 0 a b 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!(
            "A_j=-C_j=alpha*(q^-1-1)/(q-1), B_j=alpha",
            &[["(q^-1-1)/(q-1)", "1", "-(q^-1-1)/(q-1)"]]
        ),
        correction: None,
    },
    CaseSpec {
        id: "2.6",
        family: 2,
        params: &["alpha", "beta"],
        c12: "0",
        c21: "0",
        c11: "diag(1,alpha,alpha,beta) + e23",
        c22: "diag(q^2,q/alpha,q/alpha,1/beta) - q/alpha^2*e23",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 e * 0 / 0 0 e 0 / 0 0 0 *",
        i_pattern: "a 0 0 0 / 0 b g 0 / 0 0 b 0 / 0 0 0 a",
        dim_r: 4,
        dim_i: 3,
        coeff: cell!("A_j=B_j=0", B0),
        correction: None,
    },
    CaseSpec {
        id: "3.1",
        family: 3,
        params: &["alpha", "gamma"],
        c12: "alpha*e13 + gamma*e34",
        c21: "0",
        c11: "1 + e12",
        c22: "diag(q^2,q^2,1,1)",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * * * / 0 e 0 0 / 0 0 * * / 0 0 0 *",
        i_pattern: "a b 0 0 / 0 a 0 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 7,
        dim_i: 2,
        coeff: cell!("A_j=C_j=0", A0),
        correction: Some(Correction {
            c22: "diag(q^2,q^2,q,1) - q^2*e12",
            note: "printed C22 fails c22c12 = q c12c22 and the family determinant",
        }),
    },
    CaseSpec {
        id: "3.2",
        family: 3,
        params: &["beta", "gamma"],
        c12: "gamma*e34",
        c21: "beta*e32",
        c11: "diag(q,q,1,1) + e12",
        c22: "diag(q,q,q,1) - e12",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * 0 0 / 0 e 0 0 / 0 * * * / 0 0 0 *",
        i_pattern: "a b 0 0 / 0 a 0 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=-C_j=-q^-1*alpha, B_j=alpha", AC),
        correction: None,
    },
    CaseSpec {
        id: "3.3",
        family: 3,
        params: &["alpha", "gamma"],
        c12: "gamma*e34",
        c21: "0",
        c11: "diag(alpha,alpha,1,1) + e12",
        c22: "diag(q^2/alpha,q^2/alpha,q,1) - q^2/alpha^2*e12",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * 0 0 / 0 e 0 0 / 0 0 * * / 0 0 0 *",
        i_pattern: "b g 0 0 / 0 b 0 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 5,
        dim_i: 3,
        coeff: cell!("A_j=C_j=0", A0),
        correction: None,
    },
    CaseSpec {
        id: "3.4",
        family: 3,
        params: &["alpha", "beta", "gamma"],
        c12: "beta*e23",
        c21: "gamma*e43",
        c11: "diag(alpha,q,q,1)",
        c22: "diag(q^2/alpha,q,1,1)",
        constraint_text: "alpha != q",
        constraints: &["alpha != q"],
        ties: &[],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 * * 0 / 0 0 * 0 / 0 0 * *",
        i_pattern: "a 0 0 0 / 0 b 0 0 / 0 0 b 0 / 0 0 0 b",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=-B_j=-q^-1*alpha, C_j=alpha", AB),
        correction: None,
    },
    CaseSpec {
        id: "3.5",
        family: 3,
        params: &["alpha", "gamma"],
        c12: "0",
        c21: "gamma*e43",
        c11: "diag(alpha,alpha,q,1) + e12",
        c22: "diag(q^2/alpha,q^2/alpha,1,1) - q^2/alpha^2*e12",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * 0 0 / 0 e 0 0 / 0 0 * 0 / 0 0 * *",
        i_pattern: "b f 0 0 / 0 b 0 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 5,
        dim_i: 3,
        coeff: cell!("A_j=B_j=0", B0),
        correction: None,
    },
    CaseSpec {
        id: "3.6",
        family: 3,
        params: &["alpha", "gamma"],
        c12: "alpha*e13",
        c21: "gamma*e43",
        c11: "diag(q,alpha,q,1)",
        c22: "diag(q,q^2/alpha,1,1)",
        constraint_text: "alpha != q",
        constraints: &["alpha != q"],
        ties: &[],
        branches: &[],
        r_pattern: "* 0 * 0 / 0 * 0 0 / 0 0 * 0 / 0 0 * *",
        i_pattern: "a 0 0 0 / 0 b 0 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=-B_j=-q^-1*alpha, C_j=alpha", AB),
        correction: None,
    },
    CaseSpec {
        id: "3.7",
        family: 3,
        params: &["alpha", "gamma"],
        c12: "alpha*e13",
        c21: "gamma*e43",
        c11: "diag(q,q,q,1) + e12",
        c22: "diag(q,q,1,1) - e12",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * * 0 / 0 e 0 0 / 0 0 * * / 0 0 0 *",
        i_pattern: "a b 0 0 / 0 a 0 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=-C_j=-q^-1*alpha, B_j=alpha", AC),
        correction: None,
    },
    CaseSpec {
        id: "4.1",
        family: 4,
        params: &["alpha", "beta", "gamma", "delta"],
        c12: "0",
        c21: "gamma*e32 + beta*e43",
        c11: "diag(delta,q^2,q,1)",
        c22: "diag(alpha/delta,1,1,1)",
        constraint_text: FAMILY4_TEXT,
        constraints: FAMILY4,
        ties: &[],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 * 0 0 / 0 * * 0 / 0 0 * *",
        i_pattern: "b 0 0 0 / 0 g 0 0 / 0 0 g 0 / 0 0 0 g",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=B_j=0", B0),
        correction: None,
    },
    CaseSpec {
        id: "4.2",
        family: 4,
        params: &["alpha", "beta", "gamma", "delta"],
        c12: "beta*e23 + gamma*e34",
        c21: "0",
        c11: "diag(delta,1,1,1)",
        c22: "diag(alpha/delta,q^2,q,1)",
        constraint_text: FAMILY4_TEXT,
        constraints: FAMILY4,
        ties: &[],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 * * 0 / 0 0 * * / 0 0 0 *",
        i_pattern: "g 0 0 0 / 0 b 0 0 / 0 0 b 0 / 0 0 0 b",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=C_j=0", A0),
        correction: None,
    },
    CaseSpec {
        id: "4.3",
        family: 4,
        params: &["alpha", "beta", "gamma", "delta"],
        c12: "beta*e34",
        c21: "gamma*e32",
        c11: "diag(delta,q,1,1)",
        c22: "diag(alpha/delta,q,q,1)",
        constraint_text: FAMILY4_TEXT,
        constraints: FAMILY4,
        ties: &[],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 * 0 0 / 0 * * * / 0 0 0 *",
        i_pattern: "g 0 0 0 / 0 b 0 0 / 0 0 b 0 / 0 0 0 b",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=-C_j=-q^-1*beta, B_j=beta", AC),
        correction: None,
    },
    CaseSpec {
        id: "4.4",
        family: 4,
        params: &["alpha", "beta", "gamma", "delta"],
        c12: "gamma*e23",
        c21: "beta*e43",
        c11: "diag(delta,q,q,1)",
        c22: "diag(alpha/delta,q,1,1)",
        constraint_text: FAMILY4_TEXT,
        constraints: FAMILY4,
        ties: &[],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 * * 0 / 0 0 * 0 / 0 0 * *",
        i_pattern: "g 0 0 0 / 0 b 0 0 / 0 0 b 0 / 0 0 0 b",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=-B_j=-q^-1*beta, C_j=beta", AB),
        correction: None,
    },
    CaseSpec {
        id: "5.1",
        family: 5,
        params: &["alpha", "beta", "gamma"],
        c12: "0",
        c21: "alpha*e43",
        c11: "diag(q^2*beta,q^2*beta,q*gamma,gamma) + beta*e12",
        c22: "diag(1/beta,1/beta,q/gamma,1/gamma)",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * 0 0 / 0 e 0 0 / 0 0 * 0 / 0 0 * *",
        i_pattern: "b g 0 0 / 0 b 0 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 5,
        dim_i: 3,
        coeff: cell!(
            "A_j=-gamma*B_j-gamma^-1*C_j",
            &[["-gamma", "1", "0"], ["-1/gamma", "0", "1"]]
        ),
        correction: Some(Correction {
            c22: "diag(1/beta,1/beta,1/gamma,1/gamma)",
            note: "printed C22 fails c21c22 = c22c21 and the family determinant",
        }),
    },
    CaseSpec {
        id: "5.2",
        family: 5,
        params: &["alpha", "beta"],
        c12: "alpha*e13 + beta*e34",
        c21: "0",
        c11: "q^2 + e12",
        c22: "diag(1,1,q^-1,q^-2)",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * * 0 / 0 e 0 0 / 0 0 * * / 0 0 0 *",
        i_pattern: "a b 0 0 / 0 a 0 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=C_j=0", A0),
        correction: None,
    },
    CaseSpec {
        id: "5.3",
        family: 5,
        params: &["alpha", "beta"],
        c12: "alpha*e34",
        c21: "beta*e32",
        c11: "diag(q^2,q^2,q,q) + e12",
        c22: "diag(1,1,1,q^-1)",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * 0 0 / 0 e 0 0 / 0 * * 0 / 0 0 * *",
        i_pattern: "a b 0 0 / 0 a 0 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=-B_j=-q^-1*beta, C_j=beta", AB),
        correction: None,
    },
    CaseSpec {
        id: "5.4",
        family: 5,
        params: &["alpha", "beta", "gamma"],
        c12: "alpha*e34",
        c21: "0",
        c11: "diag(q^2*beta,q^2*beta,gamma,gamma) + beta*e12",
        c22: "diag(1/beta,1/beta,q/gamma,1/gamma)",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * 0 0 / 0 e 0 0 / 0 0 * * / 0 0 0 *",
        i_pattern: "a g 0 0 / 0 a 0 0 / 0 0 b 0 / 0 0 0 b",
        dim_r: 5,
        dim_i: 3,
        coeff: cell!("A_j=C_j=0", A0),
        correction: None,
    },
    CaseSpec {
        id: "5.5",
        family: 5,
        params: &["alpha", "beta", "delta"],
        c12: "alpha*e13",
        c21: "0",
        c11: "diag(q^2*beta,q^2*beta,q^2*beta,delta) + beta*e12",
        c22: "diag(1/beta,1/beta,1/(q*beta),1/delta)",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * * 0 / 0 e 0 0 / 0 0 * 0 / 0 0 0 *",
        i_pattern: "a g 0 0 / 0 a 0 0 / 0 0 a 0 / 0 0 0 b",
        dim_r: 5,
        dim_i: 3,
        coeff: cell!("A_j=C_j=0", A0),
        correction: None,
    },
    CaseSpec {
        id: "5.6",
        family: 5,
        params: &["alpha", "beta", "delta"],
        c12: "0",
        c21: "alpha*e32",
        c11: "diag(q^2*beta,q^2*beta,q*beta,delta) + beta*e12",
        c22: "diag(1/beta,1/beta,1/beta,1/delta)",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * 0 0 / 0 e 0 0 / 0 * * 0 / 0 0 0 *",
        i_pattern: "a g 0 0 / 0 a 0 0 / 0 0 a 0 / 0 0 0 b",
        dim_r: 5,
        dim_i: 3,
        coeff: CoeffCell {
            text: "A_j=-beta*B_j=-b*beta",
            form: CoeffForm::IllFormed("uses the undefined symbol b"),
        },
        correction: None,
    },
    CaseSpec {
        id: "5.7",
        family: 5,
        params: &["alpha", "beta", "gamma"],
        c12: "0",
        c21: "0",
        c11: "diag(q^2*alpha,q^2*alpha,beta,gamma) + alpha*e12",
        c22: "diag(1/alpha,1/alpha,q/beta,1/gamma)",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "e * 0 0 / 0 e 0 0 / 0 0 * 0 / 0 0 0 *",
        i_pattern: "g f 0 0 / 0 g 0 0 / 0 0 b 0 / 0 0 0 a",
        dim_r: 4,
        dim_i: 4,
        coeff: cell!("A_j=C_j=0", A0),
        correction: None,
    },
    CaseSpec {
        id: "6.1",
        family: 6,
        params: &["alpha", "beta", "gamma", "delta"],
        c12: "0",
        c21: "alpha*e21",
        c11: "diag(q*beta,beta,gamma,delta) + delta*e34",
        c22: "diag(q/beta,q/beta,1/gamma,1/delta)",
        constraint_text: "either gamma=delta=beta or gamma=delta=q*beta or gamma=delta!=beta or gamma=delta!=q*beta",
        constraints: &["gamma == delta"],
        ties: &["delta := gamma"],
        branches: &[&["beta := gamma"], &["beta := gamma/q"], &[]],
        r_pattern: "* 0 0 0 / * * 0 0 / 0 0 e * / 0 0 0 e",
        i_pattern: "a 0 0 0 / 0 a 0 0 / 0 0 b g / 0 0 0 b",
        dim_r: 5,
        dim_i: 3,
        coeff: cell!("A_j=-q^-1*beta*B_j", &[["-beta/q", "1", "0"], ["0", "0", "1"]]),
        correction: None,
    },
    CaseSpec {
        id: "6.2",
        family: 6,
        params: &["alpha", "beta", "gamma", "delta"],
        c12: "0",
        c21: "alpha*e21",
        c11: "diag(q*beta,beta,gamma,delta) + delta*e34",
        c22: "diag(q/beta,q/beta,1/gamma,1/delta)",
        constraint_text: "neither gamma=delta=beta nor gamma=delta=q*beta nor gamma=delta!=beta nor gamma=delta!=q*beta",
        constraints: &["gamma != delta"],
        ties: &[],
        branches: &[],
        r_pattern: "* 0 0 0 / * * 0 0 / 0 0 * * / 0 0 0 *",
        i_pattern: "b 0 0 0 / 0 b 0 0 / 0 0 a 0 / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!(
            "A_j=(delta*gamma^-1-1)/(gamma-delta)*C_j, B_j=(delta^-1-gamma^-1)/(gamma-delta)*C_j",
            &[["(delta/gamma-1)/(gamma-delta)", "(1/delta-1/gamma)/(gamma-delta)", "1"]]
        ),
        correction: None,
    },
    CaseSpec {
        id: "6.3",
        family: 6,
        params: &["alpha", "beta"],
        c12: "alpha*e24 + beta*e12",
        c21: "0",
        c11: "1 + e34",
        c22: "diag(q^2,q,1,1)",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "* * 0 0 / 0 * 0 * / 0 0 e * / 0 0 0 e",
        i_pattern: "a 0 0 0 / 0 a 0 0 / 0 0 a b / 0 0 0 a",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=C_j=0", A0),
        correction: None,
    },
    CaseSpec {
        id: "6.4",
        family: 6,
        params: &["alpha", "beta", "gamma"],
        c12: "beta*e12",
        c21: "0",
        c11: "diag(alpha,alpha,gamma,gamma) + gamma*e34",
        c22: "diag(q^2/alpha,q/alpha,1/gamma,1/gamma)",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "* * 0 0 / 0 * 0 0 / 0 0 e * / 0 0 0 e",
        i_pattern: "a 0 0 0 / 0 a 0 0 / 0 0 b g / 0 0 0 b",
        dim_r: 5,
        dim_i: 3,
        coeff: cell!("A_j=C_j=0", A0),
        correction: None,
    },
    CaseSpec {
        id: "6.5",
        family: 6,
        params: &["alpha", "beta", "gamma", "delta"],
        c12: "beta*e12",
        c21: "0",
        c11: "diag(alpha,alpha,gamma,delta) + delta*e34",
        c22: "diag(q^2/alpha,q/alpha,1/gamma,1/delta)",
        constraint_text: "gamma != delta",
        constraints: &["gamma != delta"],
        ties: &[],
        branches: &[],
        r_pattern: "* * 0 0 / 0 * 0 0 / 0 0 * * / 0 0 0 *",
        i_pattern: "a 0 0 0 / 0 a 0 0 / 0 0 b 0 / 0 0 0 b",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!(
            "A_j=-gamma^-1, C_j=1, B_j=(delta^-1-gamma^-1)/(gamma-delta)",
            &[["-1/gamma", "(1/delta-1/gamma)/(gamma-delta)", "1"]]
        ),
        correction: None,
    },
    CaseSpec {
        id: "6.6",
        family: 6,
        params: &["alpha", "beta", "gamma", "delta"],
        c12: "delta*e24",
        c21: "0",
        c11: "diag(alpha,beta,gamma,beta) + beta*e34",
        c22: "diag(q^2/alpha,q/beta,1/gamma,1/beta)",
        constraint_text: "either alpha=beta=gamma or gamma^-1=q^2*alpha^-1=beta^-1",
        constraints: &["gamma == beta", "alpha == beta or alpha == q^2*beta"],
        ties: &["gamma := beta"],
        branches: &[&["alpha := beta"], &["alpha := q^2*beta"]],
        r_pattern: "* 0 0 0 / 0 * 0 * / 0 0 e * / 0 0 0 e",
        i_pattern: "a 0 0 0 / 0 b 0 0 / 0 0 b 0 / 0 0 0 b",
        dim_r: 5,
        dim_i: 2,
        coeff: cell!(
            "B_j=-beta^-1*A_j, C_j=(1-q)/(q*beta^-1-beta^-1)*A_j",
            &[["1", "-1/beta", "(1-q)/(q/beta-1/beta)"]]
        ),
        correction: None,
    },
    CaseSpec {
        id: "6.7",
        family: 6,
        params: &["alpha", "beta", "gamma", "delta"],
        c12: "delta*e24",
        c21: "0",
        c11: "diag(alpha,beta,gamma,beta) + beta*e34",
        c22: "diag(q^2/alpha,q/beta,1/gamma,1/beta)",
        constraint_text: "neither alpha=beta=gamma nor 1/gamma=q^2/alpha=1/beta",
        constraints: &["alpha != beta or beta != gamma", "gamma != beta or alpha != q^2*beta"],
        ties: &["gamma := beta"],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 * 0 * / 0 0 * * / 0 0 0 *",
        i_pattern: "a 0 0 0 / 0 b 0 0 / 0 0 b 0 / 0 0 0 b",
        dim_r: 6,
        dim_i: 2,
        coeff: CoeffCell {
            text: "A_j=-beta*B_j, B_j=beta^2*B_j",
            form: CoeffForm::IllFormed("second equation is self-referential"),
        },
        correction: None,
    },
    CaseSpec {
        id: "6.8",
        family: 6,
        params: &["alpha", "beta", "gamma", "delta"],
        c12: "0",
        c21: "beta*e32",
        c11: "diag(alpha,q*gamma,gamma,delta) + delta*e34",
        c22: "diag(q^2/alpha,1/gamma,1/gamma,1/delta)",
        constraint_text: "either alpha=gamma=delta or alpha!=gamma!=delta",
        constraints: &["alpha == gamma", "gamma == delta"],
        ties: &["alpha := gamma", "delta := gamma"],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 * 0 0 / 0 * e * / 0 0 0 e",
        i_pattern: "a 0 0 0 / 0 b 0 0 / 0 0 b g / 0 0 0 b",
        dim_r: 5,
        dim_i: 3,
        coeff: cell!(
            "for alpha!=gamma!=delta: A_j=(1-gamma*delta^-1)/(gamma-delta), C_j=1, B_j=(delta^-1-gamma^-1)/(gamma-delta); for alpha=gamma=delta: A_j=-gamma*B_j",
            &[["-gamma", "1", "0"], ["0", "0", "1"]]
        ),
        correction: None,
    },
    CaseSpec {
        id: "6.9",
        family: 6,
        params: &["alpha", "beta", "gamma", "delta"],
        c12: "0",
        c21: "beta*e32",
        c11: "diag(alpha,q*gamma,gamma,delta) + delta*e34",
        c22: "diag(q^2/alpha,1/gamma,1/gamma,1/delta)",
        constraint_text: "neither alpha=gamma=delta nor alpha!=gamma!=delta",
        constraints: &["gamma == delta", "alpha != gamma"],
        ties: &["delta := gamma"],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 * 0 0 / 0 * * * / 0 0 0 *",
        i_pattern: "a 0 0 0 / 0 b 0 0 / 0 0 b 0 / 0 0 0 b",
        dim_r: 6,
        dim_i: 2,
        coeff: cell!("A_j=B_j=0, C_j=(delta^-1-gamma^-1)/(gamma-delta)", B0),
        correction: None,
    },
    CaseSpec {
        id: "6.10",
        family: 6,
        params: &[],
        c12: "0",
        c21: "0",
        c11: "1 + e34",
        c22: "diag(q^2,q,1,1)",
        constraint_text: "",
        constraints: &[],
        ties: &[],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 * 0 0 / 0 0 e * / 0 0 0 e",
        i_pattern: "a 0 0 0 / 0 b 0 0 / 0 0 g d / 0 0 0 g",
        dim_r: 4,
        dim_i: 4,
        coeff: CoeffCell {
            text: "A_j, B_j, C_j arbitrary",
            form: CoeffForm::Arbitrary,
        },
        correction: None,
    },
    CaseSpec {
        id: "6.11",
        family: 6,
        params: &["alpha", "beta", "gamma", "delta", "epsilon"],
        c12: "0",
        c21: "0",
        c11: "diag(alpha,beta,gamma,delta) + delta*e34",
        c22: "diag(q^2/alpha,q/beta,1/gamma,1/epsilon)",
        constraint_text: "alpha != beta != gamma != delta != epsilon",
        constraints: &["alpha != beta", "beta != gamma", "gamma != delta", "delta != epsilon"],
        ties: &[],
        branches: &[],
        r_pattern: "* 0 0 0 / 0 * 0 0 / 0 0 * * / 0 0 0 *",
        i_pattern: "a 0 0 0 / 0 b 0 0 / 0 0 g 0 / 0 0 0 g",
        dim_r: 5,
        dim_i: 3,
        coeff: cell!(
            "B_j=C_j=(epsilon^-1-gamma^-1)/(gamma-delta), A_j=delta*(gamma^-1-epsilon^-1)/(gamma-delta)",
            &[["-delta", "1", "1"]]
        ),
        correction: None,
    },
];

pub fn case(id: &str) -> Result<&'static CaseSpec> {
    CASES
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| CatalogError::UnknownCase(id.to_string()))
}

pub fn case_ids() -> Vec<&'static str> {
    CASES.iter().map(|c| c.id).collect()
}

/// Concrete parameter values, plus which alternative (if any) was chosen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params {
    pub values: BTreeMap<String, C64>,
    pub branch: Option<usize>,
}

impl Params {
    pub fn new(values: impl IntoIterator<Item = (&'static str, C64)>) -> Self {
        Self {
            values: values.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            branch: None,
        }
    }

    pub fn env(&self, q: C64) -> Env {
        let mut env = Env::new(DIM).with("q", q);
        env.vars.extend(self.values.iter().map(|(k, v)| (k.clone(), *v)));
        env
    }
}

const EQ_REL: f64 = 1e-12;

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= EQ_REL * (1.0 + a.norm().max(b.norm()))
}

/// Checks one machine constraint. Forms: `x != y`, `x == y`, clauses joined
/// by ` or `, and `distinct(x, y, ...)`.
pub fn check_constraint(src: &str, env: &Env) -> Result<bool> {
    if let Some(inner) = src.strip_prefix("distinct(").and_then(|s| s.strip_suffix(')')) {
        let vals = inner
            .split(',')
            .map(|t| expr::eval_scalar(t.trim(), env))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        for (i, a) in vals.iter().enumerate() {
            if vals[i + 1..].iter().any(|b| close(*a, *b)) {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    for clause in src.split(" or ") {
        let (lhs, rhs, eq) = if let Some((l, r)) = clause.split_once("!=") {
            (l, r, false)
        } else if let Some((l, r)) = clause.split_once("==") {
            (l, r, true)
        } else {
            return Err(ExprError::Parse {
                pos: 0,
                msg: format!("constraint '{clause}' has no comparison"),
            }
            .into());
        };
        let same = close(expr::eval_scalar(lhs.trim(), env)?, expr::eval_scalar(rhs.trim(), env)?);
        if same == eq {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn check_q(q: C64) -> Result<()> {
    let bad = q.norm() == 0.0 || !q.re.is_finite() || !q.im.is_finite()
        || (1..=Q_ORDER_BOUND).any(|m| close(q.powu(m), ONE));
    if bad {
        return Err(CatalogError::BadQ(q));
    }
    Ok(())
}

impl CaseSpec {
    fn build(&self, c22: &str, params: &Params, q: C64) -> Result<GeneratorQuad> {
        check_q(q)?;
        for p in self.params {
            if *p != "lambda" && !params.values.contains_key(*p) {
                return Err(CatalogError::MissingParam(p.to_string()));
            }
        }
        let mut env = params.env(q);
        env.vars.entry("lambda".to_string()).or_insert(ONE);
        for c in self.constraints {
            if !check_constraint(c, &env)? {
                return Err(CatalogError::Constraint(c.to_string()));
            }
        }
        let m = |src: &str| expr::eval_matrix(src, &env);
        Ok(GeneratorQuad {
            c11: m(self.c11)?,
            c12: m(self.c12)?,
            c21: m(self.c21)?,
            c22: m(c22)?,
            q,
        })
    }

    pub fn d_expected_src(&self) -> &'static str {
        FAMILY_D[self.family as usize - 1]
    }

    pub fn d_expected(&self, params: &Params, q: C64) -> Result<MatrixC> {
        Ok(expr::eval_matrix(self.d_expected_src(), &params.env(q))?)
    }

    pub fn r_pattern(&self) -> SubspacePattern {
        SubspacePattern::parse(self.r_pattern).expect("catalog pattern")
    }

    pub fn i_pattern(&self) -> SubspacePattern {
        SubspacePattern::parse(self.i_pattern).expect("catalog pattern")
    }
}

/// The quad exactly as printed for row `id`.
pub fn instantiate_case(id: &str, params: &Params, q: C64) -> Result<GeneratorQuad> {
    let spec = case(id)?;
    spec.build(spec.c22, params, q)
}

/// The row with its documented correction applied, if it has one.
pub fn instantiate_corrected(id: &str, params: &Params, q: C64) -> Result<Option<GeneratorQuad>> {
    let spec = case(id)?;
    spec.correction.map(|c| spec.build(c.c22, params, q)).transpose()
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectedRecord {
    pub d_expected: &'static str,
    pub r_pattern: SubspacePattern,
    pub i_pattern: SubspacePattern,
    pub dim_r: usize,
    pub dim_i: usize,
    pub coeff_text: &'static str,
    pub coeff_well_formed: bool,
    /// Dimensions implied by the printed patterns, when they disagree with
    /// the printed dimension columns.
    pub pattern_dim_annotations: Vec<String>,
}

pub fn expected_record(id: &str) -> Result<ExpectedRecord> {
    let spec = case(id)?;
    let (r, i) = (spec.r_pattern(), spec.i_pattern());
    let mut notes = Vec::new();
    if r.dimension() != spec.dim_r {
        notes.push(format!("R pattern spans {} but dim R is {}", r.dimension(), spec.dim_r));
    }
    if i.dimension() != spec.dim_i {
        notes.push(format!("I pattern spans {} but dim I is {}", i.dimension(), spec.dim_i));
    }
    Ok(ExpectedRecord {
        d_expected: spec.d_expected_src(),
        r_pattern: r,
        i_pattern: i,
        dim_r: spec.dim_r,
        dim_i: spec.dim_i,
        coeff_text: spec.coeff.text,
        coeff_well_formed: spec.coeff.is_well_formed(),
        pattern_dim_annotations: notes,
    })
}

/// Nonzero rationals small enough to keep entries well scaled.
const POOL: &[(i32, i32)] = &[
    (-2, 1),
    (3, 1),
    (-3, 1),
    (5, 1),
    (-5, 1),
    (7, 1),
    (-7, 1),
    (1, 3),
    (-1, 3),
    (2, 3),
    (3, 5),
    (5, 3),
    (7, 3),
    (11, 1),
    (1, 2),
    (-1, 2),
];

fn generic(v: C64, q: C64) -> bool {
    let specials = [ZERO, ONE, -ONE];
    !specials.iter().any(|s| close(v, *s)) && !(-3..=3).any(|k| close(v, q.powi(k)) || close(v, -q.powi(k)))
}

fn case_salt(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn apply_assignment(src: &str, values: &mut BTreeMap<String, C64>, q: C64) -> Result<()> {
    let (name, rhs) = src.split_once(":=").ok_or_else(|| ExprError::Parse {
        pos: 0,
        msg: format!("assignment '{src}' lacks ':='"),
    })?;
    let mut env = Env::new(DIM).with("q", q);
    env.vars.extend(values.iter().map(|(k, v)| (k.clone(), *v)));
    let v = expr::eval_scalar(rhs.trim(), &env)?;
    values.insert(name.trim().to_string(), v);
    Ok(())
}

/// Parameters always fixed by a tie. Branch assignments override draws
/// instead, since some alternatives leave the parameter free.
fn tie_targets(spec: &CaseSpec) -> Vec<String> {
    spec.ties
        .iter()
        .filter_map(|t| t.split_once(":=").map(|(n, _)| n.trim().to_string()))
        .collect()
}

/// Deterministic generic parameters for row `id`. Free parameters are
/// distinct draws from a fixed rational pool avoiding `0, ±1, ±q^k`
/// (`|k| ≤ 3`); `lambda` is 1; ties and one alternative are then applied and
/// the row's constraints checked.
pub fn sample_parameters_at(id: &str, seed: u64, q: C64) -> Result<Params> {
    let spec = case(id)?;
    check_q(q)?;
    let pool: Vec<C64> = POOL
        .iter()
        .map(|&(a, b)| C64::new(a as f64 / b as f64, 0.0))
        .filter(|v| generic(*v, q))
        .collect();
    let targets = tie_targets(spec);
    let free: Vec<&str> = spec
        .params
        .iter()
        .copied()
        .filter(|p| *p != "lambda" && !targets.iter().any(|t| t == p))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ case_salt(id));
    for _ in 0..1000 {
        let mut values = BTreeMap::new();
        let mut avail = pool.clone();
        for p in &free {
            if avail.is_empty() {
                break;
            }
            let v = avail.swap_remove(rng.random_range(0..avail.len()));
            values.insert(p.to_string(), v);
        }
        if values.len() != free.len() {
            break;
        }
        if spec.params.contains(&"lambda") {
            values.insert("lambda".to_string(), ONE);
        }
        let branch = (!spec.branches.is_empty()).then(|| rng.random_range(0..spec.branches.len()));
        for t in spec.ties {
            apply_assignment(t, &mut values, q)?;
        }
        if let Some(b) = branch {
            for t in spec.branches[b] {
                apply_assignment(t, &mut values, q)?;
            }
        }
        let params = Params { values, branch };
        let env = params.env(q);
        let mut ok = true;
        for c in spec.constraints {
            ok &= check_constraint(c, &env)?;
        }
        if ok {
            return Ok(params);
        }
    }
    Err(CatalogError::Exhausted(id.to_string()))
}

pub fn sample_parameters(id: &str, seed: u64) -> Result<Params> {
    sample_parameters_at(id, seed, C64::new(2.0, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CyclicVariant {
    AsPrinted,
    Corrected,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CyclicModuleSpec {
    pub p: usize,
    pub q: C64,
    pub alpha: C64,
    pub beta: C64,
    pub eta: C64,
    pub variant: CyclicVariant,
}

impl CyclicModuleSpec {
    /// Module with `q = e^{2πi/p}`.
    pub fn primitive(p: usize, alpha: C64, beta: C64, eta: C64, variant: CyclicVariant) -> Self {
        Self {
            p,
            q: crate::ddq::primitive_root(p.max(1) as u32),
            alpha,
            beta,
            eta,
            variant,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(CatalogError::Cyclic("p must be positive".into()));
        }
        let tol = 1e-9;
        if (self.q.powu(self.p as u32) - ONE).norm() > tol {
            return Err(CatalogError::Cyclic(format!("q^{} != 1", self.p)));
        }
        if (1..self.p).any(|m| (self.q.powu(m as u32) - ONE).norm() <= tol) {
            return Err(CatalogError::Cyclic(format!("q is not a primitive {}-th root", self.p)));
        }
        Ok(())
    }
}

/// Basis `|0⟩ … |p-1⟩`: `c12|n⟩ = |n+1⟩` with `c12|p-1⟩ = η|0⟩`,
/// `c11 = β c12`, `c21|n⟩ = q^n αβ|n⟩`, and `c22 = α` (as printed) or
/// `c22|n⟩ = q^n α|n⟩` (corrected).
pub fn root_of_unity_rep(spec: &CyclicModuleSpec) -> Result<GeneratorQuad> {
    spec.validate()?;
    let p = spec.p;
    let mut raise = MatrixC::zeros(p, p);
    for n in 0..p - 1 {
        raise[(n + 1, n)] = ONE;
    }
    raise[(0, p - 1)] += spec.eta;
    let qn: Vec<C64> = (0..p).map(|n| spec.q.powu(n as u32)).collect();
    let c21 = MatrixC::from_diag(&qn.iter().map(|z| z * spec.alpha * spec.beta).collect::<Vec<_>>());
    let c22 = match spec.variant {
        CyclicVariant::AsPrinted => MatrixC::identity(p).scale(spec.alpha),
        CyclicVariant::Corrected => MatrixC::from_diag(&qn.iter().map(|z| z * spec.alpha).collect::<Vec<_>>()),
    };
    Ok(GeneratorQuad {
        c11: raise.scale(spec.beta),
        c12: raise,
        c21,
        c22,
        q: spec.q,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralPowers {
    /// `max ‖[C_ij^p, C_kl]‖_F` over all pairs.
    pub max_commutator: f64,
    /// Per generator `c11, c12, c21, c22`: largest commutator of its p-th
    /// power with the four generators.
    pub per_generator: [f64; 4],
    /// Per generator: `‖X - (tr X / N) I‖ / ‖X‖` for the p-th power of the
    /// two-site coproduct image `X`.
    pub two_site_proportionality: [f64; 4],
    pub passes: bool,
}

pub fn central_powers_check(rep: &GeneratorQuad, p: usize, tol: &Tolerance) -> CentralPowers {
    let gens = rep.generators();
    let mut per = [0.0f64; 4];
    for (k, g) in gens.iter().enumerate() {
        let gp = g.pow(p as u32);
        per[k] = gens.iter().map(|h| gp.commutator(h).norm()).fold(0.0, f64::max);
    }
    let t = crate::ddq::chain_matrix(&[rep, rep]).expect("same site twice");
    let mut prop = [0.0f64; 4];
    for (k, (i, j)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        let x = t[i][j].pow(p as u32);
        let n = x.rows();
        let scalar = MatrixC::identity(n).scale(x.trace() / n as f64);
        let norm = x.norm();
        prop[k] = if norm == 0.0 { 0.0 } else { x.dist(&scalar) / norm };
    }
    let max = per.iter().copied().fold(0.0, f64::max);
    CentralPowers {
        max_commutator: max,
        per_generator: per,
        two_site_proportionality: prop,
        passes: max <= tol.residual_abs,
    }
}

/// Machine-readable form of the whole catalog: one object per row with
/// sparse matrix-unit maps and the expected data.
pub fn catalog_json() -> Result<Json> {
    let mut rows = Vec::new();
    for c in CASES {
        let sparse = |src: &str| -> Result<Json> { Ok(json!(expr::sparse_form(src, DIM)?)) };
        let coeff_form = match c.coeff.form {
            CoeffForm::Span(r) => json!({"span": r}),
            CoeffForm::Arbitrary => json!("arbitrary"),
            CoeffForm::IllFormed(why) => json!({"ill_formed": why}),
        };
        rows.push(json!({
            "id": c.id,
            "family": c.family,
            "params": c.params,
            "matrices": {
                "C11": sparse(c.c11)?,
                "C12": sparse(c.c12)?,
                "C21": sparse(c.c21)?,
                "C22": sparse(c.c22)?,
            },
            "source": {"C11": c.c11, "C12": c.c12, "C21": c.c21, "C22": c.c22},
            "constraint_text": c.constraint_text,
            "constraints": c.constraints,
            "ties": c.ties,
            "branches": c.branches,
            "expected": {
                "d": c.d_expected_src(),
                "R_pattern": c.r_pattern().render(),
                "I_pattern": c.i_pattern().render(),
                "dim_R": c.dim_r,
                "dim_I": c.dim_i,
                "coeff_text": c.coeff.text,
                "coeff_form": coeff_form,
            },
            "correction": c.correction.map(|k| json!({"C22": k.c22, "note": k.note})),
        }));
    }
    Ok(json!({
        "schema": 1,
        "q_constraint": format!("q != 0 and q^m != 1 for 1 <= m <= {Q_ORDER_BOUND}"),
        "cases": rows,
    }))
}

/// `D ⊗ D` for two instances of the same row, used by group-like checks.
pub fn determinant_square(rep: &GeneratorQuad) -> MatrixC {
    let d = crate::ddq::quantum_determinant(rep);
    kron(&d, &d)
}
