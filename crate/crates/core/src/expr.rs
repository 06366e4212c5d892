//! A small expression language for transcribed matrices and coefficients.
//!
//! Grammar (usual precedence, `^` binds tightest and is right associative):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | ident | ident '(' args ')' | '(' expr ')'
//! ```
//!
//! Identifiers are parameter names, `q`, `i`, `pi`, or matrix units `eIJ`
//! (one-based, single digits). `diag(...)` builds a diagonal matrix and
//! `exp`/`sqrt` act on scalars. A scalar added to a matrix means that
//! scalar times the identity.

use std::collections::BTreeMap;
use std::fmt;

use crate::numerics::{MatrixC, C64, ONE};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown symbol '{0}'")]
    Unknown(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("matrix unit e{0}{1} outside dimension {2}")]
    UnitRange(usize, usize, usize),
}

pub type Result<T> = std::result::Result<T, ExprError>;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Unit(usize, usize),
    Call(String, Vec<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let text = &src[start..i];
            let v = text.parse::<f64>().map_err(|_| ExprError::Parse {
                pos: start,
                msg: format!("bad number '{text}'"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^(),".contains(ch) {
            out.push((i, Tok::Op(ch)));
            i += 1;
        } else {
            return Err(ExprError::Parse {
                pos: i,
                msg: format!("unexpected character '{ch}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(ExprError::Parse {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    if !self.eat(')') {
                        return self.err("expected ')'");
                    }
                    return Ok(Expr::Call(name, args));
                }
                Ok(unit_atom(&name).unwrap_or(Expr::Var(name)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn unit_atom(name: &str) -> Option<Expr> {
    let b = name.as_bytes();
    if b.len() == 3 && b[0] == b'e' && b[1].is_ascii_digit() && b[2].is_ascii_digit() {
        let (i, j) = ((b[1] - b'0') as usize, (b[2] - b'0') as usize);
        if i >= 1 && j >= 1 {
            return Some(Expr::Unit(i, j));
        }
    }
    None
}

pub fn parse(src: &str) -> Result<Expr> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        len: src.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(C64),
    Matrix(MatrixC),
}

impl Value {
    pub fn into_scalar(self) -> Result<C64> {
        match self {
            Value::Scalar(z) => Ok(z),
            Value::Matrix(_) => Err(ExprError::Type("expected a scalar, found a matrix".into())),
        }
    }

    pub fn into_matrix(self, dim: usize) -> MatrixC {
        match self {
            Value::Scalar(z) => MatrixC::identity(dim).scale(z),
            Value::Matrix(m) => m,
        }
    }
}

/// Variable bindings plus the matrix dimension used for `eIJ` and scalar
/// promotion.
#[derive(Debug, Clone, Default)]
pub struct Env {
    pub vars: BTreeMap<String, C64>,
    pub dim: usize,
}

impl Env {
    pub fn new(dim: usize) -> Self {
        Self {
            vars: BTreeMap::new(),
            dim,
        }
    }

    pub fn with(mut self, name: &str, v: C64) -> Self {
        self.vars.insert(name.to_string(), v);
        self
    }

    fn lookup(&self, name: &str) -> Result<C64> {
        if let Some(v) = self.vars.get(name) {
            return Ok(*v);
        }
        match name {
            "i" => Ok(C64::new(0.0, 1.0)),
            "pi" => Ok(C64::new(std::f64::consts::PI, 0.0)),
            _ => Err(ExprError::Unknown(name.to_string())),
        }
    }
}

fn combine(a: Value, b: Value, dim: usize, op: char) -> Result<Value> {
    use Value::*;
    Ok(match (op, a, b) {
        ('+', Scalar(x), Scalar(y)) => Scalar(x + y),
        ('-', Scalar(x), Scalar(y)) => Scalar(x - y),
        ('*', Scalar(x), Scalar(y)) => Scalar(x * y),
        ('/', Scalar(x), Scalar(y)) => Scalar(x / y),
        ('+', x, y) => Matrix(x.into_matrix(dim) + y.into_matrix(dim)),
        ('-', x, y) => Matrix(x.into_matrix(dim) - y.into_matrix(dim)),
        ('*', Scalar(x), Matrix(m)) | ('*', Matrix(m), Scalar(x)) => Matrix(m.scale(x)),
        ('*', Matrix(x), Matrix(y)) => Matrix(x * y),
        ('/', Matrix(m), Scalar(x)) => Matrix(m.scale(ONE / x)),
        ('/', _, Matrix(_)) => return Err(ExprError::Type("division by a matrix".into())),
        _ => unreachable!("operator {op}"),
    })
}

fn int_exponent(z: C64) -> Option<i32> {
    (z.im == 0.0 && z.re.fract() == 0.0 && z.re.abs() <= 64.0).then_some(z.re as i32)
}

pub fn eval(e: &Expr, env: &Env) -> Result<Value> {
    let dim = env.dim;
    Ok(match e {
        Expr::Num(v) => Value::Scalar(C64::new(*v, 0.0)),
        Expr::Var(name) => Value::Scalar(env.lookup(name)?),
        Expr::Unit(i, j) => {
            if *i > dim || *j > dim {
                return Err(ExprError::UnitRange(*i, *j, dim));
            }
            Value::Matrix(MatrixC::unit(dim, i - 1, j - 1))
        }
        Expr::Call(f, args) if f == "diag" => {
            let d = args
                .iter()
                .map(|a| eval(a, env)?.into_scalar())
                .collect::<Result<Vec<_>>>()?;
            if d.len() != dim {
                return Err(ExprError::Type(format!("diag needs {dim} entries, got {}", d.len())));
            }
            Value::Matrix(MatrixC::from_diag(&d))
        }
        Expr::Call(f, args) => {
            if args.len() != 1 {
                return Err(ExprError::Type(format!("{f} takes one argument")));
            }
            let z = eval(&args[0], env)?.into_scalar()?;
            Value::Scalar(match f.as_str() {
                "exp" => z.exp(),
                "sqrt" => z.sqrt(),
                _ => return Err(ExprError::Unknown(f.clone())),
            })
        }
        Expr::Neg(a) => match eval(a, env)? {
            Value::Scalar(z) => Value::Scalar(-z),
            Value::Matrix(m) => Value::Matrix(-m),
        },
        Expr::Add(a, b) => combine(eval(a, env)?, eval(b, env)?, dim, '+')?,
        Expr::Sub(a, b) => combine(eval(a, env)?, eval(b, env)?, dim, '-')?,
        Expr::Mul(a, b) => combine(eval(a, env)?, eval(b, env)?, dim, '*')?,
        Expr::Div(a, b) => combine(eval(a, env)?, eval(b, env)?, dim, '/')?,
        Expr::Pow(a, b) => {
            let exp = eval(b, env)?.into_scalar()?;
            match (eval(a, env)?, int_exponent(exp)) {
                (Value::Scalar(z), Some(k)) => Value::Scalar(z.powi(k)),
                (Value::Scalar(z), None) => Value::Scalar(z.powc(exp)),
                (Value::Matrix(m), Some(k)) if k >= 0 => Value::Matrix(m.pow(k as u32)),
                (Value::Matrix(_), _) => {
                    return Err(ExprError::Type("matrix powers need a non-negative integer".into()))
                }
            }
        }
    })
}

pub fn eval_scalar(src: &str, env: &Env) -> Result<C64> {
    eval(&parse(src)?, env)?.into_scalar()
}

pub fn eval_matrix(src: &str, env: &Env) -> Result<MatrixC> {
    Ok(eval(&parse(src)?, env)?.into_matrix(env.dim))
}

/// Variable names referenced by an expression, excluding constants and
/// matrix units.
pub fn free_vars(e: &Expr) -> Vec<String> {
    fn walk(e: &Expr, out: &mut Vec<String>) {
        match e {
            Expr::Var(v) if v != "i" && v != "pi" => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Call(_, args) => args.iter().for_each(|a| walk(a, out)),
            Expr::Neg(a) => walk(a, out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(e, &mut out);
    out
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

struct Wrap<'a>(&'a Expr, u8);

impl fmt::Display for Wrap<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if prec(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Unit(i, j) => write!(f, "e{i}{j}"),
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Expr::Neg(a) => write!(f, "-{}", Wrap(a, 3)),
            Expr::Add(a, b) => write!(f, "{}+{}", Wrap(a, 1), Wrap(b, 2)),
            Expr::Sub(a, b) => write!(f, "{}-{}", Wrap(a, 1), Wrap(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", Wrap(a, 2), Wrap(b, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", Wrap(a, 2), Wrap(b, 3)),
            Expr::Pow(a, b) => write!(f, "{}^{}", Wrap(a, 5), Wrap(b, 3)),
        }
    }
}

enum Sym {
    Scalar(Expr),
    Mat(BTreeMap<(usize, usize), Expr>),
}

fn add_cell(m: &mut BTreeMap<(usize, usize), Expr>, key: (usize, usize), v: Expr) {
    let merged = match m.remove(&key) {
        Some(old) => Expr::Add(Box::new(old), Box::new(v)),
        None => v,
    };
    m.insert(key, merged);
}

fn scale_expr(s: &Expr, x: Expr) -> Expr {
    match (s, &x) {
        (Expr::Num(v), _) if *v == 1.0 => x,
        (_, Expr::Num(v)) if *v == 1.0 => s.clone(),
        _ => Expr::Mul(Box::new(s.clone()), Box::new(x)),
    }
}

fn neg_expr(x: Expr) -> Expr {
    match x {
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn symbolic(e: &Expr, dim: usize) -> Result<Sym> {
    let lift = |s: Sym| -> BTreeMap<(usize, usize), Expr> {
        match s {
            Sym::Mat(m) => m,
            Sym::Scalar(z) => (1..=dim).map(|k| ((k, k), z.clone())).collect(),
        }
    };
    Ok(match e {
        Expr::Unit(i, j) => Sym::Mat([((*i, *j), Expr::Num(1.0))].into_iter().collect()),
        Expr::Call(f, args) if f == "diag" => Sym::Mat(
            args.iter()
                .enumerate()
                .filter(|(_, a)| **a != Expr::Num(0.0))
                .map(|(k, a)| ((k + 1, k + 1), a.clone()))
                .collect(),
        ),
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let neg = matches!(e, Expr::Sub(..));
            match (symbolic(a, dim)?, symbolic(b, dim)?) {
                (Sym::Scalar(_), Sym::Scalar(_)) => Sym::Scalar(e.clone()),
                (x, y) => {
                    let mut m = lift(x);
                    for (k, v) in lift(y) {
                        add_cell(&mut m, k, if neg { neg_expr(v) } else { v });
                    }
                    Sym::Mat(m)
                }
            }
        }
        Expr::Neg(a) => match symbolic(a, dim)? {
            Sym::Scalar(_) => Sym::Scalar(e.clone()),
            Sym::Mat(m) => Sym::Mat(m.into_iter().map(|(k, v)| (k, neg_expr(v))).collect()),
        },
        Expr::Mul(a, b) => match (symbolic(a, dim)?, symbolic(b, dim)?) {
            (Sym::Scalar(_), Sym::Scalar(_)) => Sym::Scalar(e.clone()),
            (Sym::Scalar(s), Sym::Mat(m)) | (Sym::Mat(m), Sym::Scalar(s)) => {
                Sym::Mat(m.into_iter().map(|(k, v)| (k, scale_expr(&s, v))).collect())
            }
            _ => return Err(ExprError::Type("symbolic form supports linear matrix expressions only".into())),
        },
        Expr::Div(a, b) => match (symbolic(a, dim)?, symbolic(b, dim)?) {
            (Sym::Scalar(_), Sym::Scalar(_)) => Sym::Scalar(e.clone()),
            (Sym::Mat(m), Sym::Scalar(s)) => Sym::Mat(
                m.into_iter()
                    .map(|(k, v)| (k, Expr::Div(Box::new(v), Box::new(s.clone()))))
                    .collect(),
            ),
            _ => return Err(ExprError::Type("division by a matrix".into())),
        },
        _ => Sym::Scalar(e.clone()),
    })
}

/// Sparse matrix-unit form `{"e13": "q*lambda*delta", ...}` of a linear
/// matrix expression, with coefficient expressions kept symbolic.
pub fn sparse_form(src: &str, dim: usize) -> Result<BTreeMap<String, String>> {
    let cells = match symbolic(&parse(src)?, dim)? {
        Sym::Mat(m) => m,
        Sym::Scalar(Expr::Num(0.0)) => BTreeMap::new(),
        Sym::Scalar(z) => (1..=dim).map(|k| ((k, k), z.clone())).collect(),
    };
    Ok(cells
        .into_iter()
        .map(|((i, j), v)| (format!("e{i}{j}"), v.to_string()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;
    use proptest::prelude::*;

    fn env() -> Env {
        Env::new(4).with("q", c(2.0)).with("alpha", c(3.0))
    }

    #[test]
    fn scalar_arithmetic() {
        let e = env();
        assert_eq!(eval_scalar("q^2 + 1", &e).unwrap(), c(5.0));
        assert_eq!(eval_scalar("q^-1", &e).unwrap(), c(0.5));
        assert_eq!(eval_scalar("-q^2", &e).unwrap(), c(-4.0));
        assert_eq!(eval_scalar("2^3^2", &e).unwrap(), c(512.0));
        assert_eq!(eval_scalar("alpha*(q^-1-1)/(q-1)", &e).unwrap(), c(-1.5));
        let z = eval_scalar("exp(2*pi*i/4)", &e).unwrap();
        assert!((z - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(eval_scalar("(1+i)*(1-i)", &e).unwrap(), c(2.0));
    }

    #[test]
    fn matrix_expressions() {
        let e = env();
        let m = eval_matrix("1 + e34", &e).unwrap();
        assert_eq!(m, MatrixC::identity(4) + MatrixC::unit(4, 2, 3));
        let m = eval_matrix("diag(q^2,q,1,1) - e34", &e).unwrap();
        assert_eq!(m[(0, 0)], c(4.0));
        assert_eq!(m[(2, 3)], c(-1.0));
        let m = eval_matrix("q^2*1 - q^4*e34", &e).unwrap();
        assert_eq!(m, MatrixC::identity(4).scale(c(4.0)) - MatrixC::unit(4, 2, 3).scale(c(16.0)));
        assert_eq!(eval_matrix("0", &e).unwrap(), MatrixC::zeros(4, 4));
        assert!(eval_matrix("(e12+e24)^2", &e).unwrap() == MatrixC::unit(4, 0, 3));
    }

    #[test]
    fn errors() {
        let e = env();
        assert!(matches!(eval_scalar("beta", &e), Err(ExprError::Unknown(_))));
        assert!(matches!(parse("1 +"), Err(ExprError::Parse { .. })));
        assert!(matches!(parse("(1"), Err(ExprError::Parse { .. })));
        assert!(matches!(parse("1 $"), Err(ExprError::Parse { .. })));
        assert!(matches!(eval_matrix("e56", &e), Err(ExprError::UnitRange(5, 6, 4))));
        assert!(matches!(eval_scalar("e12", &e), Err(ExprError::Type(_))));
        assert!(matches!(eval_matrix("diag(1,2)", &e), Err(ExprError::Type(_))));
    }

    #[test]
    fn sparse_forms() {
        let s = sparse_form("q*lambda*delta*e13", 4).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s["e13"], "q*lambda*delta");
        let s = sparse_form("1 + e34", 4).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s["e11"], "1");
        let s = sparse_form("diag(q^2,q/alpha,q,1) - q/alpha^2*e23", 4).unwrap();
        assert_eq!(s["e22"], "q/alpha");
        assert_eq!(s["e23"], "-(q/alpha^2)");
        assert!(sparse_form("0", 4).unwrap().is_empty());
    }

    #[test]
    fn free_variables() {
        let e = parse("alpha*e12 + beta^2*exp(i*pi) + q").unwrap();
        assert_eq!(free_vars(&e), vec!["alpha", "beta", "q"]);
    }

    proptest! {
        #[test]
        fn display_round_trips(a in -5i32..5, b in 1i32..5, k in -3i32..3) {
            let src = format!("({a})*q^({k}) - alpha/({b}) + (q-{b})^2*alpha");
            let e = parse(&src).unwrap();
            let again = parse(&e.to_string()).unwrap();
            let x = eval(&e, &env()).unwrap().into_scalar().unwrap();
            let y = eval(&again, &env()).unwrap().into_scalar().unwrap();
            prop_assert!((x - y).norm() <= 1e-12 * (1.0 + x.norm()));
        }

        #[test]
        fn sparse_form_evaluates_like_matrix(a in 1i32..6, b in 1i32..6) {
            let src = format!("diag({a},q,1,alpha) + {b}*e34 - q*e12");
            let e = env();
            let dense = eval_matrix(&src, &e).unwrap();
            let mut rebuilt = MatrixC::zeros(4, 4);
            for (cell, coeff) in sparse_form(&src, 4).unwrap() {
                let unit = eval_matrix(&cell, &e).unwrap();
                rebuilt = rebuilt + unit.scale(eval_scalar(&coeff, &e).unwrap());
            }
            prop_assert_eq!(dense, rebuilt);
        }
    }
}
