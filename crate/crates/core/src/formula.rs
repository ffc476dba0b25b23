//! One-free-variable first-order formulas in the language of rings,
//! evaluated exhaustively over `F_ℓ`.
//!
//! Syntax: `formula := quant* bool` with `quant := (exists|forall) ident ":"`.
//! Connectives by increasing binding strength: `implies`/`->`, `or`, `and`,
//! `not`; atoms are `poly = poly` with `+ - * ^` and unary minus. The free
//! variable is `x`. Implications are stored as `not a or b`.

use std::fmt;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, add_mod, mul_mod, pow_mod, sub_mod};
use crate::intpoly::IntPoly;
use crate::local_set::{self, LocalSet, Provenance};

pub const DEFAULT_DEPTH_CAP: usize = 3;
pub const DEFAULT_EVAL_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("SyntaxError({pos}): {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("UnboundVariable({0})")]
    UnboundVariable(String),
    #[error("DuplicateBinding({0})")]
    DuplicateBinding(String),
    #[error("DepthExceeded({depth} > {cap})")]
    DepthExceeded { depth: usize, cap: usize },
    #[error("FieldTooLargeForDepth(ell={ell}, depth={depth})")]
    FieldTooLargeForDepth { ell: u64, depth: usize },
    #[error("NotPrime({0})")]
    NotPrime(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// Polynomial expression; `Var(0)` is `x`, `Var(i)` the `i`-th bound variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Const(u64),
    Var(usize),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Pow(Box<Term>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolExpr {
    Eq(Term, Term),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    quantifiers: Vec<Quantifier>,
    /// `names[0] = "x"`, then bound variables in quantifier order.
    names: Vec<String>,
    body: BoolExpr,
}

impl Term {
    fn eval(&self, env: &[u64], ell: u64) -> u64 {
        match self {
            Term::Const(c) => c % ell,
            Term::Var(i) => env[*i],
            Term::Add(a, b) => add_mod(a.eval(env, ell), b.eval(env, ell), ell),
            Term::Sub(a, b) => sub_mod(a.eval(env, ell), b.eval(env, ell), ell),
            Term::Mul(a, b) => mul_mod(a.eval(env, ell), b.eval(env, ell), ell),
            Term::Neg(a) => sub_mod(0, a.eval(env, ell), ell),
            Term::Pow(a, k) => pow_mod(a.eval(env, ell), *k as u64, ell),
        }
    }

    fn uses_only(&self, var: usize) -> bool {
        match self {
            Term::Const(_) => true,
            Term::Var(i) => *i == var,
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => a.uses_only(var) && b.uses_only(var),
            Term::Neg(a) | Term::Pow(a, _) => a.uses_only(var),
        }
    }

    /// Expands a term in a single variable into integer coefficients.
    fn to_poly(&self) -> Option<Vec<i64>> {
        fn add(a: &[i64], b: &[i64], sign: i64) -> Option<Vec<i64>> {
            (0..a.len().max(b.len()))
                .map(|i| {
                    let y = b.get(i).copied().unwrap_or(0).checked_mul(sign)?;
                    a.get(i).copied().unwrap_or(0).checked_add(y)
                })
                .collect()
        }
        fn mul(a: &[i64], b: &[i64]) -> Option<Vec<i64>> {
            let mut out = vec![0i64; a.len() + b.len() - 1];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    out[i + j] = out[i + j].checked_add(x.checked_mul(y)?)?;
                }
            }
            Some(out)
        }
        Some(match self {
            Term::Const(c) => vec![i64::try_from(*c).ok()?],
            Term::Var(_) => vec![0, 1],
            Term::Add(a, b) => add(&a.to_poly()?, &b.to_poly()?, 1)?,
            Term::Sub(a, b) => add(&a.to_poly()?, &b.to_poly()?, -1)?,
            Term::Mul(a, b) => mul(&a.to_poly()?, &b.to_poly()?)?,
            Term::Neg(a) => add(&[0], &a.to_poly()?, -1)?,
            Term::Pow(a, k) => {
                let base = a.to_poly()?;
                let mut acc = vec![1];
                for _ in 0..*k {
                    acc = mul(&acc, &base)?;
                }
                acc
            }
        })
    }
}

impl BoolExpr {
    fn eval(&self, env: &[u64], ell: u64) -> bool {
        match self {
            BoolExpr::Eq(a, b) => a.eval(env, ell) == b.eval(env, ell),
            BoolExpr::Not(a) => !a.eval(env, ell),
            BoolExpr::And(a, b) => a.eval(env, ell) && b.eval(env, ell),
            BoolExpr::Or(a, b) => a.eval(env, ell) || b.eval(env, ell),
        }
    }

    fn has_negation(&self) -> bool {
        match self {
            BoolExpr::Eq(..) => false,
            BoolExpr::Not(_) => true,
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => a.has_negation() || b.has_negation(),
        }
    }
}

impl Formula {
    pub fn depth(&self) -> usize {
        self.quantifiers.len()
    }

    pub fn body(&self) -> &BoolExpr {
        &self.body
    }

    /// No negation (hence no implication) anywhere: the reduction of the
    /// global set modulo a prime is then the set the formula defines there.
    pub fn reduction_safe(&self) -> bool {
        !self.body.has_negation()
    }

    /// `¬φ`, pushed inside the prefix: `∃` and `∀` swap.
    pub fn negate(&self) -> Formula {
        Formula {
            quantifiers: self
                .quantifiers
                .iter()
                .map(|q| match q {
                    Quantifier::Exists => Quantifier::Forall,
                    Quantifier::Forall => Quantifier::Exists,
                })
                .collect(),
            names: self.names.clone(),
            body: match &self.body {
                BoolExpr::Not(inner) => (**inner).clone(),
                b => BoolExpr::Not(Box::new(b.clone())),
            },
        }
    }

    /// `f` when the formula reads `exists y: x = f(y)`.
    pub fn as_polynomial_image(&self) -> Option<IntPoly> {
        if self.quantifiers != [Quantifier::Exists] {
            return None;
        }
        let BoolExpr::Eq(lhs, rhs) = &self.body else {
            return None;
        };
        let t = match (lhs, rhs) {
            (Term::Var(0), t) | (t, Term::Var(0)) => t,
            _ => return None,
        };
        t.uses_only(1).then(|| t.to_poly().map(IntPoly::new)).flatten()
    }

    fn eval_from(&self, level: usize, env: &mut Vec<u64>, ell: u64) -> bool {
        if level == self.quantifiers.len() {
            return self.body.eval(env, ell);
        }
        let slot = level + 1;
        let hit = |env: &mut Vec<u64>, v| {
            env[slot] = v;
            self.eval_from(level + 1, env, ell)
        };
        match self.quantifiers[level] {
            Quantifier::Exists => (0..ell).any(|v| hit(env, v)),
            Quantifier::Forall => (0..ell).all(|v| hit(env, v)),
        }
    }

    fn check_budget(&self, ell: u64) -> Result<(), FormulaError> {
        if !arith::is_prime(ell) {
            return Err(FormulaError::NotPrime(ell));
        }
        let cost = arith::checked_pow(ell, self.depth() as u32);
        if cost.map_or(true, |c| c > DEFAULT_EVAL_BUDGET) {
            return Err(FormulaError::FieldTooLargeForDepth {
                ell,
                depth: self.depth(),
            });
        }
        Ok(())
    }

    fn eval_unchecked(&self, ell: u64, a: u64) -> bool {
        let mut env = vec![0u64; self.names.len()];
        env[0] = a % ell;
        self.eval_from(0, &mut env, ell)
    }
}

/// Whether `φ(a)` holds in `F_ℓ`.
pub fn eval_formula(phi: &Formula, ell: u64, a: u64) -> Result<bool, FormulaError> {
    phi.check_budget(ell)?;
    Ok(phi.eval_unchecked(ell, a))
}

/// `φ(F_ℓ)` by exhaustive evaluation.
pub fn definable_subset(phi: &Formula, ell: u64) -> Result<LocalSet, FormulaError> {
    phi.check_budget(ell)?;
    let hits: Vec<bool> = (0..ell).into_par_iter().map(|a| phi.eval_unchecked(ell, a)).collect();
    Ok(LocalSet::from_predicate(
        ell,
        Provenance::Formula {
            text: phi.to_string(),
        },
        |a| hits[a as usize],
    ))
}

/// Like [`definable_subset`], but formulas of the shape `exists y: x = f(y)`
/// are computed as polynomial images in `O(ℓ)`.
pub fn definable_subset_fast(phi: &Formula, ell: u64) -> Result<LocalSet, FormulaError> {
    match phi.as_polynomial_image() {
        Some(f) => {
            if !arith::is_prime(ell) {
                return Err(FormulaError::NotPrime(ell));
            }
            let mut s = local_set::polynomial_image_set(&f, ell);
            s.provenance = Provenance::Formula {
                text: phi.to_string(),
            };
            Ok(s)
        }
        None => definable_subset(phi, ell),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityRow {
    pub ell: u64,
    pub count: u64,
    #[serde(skip)]
    pub density: BigRational,
    pub density_f64: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cluster {
    /// Mean density of the members, or exactly 0 for the bounded branch.
    pub value: f64,
    pub bounded: bool,
    pub primes: Vec<u64>,
    /// `max |density - value| · √ℓ` over the members.
    pub max_scaled_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CdmReport {
    pub rows: Vec<DensityRow>,
    pub clusters: Vec<Cluster>,
    pub max_scaled_deviation: f64,
}

/// Densities of `φ(F_ℓ)` over the given primes, grouped into clusters.
///
/// Primes with `|φ(F_ℓ)| ≤ √ℓ` form the bounded cluster at 0. The others are
/// sorted by density and split wherever consecutive densities differ by more
/// than `2/√ℓ` for the smaller of the two primes.
pub fn cdm_scan(phi: &Formula, primes: &[u64]) -> Result<CdmReport, FormulaError> {
    let rows: Vec<DensityRow> = primes
        .par_iter()
        .map(|&ell| {
            let s = definable_subset_fast(phi, ell)?;
            let density = s.density();
            Ok(DensityRow {
                ell,
                count: s.count(),
                density_f64: s.count() as f64 / ell as f64,
                density,
            })
        })
        .collect::<Result<_, FormulaError>>()?;

    let (bounded, mut rest): (Vec<&DensityRow>, Vec<&DensityRow>) =
        rows.iter().partition(|r| (r.count as f64) <= (r.ell as f64).sqrt());
    rest.sort_by(|a, b| a.density_f64.total_cmp(&b.density_f64).then(a.ell.cmp(&b.ell)));

    let mut groups: Vec<(bool, Vec<&DensityRow>)> = Vec::new();
    if !bounded.is_empty() {
        groups.push((true, bounded));
    }
    for r in rest {
        let split = match groups.last() {
            Some((false, g)) => {
                let prev = g.last().unwrap();
                let tol = 2.0 / (prev.ell.min(r.ell) as f64).sqrt();
                r.density_f64 - prev.density_f64 > tol
            }
            _ => true,
        };
        if split {
            groups.push((false, vec![r]));
        } else {
            groups.last_mut().unwrap().1.push(r);
        }
    }

    let clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|(bounded, g)| {
            let value = if bounded {
                0.0
            } else {
                g.iter().map(|r| r.density_f64).sum::<f64>() / g.len() as f64
            };
            let mut ps: Vec<u64> = g.iter().map(|r| r.ell).collect();
            ps.sort_unstable();
            Cluster {
                value,
                bounded,
                max_scaled_deviation: g
                    .iter()
                    .map(|r| (r.density_f64 - value).abs() * (r.ell as f64).sqrt())
                    .fold(0.0, f64::max),
                primes: ps,
            }
        })
        .collect();
    let max_scaled_deviation = clusters
        .iter()
        .map(|c| c.max_scaled_deviation)
        .fold(0.0, f64::max);
    Ok(CdmReport {
        rows,
        clusters,
        max_scaled_deviation,
    })
}

// ---- parsing ----

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
}

const KEYWORDS: [&str; 6] = ["exists", "forall", "and", "or", "not", "implies"];

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i].parse().map_err(|_| FormulaError::SyntaxError {
                pos: start,
                msg: "integer literal too large".into(),
            })?;
            out.push((Tok::Num(n), start));
        } else if src[i..].starts_with("->") {
            out.push((Tok::Sym("->"), i));
            i += 2;
        } else {
            let sym = match c {
                b'+' => "+",
                b'-' => "-",
                b'*' => "*",
                b'^' => "^",
                b'=' => "=",
                b'(' => "(",
                b')' => ")",
                b':' => ":",
                _ => {
                    return Err(FormulaError::SyntaxError {
                        pos: i,
                        msg: format!("unexpected character {:?}", c as char),
                    })
                }
            };
            out.push((Tok::Sym(sym), i));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    names: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::SyntaxError {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(t)) if t == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), FormulaError> {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{s}'"))
        }
    }

    fn implication(&mut self) -> Result<BoolExpr, FormulaError> {
        let lhs = self.disjunction()?;
        if self.is_kw("implies") || self.is_sym("->") {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(BoolExpr::Or(Box::new(BoolExpr::Not(Box::new(lhs))), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<BoolExpr, FormulaError> {
        let mut acc = self.conjunction()?;
        while self.is_kw("or") {
            self.pos += 1;
            acc = BoolExpr::Or(Box::new(acc), Box::new(self.conjunction()?));
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<BoolExpr, FormulaError> {
        let mut acc = self.negation()?;
        while self.is_kw("and") {
            self.pos += 1;
            acc = BoolExpr::And(Box::new(acc), Box::new(self.negation()?));
        }
        Ok(acc)
    }

    fn negation(&mut self) -> Result<BoolExpr, FormulaError> {
        if self.is_kw("not") {
            self.pos += 1;
            return Ok(BoolExpr::Not(Box::new(self.negation()?)));
        }
        if self.is_kw("exists") || self.is_kw("forall") {
            return self.err("quantifiers must precede the quantifier-free part");
        }
        if self.is_sym("(") {
            // either a parenthesized formula or the start of a polynomial
            let save = self.pos;
            self.pos += 1;
            if let Ok(inner) = self.implication() {
                if self.is_sym(")") {
                    self.pos += 1;
                    return Ok(inner);
                }
            }
            self.pos = save;
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<BoolExpr, FormulaError> {
        let lhs = self.sum()?;
        self.expect_sym("=")?;
        let rhs = self.sum()?;
        Ok(BoolExpr::Eq(lhs, rhs))
    }

    fn sum(&mut self) -> Result<Term, FormulaError> {
        let mut acc = self.product()?;
        loop {
            if self.is_sym("+") {
                self.pos += 1;
                acc = Term::Add(Box::new(acc), Box::new(self.product()?));
            } else if self.is_sym("-") {
                self.pos += 1;
                acc = Term::Sub(Box::new(acc), Box::new(self.product()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Term, FormulaError> {
        let mut acc = self.unary()?;
        while self.is_sym("*") {
            self.pos += 1;
            acc = Term::Mul(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Term, FormulaError> {
        if self.is_sym("-") {
            self.pos += 1;
            return Ok(Term::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Term, FormulaError> {
        let mut acc = self.primary()?;
        while self.is_sym("^") {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Num(k)) => {
                    let k = u32::try_from(*k).or_else(|_| self.err("exponent too large"))?;
                    self.pos += 1;
                    acc = Term::Pow(Box::new(acc), k);
                }
                _ => return self.err("expected a natural-number exponent"),
            }
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<Term, FormulaError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Term::Const(n))
            }
            Some(Tok::Ident(name)) => {
                if KEYWORDS.contains(&name.as_str()) {
                    return self.err(format!("unexpected keyword '{name}'"));
                }
                self.pos += 1;
                match self.names.iter().position(|n| *n == name) {
                    Some(i) => Ok(Term::Var(i)),
                    None => Err(FormulaError::UnboundVariable(name)),
                }
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.sum()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            _ => self.err("expected a term"),
        }
    }
}

/// Parses with the default quantifier-depth cap.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    parse_formula_with_cap(text, DEFAULT_DEPTH_CAP)
}

pub fn parse_formula_with_cap(text: &str, cap: usize) -> Result<Formula, FormulaError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        names: vec!["x".to_string()],
    };
    let mut quantifiers = Vec::new();
    loop {
        let q = if p.is_kw("exists") {
            Quantifier::Exists
        } else if p.is_kw("forall") {
            Quantifier::Forall
        } else {
            break;
        };
        p.pos += 1;
        let name = match p.peek() {
            Some(Tok::Ident(n)) if !KEYWORDS.contains(&n.as_str()) => n.clone(),
            _ => return p.err("expected a variable name"),
        };
        if p.names.contains(&name) {
            return Err(FormulaError::DuplicateBinding(name));
        }
        p.pos += 1;
        p.expect_sym(":")?;
        quantifiers.push(q);
        p.names.push(name);
    }
    if quantifiers.len() > cap {
        return Err(FormulaError::DepthExceeded {
            depth: quantifiers.len(),
            cap,
        });
    }
    let body = p.implication()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(Formula {
        quantifiers,
        names: p.names,
        body,
    })
}

// ---- printing ----

fn term_level(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Sub(..) => 1,
        Term::Mul(..) => 2,
        Term::Neg(_) => 3,
        Term::Pow(..) => 4,
        Term::Const(_) | Term::Var(_) => 5,
    }
}

fn bool_level(b: &BoolExpr) -> u8 {
    match b {
        BoolExpr::Or(..) => 1,
        BoolExpr::And(..) => 2,
        BoolExpr::Not(_) => 3,
        BoolExpr::Eq(..) => 4,
    }
}

struct Show<'a, T> {
    node: &'a T,
    names: &'a [String],
    min: u8,
}

fn show<'a, T>(node: &'a T, names: &'a [String], min: u8) -> Show<'a, T> {
    Show { node, names, min }
}

impl<'a> fmt::Display for Show<'a, Term> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = term_level(self.node);
        if level < self.min {
            return write!(f, "({})", Show { min: 0, ..*self });
        }
        let sub = |node: &'a Term, min| show(node, self.names, min);
        match self.node {
            Term::Const(c) => write!(f, "{c}"),
            Term::Var(i) => write!(f, "{}", self.names[*i]),
            Term::Add(a, b) => write!(f, "{} + {}", sub(a, 1), sub(b, 2)),
            Term::Sub(a, b) => write!(f, "{} - {}", sub(a, 1), sub(b, 2)),
            Term::Mul(a, b) => write!(f, "{}*{}", sub(a, 2), sub(b, 3)),
            Term::Neg(a) => write!(f, "-{}", sub(a, 3)),
            Term::Pow(a, k) => write!(f, "{}^{k}", sub(a, 4)),
        }
    }
}

impl<'a> fmt::Display for Show<'a, BoolExpr> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = bool_level(self.node);
        if level < self.min {
            return write!(f, "({})", Show { min: 0, ..*self });
        }
        let sub = |node: &'a BoolExpr, min| show(node, self.names, min);
        let term = |node: &'a Term, min| show(node, self.names, min);
        match self.node {
            BoolExpr::Eq(a, b) => write!(f, "{} = {}", term(a, 0), term(b, 0)),
            BoolExpr::Not(a) => write!(f, "not {}", sub(a, 3)),
            BoolExpr::And(a, b) => write!(f, "{} and {}", sub(a, 2), sub(b, 3)),
            BoolExpr::Or(a, b) => write!(f, "{} or {}", sub(a, 1), sub(b, 2)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, q) in self.quantifiers.iter().enumerate() {
            let kw = match q {
                Quantifier::Exists => "exists",
                Quantifier::Forall => "forall",
            };
            write!(f, "{kw} {}: ", self.names[i + 1])?;
        }
        write!(
            f,
            "{}",
            Show {
                node: &self.body,
                names: &self.names,
                min: 0
            }
        )
    }
}
