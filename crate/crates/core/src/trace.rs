//! Trace functions over `F_q`: hyper-Kloosterman sums, one-variable
//! exponential sums and hyperelliptic traces, realized either as complex
//! numbers or as residues modulo a degree-1 prime of `Z[ζ_{4p}]`.

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, gcd, inv_mod_prime, pow_mod};
use crate::cyclotomic::{self, trace_order, CycInt, CyclotomicError, PrimeIdealDeg1};
use crate::field::{FieldElement, FieldError, FiniteField};
use crate::intpoly::{IntPoly, RationalFunction};

/// Largest `q` accepted by the `O(n q^2)` table builders.
pub const DEFAULT_TABLE_Q_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("ZeroArgument")]
    ZeroArgument,
    #[error("FieldTooLarge({0}): above the table cap")]
    FieldTooLarge(u64),
    #[error("BadEmbedding: {0}")]
    BadEmbedding(String),
    #[error("BadCharacterOrder({r}): {reason}")]
    BadCharacterOrder { r: u64, reason: String },
    #[error("DegenerateRationalFunction({0})")]
    DegenerateRationalFunction(String),
    #[error("NotARoot({0})")]
    NotARoot(u64),
    #[error("EvenCharacteristic")]
    EvenCharacteristic,
    #[error("NotSquarefreeModP({0})")]
    NotSquarefreeModP(String),
    #[error("BadRank({0})")]
    BadRank(u32),
    #[error("TableMismatch: {0}")]
    TableMismatch(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cyclotomic(#[from] CyclotomicError),
}

/// How values in `Z[ζ_{4p}]` are turned into numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Embedding {
    /// `σ_k: ζ_d ↦ e^{2πik/d}`.
    Complex { k: u64 },
    /// `ζ_d ↦ ω` in `F_ℓ`.
    Residue(PrimeIdealDeg1),
}

impl Embedding {
    pub fn complex() -> Self {
        Embedding::Complex { k: 1 }
    }

    /// The canonical residue embedding above `ℓ` for characteristic `p`.
    pub fn residue(p: u64, ell: u64) -> Result<Self, TraceError> {
        Ok(Embedding::Residue(PrimeIdealDeg1::canonical(trace_order(p), ell)?))
    }

    pub fn validate(&self, p: u64) -> Result<(), TraceError> {
        let d = trace_order(p);
        match self {
            Embedding::Complex { k } => {
                if gcd(*k, d) != 1 {
                    return Err(TraceError::BadEmbedding(format!(
                        "k = {k} is not coprime to d = {d}"
                    )));
                }
            }
            Embedding::Residue(ideal) => {
                if ideal.d != d {
                    return Err(TraceError::BadEmbedding(format!(
                        "ideal has d = {}, characteristic {p} needs d = {d}",
                        ideal.d
                    )));
                }
                if ideal.ell > u32::MAX as u64 {
                    return Err(TraceError::BadEmbedding(format!(
                        "ell = {} exceeds 32 bits",
                        ideal.ell
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ideal(&self) -> Option<&PrimeIdealDeg1> {
        match self {
            Embedding::Residue(i) => Some(i),
            Embedding::Complex { .. } => None,
        }
    }
}

/// The residue embedding obtained by `ω_p ↦ ω_p^c` with `ω_4` fixed.
pub fn galois_twist(ideal: &PrimeIdealDeg1, p: u64, c: u64) -> Result<PrimeIdealDeg1, TraceError> {
    let d = trace_order(p);
    if c % p == 0 {
        return Err(TraceError::BadEmbedding(format!("c = {c} is divisible by p")));
    }
    let k = (1..d)
        .find(|&k| k % p == c % p && k % 4 == 1 && gcd(k, d) == 1)
        .unwrap_or(1);
    Ok(ideal.conjugate(k)?)
}

/// A single realized value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceValue {
    Residue(u64),
    Complex(Complex64),
}

impl TraceValue {
    pub fn residue(self) -> Option<u64> {
        match self {
            TraceValue::Residue(v) => Some(v),
            TraceValue::Complex(_) => None,
        }
    }

    pub fn complex(self) -> Option<Complex64> {
        match self {
            TraceValue::Complex(v) => Some(v),
            TraceValue::Residue(_) => None,
        }
    }
}

/// Parameters of `Σ_y e(tr(x f(y) + h(y))/p) χ(g(y))` with `χ` of order `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpSumSpec {
    pub f: RationalFunction,
    pub g: RationalFunction,
    pub h: RationalFunction,
    pub r: u64,
}

impl ExpSumSpec {
    /// `f = Y`, `g = 1`, trivial `χ`: the Birch-type sums `Σ_y e(tr(xy + h(y))/p)`.
    pub fn additive(h: RationalFunction) -> Self {
        ExpSumSpec {
            f: RationalFunction::poly(IntPoly::x()),
            g: RationalFunction::constant(1),
            h,
            r: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Kloosterman { n: u32 },
    ExpSum(ExpSumSpec),
    Hyperelliptic { f: IntPoly },
    Fourier { of: Box<Family>, conjugate: bool },
    Explicit { weight: u32 },
}

impl Family {
    /// `(sign, w)` such that the normalized value is `sign · q^{-w/2}` times
    /// the integer-level one.
    pub fn normalization(&self) -> (i64, u32) {
        match self {
            Family::Kloosterman { n } => (if n % 2 == 0 { -1 } else { 1 }, n - 1),
            Family::ExpSum(_) => (-1, 1),
            Family::Hyperelliptic { .. } => (1, 1),
            Family::Fourier { .. } => (1, 0),
            Family::Explicit { weight } => (1, *weight),
        }
    }
}

/// Which `x` the table entries belong to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// `F_q^×`, entry `i` at the element with index `i + 1`.
    Units,
    /// `F_q`, entry `i` at the element with index `i`.
    All,
    /// Listed element indices.
    Points(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceValues {
    Residue(Vec<u64>),
    Complex(Vec<Complex64>),
}

impl TraceValues {
    pub fn len(&self) -> usize {
        match self {
            TraceValues::Residue(v) => v.len(),
            TraceValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> TraceValue {
        match self {
            TraceValues::Residue(v) => TraceValue::Residue(v[i]),
            TraceValues::Complex(v) => TraceValue::Complex(v[i]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceTable {
    pub family: Family,
    pub p: u64,
    pub e: u32,
    pub embedding: Embedding,
    pub domain: Domain,
    pub normalized: bool,
    pub values: TraceValues,
}

impl TraceTable {
    pub fn q(&self) -> u64 {
        arith::checked_pow(self.p, self.e).unwrap()
    }

    /// Element indices in entry order.
    pub fn domain_indices(&self) -> Vec<u64> {
        match &self.domain {
            Domain::Units => (1..self.q()).collect(),
            Domain::All => (0..self.q()).collect(),
            Domain::Points(pts) => pts.clone(),
        }
    }

    /// Value at an element, if it lies in the domain.
    pub fn value_at(&self, x: FieldElement) -> Option<TraceValue> {
        let i = x.index();
        let pos = match &self.domain {
            Domain::Units => i.checked_sub(1)?,
            Domain::All => i,
            Domain::Points(pts) => pts.iter().position(|&z| z == i)? as u64,
        };
        ((pos as usize) < self.values.len()).then(|| self.values.get(pos as usize))
    }

    pub fn residues(&self) -> Option<&[u64]> {
        match &self.values {
            TraceValues::Residue(v) => Some(v),
            TraceValues::Complex(_) => None,
        }
    }

    pub fn complex_values(&self) -> Option<&[Complex64]> {
        match &self.values {
            TraceValues::Complex(v) => Some(v),
            TraceValues::Residue(_) => None,
        }
    }
}

/// Arithmetic in the target of an embedding.
trait Realizer: Sync {
    type V: Copy + Send + Sync;
    fn zero(&self) -> Self::V;
    fn add(&self, a: Self::V, b: Self::V) -> Self::V;
    fn mul(&self, a: Self::V, b: Self::V) -> Self::V;
    fn from_i64(&self, v: i64) -> Self::V;
    /// Image of `ζ_d^j`.
    fn zeta(&self, j: u64) -> Self::V;
    /// Image of a primitive `r`-th root of unity raised to `j`, for `r ∤ d`.
    fn extra_root(&self, r: u64, j: u64) -> Result<Self::V, TraceError>;
    /// `out[i] = Σ_j a[i - j] b[j]`, indices mod `a.len()`.
    fn cyclic_conv(&self, a: &[Self::V], b: &[Self::V]) -> Vec<Self::V>;
    fn wrap(&self, v: Vec<Self::V>) -> TraceValues;
    fn from_value(&self, v: TraceValue) -> Self::V;
}

struct Res {
    ell: u64,
    omega: u64,
    d: u64,
}

impl Realizer for Res {
    type V = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.ell
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.ell
    }

    fn from_i64(&self, v: i64) -> u64 {
        arith::reduce_i64(v, self.ell)
    }

    fn zeta(&self, j: u64) -> u64 {
        pow_mod(self.omega, j % self.d, self.ell)
    }

    fn extra_root(&self, r: u64, j: u64) -> Result<u64, TraceError> {
        if (self.ell - 1) % r != 0 {
            return Err(TraceError::BadCharacterOrder {
                r,
                reason: format!("no r-th roots of unity in F_{}", self.ell),
            });
        }
        let g = arith::primitive_root(self.ell);
        Ok(pow_mod(g, (self.ell - 1) / r * (j % r), self.ell))
    }

    fn cyclic_conv(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = a.len();
        let ell = self.ell as u128;
        let cc = reflected(a);
        (0..n)
            .into_par_iter()
            .map(|i| {
                let acc: u128 = cc[n - i..2 * n - i]
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| (x * y) as u128)
                    .sum();
                (acc % ell) as u64
            })
            .collect()
    }

    fn wrap(&self, v: Vec<u64>) -> TraceValues {
        TraceValues::Residue(v)
    }

    fn from_value(&self, v: TraceValue) -> u64 {
        v.residue().expect("residue table")
    }
}

struct Cpx {
    k: u64,
    d: u64,
}

impl Realizer for Cpx {
    type V = Complex64;

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn add(&self, a: Complex64, b: Complex64) -> Complex64 {
        a + b
    }

    fn mul(&self, a: Complex64, b: Complex64) -> Complex64 {
        a * b
    }

    fn from_i64(&self, v: i64) -> Complex64 {
        Complex64::new(v as f64, 0.0)
    }

    fn zeta(&self, j: u64) -> Complex64 {
        let e = (self.k as u128 * j as u128 % self.d as u128) as f64;
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e / self.d as f64)
    }

    fn extra_root(&self, r: u64, j: u64) -> Result<Complex64, TraceError> {
        let e = (j % r) as f64;
        Ok(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e / r as f64))
    }

    fn cyclic_conv(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let n = a.len();
        let cc = reflected(a);
        (0..n)
            .into_par_iter()
            .map(|i| {
                cc[n - i..2 * n - i]
                    .iter()
                    .zip(b)
                    .fold(Complex64::new(0.0, 0.0), |acc, (&x, &y)| acc + x * y)
            })
            .collect()
    }

    fn wrap(&self, v: Vec<Complex64>) -> TraceValues {
        TraceValues::Complex(v)
    }

    fn from_value(&self, v: TraceValue) -> Complex64 {
        v.complex().expect("complex table")
    }
}

/// `cc[j - i + n] = a[(i - j) mod n]`, so each output of a cyclic
/// convolution is a contiguous dot product.
fn reflected<V: Copy>(a: &[V]) -> Vec<V> {
    let n = a.len();
    let c: Vec<V> = (0..n).map(|k| a[(n - k) % n]).collect();
    c.iter().chain(c.iter()).copied().collect()
}

/// Runs `f` with the realizer matching `emb`.
macro_rules! with_realizer {
    ($emb:expr, $p:expr, |$r:ident| $body:expr) => {{
        let d = trace_order($p);
        match $emb {
            Embedding::Residue(ideal) => {
                let $r = Res {
                    ell: ideal.ell,
                    omega: ideal.omega,
                    d,
                };
                $body
            }
            Embedding::Complex { k } => {
                let $r = Cpx { k: *k, d };
                $body
            }
        }
    }};
}

/// `Σ_c counts[c] ψ(c)` where `ψ(c) = ζ_d^{(d/p) c}`.
fn realize_counts<R: Realizer>(r: &R, p: u64, counts: &[u64]) -> R::V {
    let step = trace_order(p) / p;
    counts.iter().enumerate().fold(r.zero(), |acc, (c, &n)| {
        if n == 0 {
            acc
        } else {
            r.add(acc, r.mul(r.from_i64(n as i64), r.zeta(step * c as u64)))
        }
    })
}

fn check_rank(n: u32) -> Result<(), TraceError> {
    if n == 0 {
        Err(TraceError::BadRank(n))
    } else {
        Ok(())
    }
}

/// Exponent counts of `Kl_n(a)`: `counts[c] = #{x_1⋯x_n = a : tr(Σ x_i) = c}`,
/// by direct enumeration of `x_1, …, x_{n-1}`.
pub fn kloosterman_counts(n: u32, field: &FiniteField, a: FieldElement) -> Result<Vec<u64>, TraceError> {
    check_rank(n)?;
    if a.is_zero() {
        return Err(TraceError::ZeroArgument);
    }
    let p = field.p();
    let mut counts = vec![0u64; p as usize];

    fn walk(
        field: &FiniteField,
        depth: u32,
        prod: FieldElement,
        tr: u64,
        a: FieldElement,
        counts: &mut [u64],
    ) {
        let p = field.p();
        if depth == 0 {
            let last = field.div(a, prod).unwrap();
            counts[((tr + field.abs_trace(last)) % p) as usize] += 1;
            return;
        }
        for x in field.units() {
            walk(
                field,
                depth - 1,
                field.mul(prod, x),
                (tr + field.abs_trace(x)) % p,
                a,
                counts,
            );
        }
    }

    walk(field, n - 1, field.one(), 0, a, &mut counts);
    Ok(counts)
}

/// Unnormalized `Kl_n(a) = Σ_{x_1⋯x_n = a} e(tr(x_1+⋯+x_n)/p)`, by direct
/// enumeration in `O(q^{n-1})`.
pub fn kloosterman_point(
    n: u32,
    field: &FiniteField,
    a: FieldElement,
    emb: &Embedding,
) -> Result<TraceValue, TraceError> {
    emb.validate(field.p())?;
    let counts = kloosterman_counts(n, field, a)?;
    Ok(with_realizer!(emb, field.p(), |r| r
        .wrap(vec![realize_counts(&r, field.p(), &counts)])
        .get(0)))
}

/// Exact `Kl_n(a)` in `Z[ζ_{4p}]`.
pub fn kloosterman_exact(n: u32, field: &FiniteField, a: FieldElement) -> Result<CycInt, TraceError> {
    let counts = kloosterman_counts(n, field, a)?;
    Ok(cyc_from_psi_counts(field.p(), &counts))
}

fn cyc_from_psi_counts(p: u64, counts: &[u64]) -> CycInt {
    let d = trace_order(p);
    let step = d / p;
    let mut ex = vec![BigInt::from(0); d as usize];
    for (c, &n) in counts.iter().enumerate() {
        ex[(step * c as u64 % d) as usize] += n;
    }
    CycInt::from_exponent_counts(d, &ex)
}

fn require_table_field(field: &FiniteField, cap: u64) -> Result<(), TraceError> {
    if field.order() > cap || !field.has_tables() {
        return Err(TraceError::FieldTooLarge(field.order()));
    }
    Ok(())
}

/// `ψ(tr(g^j))` exponents for `j = 0..q-1`.
fn traces_in_log_order(field: &FiniteField) -> Vec<u64> {
    let n = field.order() - 1;
    (0..n)
        .into_par_iter()
        .map(|j| field.abs_trace(field.exp(j)))
        .collect()
}

/// Unnormalized table of `Kl_n` over `F_q^×`, built by the recursion
/// `Kl_n(a) = Σ_{x≠0} Kl_{n-1}(a/x) ψ(x)` as a cyclic convolution in
/// logarithm coordinates.
pub fn kloosterman_table(n: u32, field: &FiniteField, emb: &Embedding) -> Result<TraceTable, TraceError> {
    kloosterman_table_capped(n, field, emb, DEFAULT_TABLE_Q_CAP)
}

pub fn kloosterman_table_capped(
    n: u32,
    field: &FiniteField,
    emb: &Embedding,
    cap: u64,
) -> Result<TraceTable, TraceError> {
    check_rank(n)?;
    emb.validate(field.p())?;
    require_table_field(field, cap)?;
    let p = field.p();
    let tr = traces_in_log_order(field);
    let values = with_realizer!(emb, p, |r| {
        let step = trace_order(p) / p;
        let psi: Vec<_> = (0..p).map(|c| r.zeta(step * c)).collect();
        let psi_log: Vec<_> = tr.iter().map(|&c| psi[c as usize]).collect();
        let mut cur = psi_log.clone();
        for _ in 1..n {
            cur = r.cyclic_conv(&cur, &psi_log);
        }
        let by_index: Vec<_> = (1..field.order())
            .map(|i| cur[field.log(FieldElement::from_index(i)).unwrap() as usize])
            .collect();
        r.wrap(by_index)
    });
    Ok(TraceTable {
        family: Family::Kloosterman { n },
        p,
        e: field.e(),
        embedding: emb.clone(),
        domain: Domain::Units,
        normalized: false,
        values,
    })
}

/// `FT_ψ(t)(a) = -q^{-1/2} Σ_x t(x) ψ(tr(ax))` over all of `F_q`, with
/// `t(0) = 0` when the input only covers `F_q^×`. With `conjugate` the
/// character is `ψ̄(c) = ψ(-c)`.
pub fn fourier_transform_table(
    t: &TraceTable,
    field: &FiniteField,
    conjugate: bool,
) -> Result<TraceTable, TraceError> {
    if field.p() != t.p || field.e() != t.e {
        return Err(TraceError::TableMismatch("field differs from table".into()));
    }
    require_table_field(field, DEFAULT_TABLE_Q_CAP)?;
    let q = field.order();
    let p = field.p();
    let scale = neg_inv_sqrt_q(&t.embedding, p, field.e())?;
    let mut input = vec![None; q as usize];
    for (pos, idx) in t.domain_indices().into_iter().enumerate() {
        input[idx as usize] = Some(t.values.get(pos));
    }
    let trace = field.trace_table();
    let values = with_realizer!(&t.embedding, p, |r| {
        let step = trace_order(p) / p;
        let psi: Vec<_> = (0..p)
            .map(|c| {
                let c = if conjugate { (p - c) % p } else { c };
                r.zeta(step * c)
            })
            .collect();
        let inp: Vec<_> = input
            .iter()
            .map(|v| v.map(|v| r.from_value(v)))
            .collect();
        let s = r.from_value(scale);
        let out: Vec<_> = (0..q)
            .into_par_iter()
            .map(|ai| {
                let a = FieldElement::from_index(ai);
                let mut acc = r.zero();
                for (xi, v) in inp.iter().enumerate() {
                    if let Some(v) = v {
                        let ax = field.mul(a, FieldElement::from_index(xi as u64));
                        acc = r.add(acc, r.mul(*v, psi[trace[ax.index() as usize] as usize]));
                    }
                }
                r.mul(s, acc)
            })
            .collect();
        r.wrap(out)
    });
    Ok(TraceTable {
        family: Family::Fourier {
            of: Box::new(t.family.clone()),
            conjugate,
        },
        p,
        e: t.e,
        embedding: t.embedding.clone(),
        domain: Domain::All,
        normalized: t.normalized,
        values,
    })
}

/// `-q^{-1/2}` in the target of the embedding.
fn neg_inv_sqrt_q(emb: &Embedding, p: u64, e: u32) -> Result<TraceValue, TraceError> {
    Ok(match emb {
        Embedding::Residue(ideal) => {
            let s = cyclotomic::sqrt_q_mod(ideal, p, e)?;
            let inv = inv_mod_prime(s, ideal.ell).unwrap();
            TraceValue::Residue((ideal.ell - inv) % ideal.ell)
        }
        Embedding::Complex { .. } => {
            TraceValue::Complex(Complex64::new(-(p as f64).powf(-(e as f64) / 2.0), 0.0))
        }
    })
}

/// Factor taking integer-level values to normalized ones:
/// `sign · (√q)^{-w}` (residue) or `sign · q^{-w/2}` (complex).
pub fn normalization_factor(
    family: &Family,
    emb: &Embedding,
    p: u64,
    e: u32,
) -> Result<TraceValue, TraceError> {
    let (sign, w) = family.normalization();
    Ok(match emb {
        Embedding::Residue(ideal) => {
            let ell = ideal.ell;
            let s = cyclotomic::sqrt_q_mod(ideal, p, e)?;
            let s_inv = inv_mod_prime(s, ell).unwrap();
            let f = pow_mod(s_inv, w as u64, ell);
            TraceValue::Residue(if sign < 0 { (ell - f) % ell } else { f })
        }
        Embedding::Complex { .. } => {
            let q = (p as f64).powi(e as i32);
            TraceValue::Complex(Complex64::new(sign as f64 * q.powf(-(w as f64) / 2.0), 0.0))
        }
    })
}

fn scale_table(t: &TraceTable, factor: TraceValue) -> TraceValues {
    match (&t.values, factor) {
        (TraceValues::Residue(v), TraceValue::Residue(f)) => {
            let ell = t.embedding.ideal().unwrap().ell;
            TraceValues::Residue(v.iter().map(|&x| x * f % ell).collect())
        }
        (TraceValues::Complex(v), TraceValue::Complex(f)) => {
            TraceValues::Complex(v.iter().map(|&x| x * f).collect())
        }
        _ => unreachable!("factor realized in the table's own embedding"),
    }
}

/// Multiplies by `(-1)^{n-1} q^{-(n-1)/2}` (Kloosterman), `-q^{-1/2}`
/// (exponential sums) or `q^{-1/2}` (hyperelliptic).
pub fn normalize(t: &TraceTable) -> Result<TraceTable, TraceError> {
    if t.normalized {
        return Err(TraceError::TableMismatch("table is already normalized".into()));
    }
    let f = normalization_factor(&t.family, &t.embedding, t.p, t.e)?;
    Ok(TraceTable {
        values: scale_table(t, f),
        normalized: true,
        ..t.clone()
    })
}

pub fn denormalize(t: &TraceTable) -> Result<TraceTable, TraceError> {
    if !t.normalized {
        return Err(TraceError::TableMismatch("table is not normalized".into()));
    }
    let f = match normalization_factor(&t.family, &t.embedding, t.p, t.e)? {
        TraceValue::Residue(f) => {
            TraceValue::Residue(inv_mod_prime(f, t.embedding.ideal().unwrap().ell).unwrap())
        }
        TraceValue::Complex(f) => TraceValue::Complex(f.inv()),
    };
    Ok(TraceTable {
        values: scale_table(t, f),
        normalized: false,
        ..t.clone()
    })
}

/// Per-`y` data of an exponential sum: `(f(y), h(y), log-class of χ(g(y)))`.
struct ExpSumTerms {
    terms: Vec<(FieldElement, FieldElement, u64)>,
}

fn exp_sum_terms(spec: &ExpSumSpec, field: &FiniteField) -> Result<ExpSumTerms, TraceError> {
    let p = field.p();
    for (name, rf) in [("f", &spec.f), ("g", &spec.g), ("h", &spec.h)] {
        if rf.degenerate_mod(p) {
            return Err(TraceError::DegenerateRationalFunction(format!(
                "{name} = {rf} has a denominator vanishing mod {p}"
            )));
        }
    }
    let r = spec.r;
    if r == 0 || (field.order() - 1) % r != 0 {
        return Err(TraceError::BadCharacterOrder {
            r,
            reason: format!("r must divide q - 1 = {}", field.order() - 1),
        });
    }
    if r > 1 && !field.has_tables() {
        return Err(TraceError::FieldTooLarge(field.order()));
    }
    let mut terms = Vec::new();
    for y in field.elements() {
        let (Some(fy), Some(gy), Some(hy)) = (
            spec.f.eval(field, y),
            spec.g.eval(field, y),
            spec.h.eval(field, y),
        ) else {
            continue;
        };
        let j = if r == 1 {
            0
        } else if gy.is_zero() {
            continue;
        } else {
            field.log(gy).unwrap() % r
        };
        terms.push((fy, hy, j));
    }
    Ok(ExpSumTerms { terms })
}

/// Counts indexed by `(tr(x f(y) + h(y)), j)`, flattened as `c * r + j`.
fn exp_sum_counts(field: &FiniteField, terms: &ExpSumTerms, r: u64, x: FieldElement) -> Vec<u64> {
    let p = field.p();
    let mut counts = vec![0u64; (p * r) as usize];
    for &(fy, hy, j) in &terms.terms {
        let c = field.abs_trace(field.add(field.mul(x, fy), hy));
        counts[(c * r + j) as usize] += 1;
    }
    counts
}

fn realize_exp_counts<R: Realizer>(re: &R, p: u64, r: u64, counts: &[u64]) -> Result<R::V, TraceError> {
    let d = trace_order(p);
    let step = d / p;
    let chi: Vec<R::V> = (0..r)
        .map(|j| {
            if d % r == 0 {
                Ok(re.zeta(d / r * j))
            } else {
                re.extra_root(r, j)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut acc = re.zero();
    for (idx, &n) in counts.iter().enumerate() {
        if n == 0 {
            continue;
        }
        let (c, j) = (idx as u64 / r, idx as u64 % r);
        let term = re.mul(re.zeta(step * c), chi[j as usize]);
        acc = re.add(acc, re.mul(re.from_i64(n as i64), term));
    }
    Ok(acc)
}

/// Unnormalized `Σ_y e(tr(x f(y) + h(y))/p) χ(g(y))`, skipping poles and,
/// for `r > 1`, zeros of `g`. `χ(g^k) = ζ_r^k` for the field generator `g`.
pub fn exp_sum(
    spec: &ExpSumSpec,
    field: &FiniteField,
    x: FieldElement,
    emb: &Embedding,
) -> Result<TraceValue, TraceError> {
    emb.validate(field.p())?;
    let terms = exp_sum_terms(spec, field)?;
    let counts = exp_sum_counts(field, &terms, spec.r, x);
    with_realizer!(emb, field.p(), |re| Ok(re
        .wrap(vec![realize_exp_counts(&re, field.p(), spec.r, &counts)?])
        .get(0)))
}

/// Exact value in `Z[ζ_{4p}]`; needs `r | 4p`.
pub fn exp_sum_exact(spec: &ExpSumSpec, field: &FiniteField, x: FieldElement) -> Result<CycInt, TraceError> {
    let p = field.p();
    let d = trace_order(p);
    if d % spec.r != 0 {
        return Err(TraceError::BadCharacterOrder {
            r: spec.r,
            reason: format!("exact values need r | {d}"),
        });
    }
    let terms = exp_sum_terms(spec, field)?;
    let counts = exp_sum_counts(field, &terms, spec.r, x);
    let mut ex = vec![BigInt::from(0); d as usize];
    for (idx, &n) in counts.iter().enumerate() {
        let (c, j) = (idx as u64 / spec.r, idx as u64 % spec.r);
        ex[((d / p * c + d / spec.r * j) % d) as usize] += n;
    }
    Ok(CycInt::from_exponent_counts(d, &ex))
}

/// Unnormalized table over all `x ∈ F_q`.
pub fn exp_sum_table(spec: &ExpSumSpec, field: &FiniteField, emb: &Embedding) -> Result<TraceTable, TraceError> {
    emb.validate(field.p())?;
    require_table_field(field, DEFAULT_TABLE_Q_CAP)?;
    let terms = exp_sum_terms(spec, field)?;
    let p = field.p();
    let values = with_realizer!(emb, p, |re| {
        let out: Vec<_> = (0..field.order())
            .into_par_iter()
            .map(|xi| {
                let counts = exp_sum_counts(field, &terms, spec.r, FieldElement::from_index(xi));
                realize_exp_counts(&re, p, spec.r, &counts)
            })
            .collect::<Result<_, _>>()?;
        re.wrap(out)
    });
    Ok(TraceTable {
        family: Family::ExpSum(spec.clone()),
        p,
        e: field.e(),
        embedding: emb.clone(),
        domain: Domain::All,
        normalized: false,
        values,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HyperellipticTrace {
    pub a_z: i64,
    pub normalized: f64,
}

/// `χ_2` on `F_q` by element index: `0`, `1` or `-1`.
pub fn quadratic_character(field: &FiniteField) -> Vec<i8> {
    let mut chi = vec![-1i8; field.order() as usize];
    chi[0] = 0;
    for x in field.units() {
        chi[field.mul(x, x).index() as usize] = 1;
    }
    chi
}

fn check_hyperelliptic(f: &IntPoly, field: &FiniteField) -> Result<(), TraceError> {
    let p = field.p();
    if p == 2 {
        return Err(TraceError::EvenCharacteristic);
    }
    let deg = f.degree().unwrap_or(0);
    if deg < 2 || deg % 2 == 1 {
        return Err(TraceError::NotSquarefreeModP(format!(
            "{f} must have even degree 2g >= 2"
        )));
    }
    let fp = f.reduce_mod(p);
    if fp.len() != deg + 1 {
        return Err(TraceError::NotSquarefreeModP(format!("{f} drops degree mod {p}")));
    }
    let deriv: Vec<u64> = fp
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| arith::mul_mod(c, i as u64 % p, p))
        .collect();
    if crate::field::poly_gcd(&fp, &deriv, p).len() != 1 {
        return Err(TraceError::NotSquarefreeModP(format!("{f} mod {p}")));
    }
    Ok(())
}

/// `a_z = -Σ_x χ_2(f(x)(x - z))` for `y² = f(x)(x - z)` with one point at
/// infinity, and `a_z/√q`.
pub fn hyperelliptic_trace(
    f: &IntPoly,
    z: FieldElement,
    field: &FiniteField,
) -> Result<HyperellipticTrace, TraceError> {
    check_hyperelliptic(f, field)?;
    let chi = quadratic_character(field);
    hyperelliptic_with_chi(f, z, field, &chi)
}

fn hyperelliptic_with_chi(
    f: &IntPoly,
    z: FieldElement,
    field: &FiniteField,
    chi: &[i8],
) -> Result<HyperellipticTrace, TraceError> {
    if !f.eval(field, z).is_zero() {
        return Err(TraceError::NotARoot(z.index()));
    }
    let s: i64 = field
        .elements()
        .map(|x| {
            let v = field.mul(f.eval(field, x), field.sub(x, z));
            chi[v.index() as usize] as i64
        })
        .sum();
    let a_z = -s;
    Ok(HyperellipticTrace {
        a_z,
        normalized: a_z as f64 / (field.order() as f64).sqrt(),
    })
}

/// Point count of the model by brute force: affine solutions plus one point
/// at infinity.
pub fn hyperelliptic_points_naive(f: &IntPoly, z: FieldElement, field: &FiniteField) -> u64 {
    let mut count = 1;
    for x in field.elements() {
        let v = field.mul(f.eval(field, x), field.sub(x, z));
        count += field.elements().filter(|&y| field.mul(y, y) == v).count() as u64;
    }
    count
}

/// Roots of `f` in `F_q`, in index order.
pub fn roots_in_field(f: &IntPoly, field: &FiniteField) -> Vec<u64> {
    field
        .elements()
        .filter(|&x| f.eval(field, x).is_zero())
        .map(|x| x.index())
        .collect()
}

/// Integer-level `a_z` at every root `z` of `f` in `F_q`.
pub fn hyperelliptic_table(f: &IntPoly, field: &FiniteField, emb: &Embedding) -> Result<TraceTable, TraceError> {
    emb.validate(field.p())?;
    check_hyperelliptic(f, field)?;
    let chi = quadratic_character(field);
    let roots = roots_in_field(f, field);
    let a: Vec<i64> = roots
        .iter()
        .map(|&z| hyperelliptic_with_chi(f, FieldElement::from_index(z), field, &chi).map(|t| t.a_z))
        .collect::<Result<_, _>>()?;
    let values = match emb {
        Embedding::Residue(ideal) => {
            TraceValues::Residue(a.iter().map(|&v| arith::reduce_i64(v, ideal.ell)).collect())
        }
        Embedding::Complex { .. } => {
            TraceValues::Complex(a.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect())
        }
    };
    Ok(TraceTable {
        family: Family::Hyperelliptic { f: f.clone() },
        p: field.p(),
        e: field.e(),
        embedding: emb.clone(),
        domain: Domain::Points(roots),
        normalized: false,
        values,
    })
}

/// A table from explicit values, e.g. test inputs for the Fourier transform.
pub fn explicit_table(
    field: &FiniteField,
    emb: &Embedding,
    domain: Domain,
    values: TraceValues,
    weight: u32,
) -> Result<TraceTable, TraceError> {
    emb.validate(field.p())?;
    let t = TraceTable {
        family: Family::Explicit { weight },
        p: field.p(),
        e: field.e(),
        embedding: emb.clone(),
        domain,
        normalized: false,
        values,
    };
    let matches_kind = matches!(
        (&t.values, emb),
        (TraceValues::Residue(_), Embedding::Residue(_)) | (TraceValues::Complex(_), Embedding::Complex { .. })
    );
    if t.domain_indices().len() != t.values.len() || !matches_kind {
        return Err(TraceError::TableMismatch("values do not fit the domain or embedding".into()));
    }
    Ok(t)
}
