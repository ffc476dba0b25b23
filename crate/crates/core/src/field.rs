//! Finite fields `F_{p^e}` with a deterministic modulus and generator.
//!
//! Elements are encoded as integers `0..p^e` by reading the coefficient vector
//! of the residue polynomial as base-`p` digits, lowest degree first. The
//! encoding of the prime subfield is therefore the identity on `0..p`.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{self, add_mod, checked_pow, mul_mod, sub_mod};

/// Default element count below which log/exp tables are built.
pub const DEFAULT_TABLE_CAP: u64 = 1 << 24;
/// Default largest field order accepted by [`FiniteField::new`].
pub const DEFAULT_MAX_ORDER: u64 = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("NotPrime({0})")]
    NotPrime(u64),
    #[error("FieldTooLarge({0})")]
    FieldTooLarge(String),
    #[error("BadDegree({0}): extension degree must be at least 1")]
    BadDegree(u32),
    #[error("OrderNotDividing({d}, {order})")]
    OrderNotDividing { d: u64, order: u64 },
    #[error("ElementOutOfRange({index}, {order})")]
    ElementOutOfRange { index: u64, order: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct FieldConfig {
    pub table_cap: u64,
    pub max_order: u64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            table_cap: DEFAULT_TABLE_CAP,
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

/// An element of some [`FiniteField`], by encoding index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u64);

impl FieldElement {
    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Caller guarantees `index < q` for the field in use.
    pub(crate) fn from_index(index: u64) -> Self {
        FieldElement(index)
    }
}

struct Tables {
    log: Vec<u32>,
    /// `exp[i] = g^i` for `0 <= i < 2(q-1)`, doubled to skip a reduction.
    exp: Vec<u32>,
}

pub struct FiniteField {
    p: u64,
    e: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: FieldElement,
    basis_traces: Vec<u64>,
    tables: Option<Tables>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator.0)
            .field("tables", &self.tables.is_some())
            .finish()
    }
}

/// Builds `F_{p^e}` with default configuration.
pub fn make_field(p: u64, e: u32) -> Result<FiniteField, FieldError> {
    FiniteField::new(p, e)
}

impl FiniteField {
    pub fn new(p: u64, e: u32) -> Result<Self, FieldError> {
        Self::with_config(p, e, FieldConfig::default())
    }

    pub fn with_config(p: u64, e: u32, cfg: FieldConfig) -> Result<Self, FieldError> {
        if e == 0 {
            return Err(FieldError::BadDegree(e));
        }
        if !arith::is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let q = checked_pow(p, e)
            .filter(|&q| q <= cfg.max_order)
            .ok_or_else(|| FieldError::FieldTooLarge(format!("{p}^{e}")))?;

        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, e as usize)
        };
        let mut field = FiniteField {
            p,
            e,
            q,
            modulus,
            generator: FieldElement(1),
            basis_traces: Vec::new(),
            tables: None,
        };
        field.basis_traces = (0..e as usize).map(|i| field.trace_of_monomial(i)).collect();
        field.generator = field.find_generator();
        if q <= cfg.table_cap {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Field order `q = p^e`.
    pub fn order(&self) -> u64 {
        self.q
    }

    /// The monic defining polynomial, lowest degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn element(&self, index: u64) -> Result<FieldElement, FieldError> {
        if index < self.q {
            Ok(FieldElement(index))
        } else {
            Err(FieldError::ElementOutOfRange {
                index,
                order: self.q,
            })
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement(arith::reduce_i64(v, self.p))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(FieldElement)
    }

    pub fn units(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.q).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            return FieldElement(add_mod(a.0, b.0, self.p));
        }
        self.digitwise(a.0, b.0, |x, y| add_mod(x, y, self.p))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            return FieldElement(sub_mod(a.0, b.0, self.p));
        }
        self.digitwise(a.0, b.0, |x, y| sub_mod(x, y, self.p))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.sub(FieldElement(0), a)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        if let Some(t) = &self.tables {
            let i = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            return FieldElement(t.exp[i] as u64);
        }
        if self.e == 1 {
            return FieldElement(mul_mod(a.0, b.0, self.p));
        }
        let pa = self.to_poly(a.0);
        let pb = self.to_poly(b.0);
        FieldElement(self.from_poly(&poly_mulmod(&pa, &pb, &self.modulus, self.p)))
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return None;
        }
        if let Some(t) = &self.tables {
            let l = t.log[a.0 as usize] as u64;
            let idx = (self.q - 1 - l) % (self.q - 1);
            return Some(FieldElement(t.exp[idx as usize] as u64));
        }
        Some(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        if exp == 0 {
            return FieldElement(1);
        }
        if a.0 == 0 {
            return FieldElement(0);
        }
        if let Some(t) = &self.tables {
            let l = t.log[a.0 as usize] as u128;
            let idx = (l * exp as u128) % (self.q - 1) as u128;
            return FieldElement(t.exp[idx as usize] as u64);
        }
        let mut base = a;
        let mut acc = FieldElement(1);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Frobenius `x ↦ x^p`.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.p)
    }

    /// Absolute trace `Σ_{i<e} x^{p^i}`, as a residue in `0..p`.
    pub fn abs_trace(&self, x: FieldElement) -> u64 {
        if self.e == 1 {
            return x.0;
        }
        let mut v = x.0;
        let mut acc = 0u64;
        for &t in &self.basis_traces {
            acc = add_mod(acc, mul_mod(v % self.p, t, self.p), self.p);
            v /= self.p;
        }
        acc
    }

    /// Traces of every element, indexed by encoding.
    pub fn trace_table(&self) -> Vec<u32> {
        (0..self.q)
            .into_par_iter()
            .map(|i| self.abs_trace(FieldElement(i)) as u32)
            .collect()
    }

    /// Discrete logarithm to the field generator; needs tables.
    pub fn log(&self, x: FieldElement) -> Option<u64> {
        if x.0 == 0 {
            return None;
        }
        self.tables.as_ref().map(|t| t.log[x.0 as usize] as u64)
    }

    /// `g^k` for the field generator `g`.
    pub fn exp(&self, k: u64) -> FieldElement {
        match &self.tables {
            Some(t) => FieldElement(t.exp[(k % (self.q - 1)) as usize] as u64),
            None => self.pow(self.generator, k),
        }
    }

    /// Canonical element of exact multiplicative order `d`: `g^{(q-1)/d}`.
    pub fn unity_root(&self, d: u64) -> Result<FieldElement, FieldError> {
        if d == 0 || (self.q - 1) % d != 0 {
            return Err(FieldError::OrderNotDividing {
                d,
                order: self.q - 1,
            });
        }
        Ok(self.pow(self.generator, (self.q - 1) / d))
    }

    /// Whether `x` is an `m`-th power; zero counts.
    pub fn is_mth_power(&self, x: FieldElement, m: u64) -> bool {
        if x.0 == 0 {
            return true;
        }
        let k = arith::gcd(m, self.q - 1);
        self.pow(x, (self.q - 1) / k).0 == 1
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, x: FieldElement) -> Option<u64> {
        if x.0 == 0 {
            return None;
        }
        let n = self.q - 1;
        let mut ord = n;
        for r in arith::prime_factors(n) {
            while ord % r == 0 && self.pow(x, ord / r).0 == 1 {
                ord /= r;
            }
        }
        Some(ord)
    }

    fn digitwise(&self, mut a: u64, mut b: u64, op: impl Fn(u64, u64) -> u64) -> FieldElement {
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.e {
            out += op(a % self.p, b % self.p) * place;
            a /= self.p;
            b /= self.p;
            place = place.wrapping_mul(self.p);
        }
        FieldElement(out)
    }

    fn to_poly(&self, mut idx: u64) -> Vec<u64> {
        let mut c = Vec::with_capacity(self.e as usize);
        for _ in 0..self.e {
            c.push(idx % self.p);
            idx /= self.p;
        }
        c
    }

    fn from_poly(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0u64, |acc, &d| acc * self.p + d)
    }

    fn trace_of_monomial(&self, i: usize) -> u64 {
        let mut x = vec![0u64; self.e as usize];
        x[i] = 1;
        let mut acc = vec![0u64; self.e as usize];
        for _ in 0..self.e {
            for (a, b) in acc.iter_mut().zip(&x) {
                *a = add_mod(*a, *b, self.p);
            }
            x = poly_powmod(&x, self.p, &self.modulus, self.p);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0));
        acc[0]
    }

    fn find_generator(&self) -> FieldElement {
        if self.e == 1 {
            return FieldElement(arith::primitive_root(self.p));
        }
        let n = self.q - 1;
        let factors = arith::prime_factors(n);
        (1..self.q)
            .map(FieldElement)
            .find(|&g| factors.iter().all(|&r| self.pow(g, n / r).0 != 1))
            .expect("multiplicative group is cyclic")
    }

    fn build_tables(&self) -> Tables {
        let n = (self.q - 1) as usize;
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![0u32; self.q as usize];
        let mut cur = FieldElement(1);
        for i in 0..n {
            exp[i] = cur.0 as u32;
            log[cur.0 as usize] = i as u32;
            cur = self.mul(cur, self.generator);
        }
        debug_assert_eq!(cur.0, 1, "generator order must be q-1");
        for i in 0..n {
            exp[n + i] = exp[i];
        }
        Tables { log, exp }
    }
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo a monic or non-monic `f` over `F_p`.
fn poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut f = f.to_vec();
    trim(&mut f);
    let df = f.len() - 1;
    let lead_inv = arith::inv_mod_prime(f[df], p).expect("nonzero leading coefficient");
    while r.len() > df {
        let top = r.len() - 1;
        let c = mul_mod(r[top], lead_inv, p);
        if c != 0 {
            let shift = top - df;
            for (i, &fi) in f.iter().enumerate() {
                r[shift + i] = sub_mod(r[shift + i], mul_mod(c, fi, p), p);
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, p), p);
        }
    }
    let mut r = poly_rem(&prod, f, p);
    r.resize(f.len() - 1, 0);
    r
}

fn poly_powmod(a: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
    let deg = f.len() - 1;
    let mut acc = vec![0u64; deg];
    acc[0] = 1;
    let mut base = a.to_vec();
    base.resize(deg, 0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mulmod(&acc, &base, f, p);
        }
        base = poly_mulmod(&base, &base, f, p);
        exp >>= 1;
    }
    acc
}

pub(crate) fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(&lead) = x.last() {
        let inv = arith::inv_mod_prime(lead, p).unwrap();
        for c in x.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
    x
}

/// Irreducibility of a monic `f` of degree `e`: `gcd(X^{p^i} - X, f) = 1` for
/// `1 <= i < e` and `X^{p^e} ≡ X (mod f)`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let e = f.len() - 1;
    if e == 1 {
        return true;
    }
    let mut x = vec![0u64; e];
    x[1] = 1;
    let mut h = x.clone();
    for i in 1..=e {
        h = poly_powmod(&h, p, f, p);
        let mut diff = h.clone();
        diff[1] = sub_mod(diff[1], 1, p);
        if i < e {
            let g = poly_gcd(&diff, f, p);
            if g.len() != 1 {
                return false;
            }
        } else {
            trim(&mut diff);
            return diff.is_empty();
        }
    }
    unreachable!()
}

/// Lexicographically smallest monic irreducible of degree `e`, comparing the
/// coefficient vector `(c_0, ..., c_{e-1})` from the constant term up.
fn smallest_irreducible(p: u64, e: usize) -> Vec<u64> {
    let total = checked_pow(p, e as u32).expect("field order fits u64");
    for k in 0..total {
        let mut f = vec![0u64; e + 1];
        let mut rest = k;
        for i in (0..e).rev() {
            f[i] = rest % p;
            rest /= p;
        }
        f[e] = 1;
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn f5_generator_is_two() {
        let f = make_field(5, 1).unwrap();
        assert_eq!(f.generator().index(), 2);
    }

    #[test]
    fn f4_modulus_and_trace() {
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // t is encoded as 0 + 1*2 = 2
        let t = f.element(2).unwrap();
        assert_eq!(f.abs_trace(t), 1);
        assert_eq!(f.abs_trace(f.zero()), 0);
    }

    #[test]
    fn f9_modulus_and_trace() {
        let f = make_field(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        let t = f.element(3).unwrap();
        assert_eq!(f.abs_trace(t), 0);
    }

    #[test]
    fn composite_is_rejected() {
        assert_eq!(make_field(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert!(matches!(
            make_field(2, 64),
            Err(FieldError::FieldTooLarge(_))
        ));
    }

    #[test]
    fn unity_roots() {
        let f = make_field(41, 1).unwrap();
        let w = f.unity_root(20).unwrap();
        assert_eq!(f.element_order(w), Some(20));
        let f11 = make_field(11, 1).unwrap();
        let w5 = f11.unity_root(5).unwrap();
        assert_eq!(f11.pow(w5, 5), f11.one());
        assert_eq!(f11.element_order(w5), Some(5));
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(
            f7.unity_root(4).unwrap_err(),
            FieldError::OrderNotDividing { d: 4, order: 6 }
        );
    }

    #[test]
    fn squares_mod_13() {
        let f = make_field(13, 1).unwrap();
        assert!(f.is_mth_power(f.from_int(3), 2));
        assert!(!f.is_mth_power(f.from_int(2), 2));
        assert!(f.is_mth_power(f.zero(), 5));
    }

    #[test]
    fn power_counts_exhaustive() {
        for q in 2..=10_000u64 {
            let Some((p, e)) = prime_power(q) else { continue };
            let f = make_field(p, e).unwrap();
            for m in 2..=4u64 {
                let count = f.elements().filter(|&x| f.is_mth_power(x, m)).count() as u64;
                assert_eq!(count, (q - 1) / arith::gcd(m, q - 1) + 1, "q={q} m={m}");
            }
        }
    }

    #[test]
    fn generator_orders_and_tables() {
        for &(p, e) in &[(2, 5), (3, 4), (5, 3), (7, 2), (101, 1)] {
            let f = make_field(p, e).unwrap();
            assert_eq!(f.element_order(f.generator()), Some(f.order() - 1));
            assert!(is_irreducible(f.modulus(), p));
        }
    }

    #[test]
    fn untabled_field_agrees_with_tabled() {
        let cfg = FieldConfig {
            table_cap: 0,
            ..FieldConfig::default()
        };
        let plain = FiniteField::with_config(3, 5, cfg).unwrap();
        let fast = make_field(3, 5).unwrap();
        assert!(!plain.has_tables());
        assert_eq!(plain.generator(), fast.generator());
        for a in (0..243).step_by(7) {
            for b in (0..243).step_by(11) {
                let (x, y) = (FieldElement(a), FieldElement(b));
                assert_eq!(plain.mul(x, y), fast.mul(x, y));
            }
            assert_eq!(plain.inv(FieldElement(a)), fast.inv(FieldElement(a)));
        }
    }

    pub(crate) fn prime_power(q: u64) -> Option<(u64, u32)> {
        let f = arith::prime_factors(q);
        if f.len() != 1 {
            return None;
        }
        let p = f[0];
        let mut e = 0;
        let mut r = q;
        while r > 1 {
            r /= p;
            e += 1;
        }
        Some((p, e))
    }

    fn field_strategy() -> impl Strategy<Value = (u64, u32)> {
        prop_oneof![
            Just((2u64, 6u32)),
            Just((3, 3)),
            Just((5, 2)),
            Just((7, 3)),
            Just((13, 1)),
            Just((97, 1)),
        ]
    }

    proptest! {
        #[test]
        fn trace_is_additive_and_frobenius_invariant((p, e) in field_strategy(), a in any::<u64>(), b in any::<u64>()) {
            let f = make_field(p, e).unwrap();
            let q = f.order();
            let (a, b) = (FieldElement(a % q), FieldElement(b % q));
            prop_assert_eq!(f.abs_trace(f.add(a, b)), (f.abs_trace(a) + f.abs_trace(b)) % p);
            prop_assert_eq!(f.abs_trace(f.frobenius(a)), f.abs_trace(a));
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
        }
    }

    #[test]
    fn ring_axioms_on_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &(p, e) in &[(2u64, 6u32), (3, 3), (5, 2), (7, 3), (13, 1), (97, 1)] {
            let f = make_field(p, e).unwrap();
            let q = f.order();
            for _ in 0..10_000 {
                let a = FieldElement(rng.gen_range(0..q));
                let b = FieldElement(rng.gen_range(0..q));
                let c = FieldElement(rng.gen_range(0..q));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            }
        }
    }
}
