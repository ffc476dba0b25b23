//! Small finite classical groups over `F_ℓ`: enumeration by generator
//! closure, trace histograms, Gaussian sums and the exponents `α(G)`, `B`.
//!
//! Pinned forms, with `H = [[0,1],[1,0]]` the hyperbolic plane and `ν` the
//! smallest non-square mod `ℓ`:
//!
//! * `Sp_{2m}`: `J = [[0, I_m], [-I_m, 0]]`
//! * `SO_{2m+1}`: `H^m ⊕ ⟨1⟩`
//! * `SO^+_{2m}`: `H^m`
//! * `SO^-_{2m}`: `H^{m-1} ⊕ ⟨1, -ν⟩`

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, inv_mod_prime, pow_mod};
use crate::local_set::LocalSet;

pub const DEFAULT_GROUP_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("GroupTooLarge({0}): above the enumeration cap")]
    GroupTooLarge(String),
    #[error("BadDimension({family}, {n})")]
    BadDimension { family: GroupFamily, n: usize },
    #[error("BadField({0}): need an odd prime")]
    BadField(u64),
    #[error("UnsupportedFamily({0})")]
    UnsupportedFamily(GroupFamily),
    #[error("MismatchedField(group ell={group}, set ell={set})")]
    MismatchedField { group: u64, set: u64 },
    #[error("TrivialCharacter")]
    TrivialCharacter,
    #[error("InternalInvariant: {0}")]
    InternalInvariant(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupFamily {
    SL,
    GL,
    Sp,
    SOplus,
    SOminus,
    SOodd,
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for GroupFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "SL" => GroupFamily::SL,
            "GL" => GroupFamily::GL,
            "Sp" => GroupFamily::Sp,
            "SOplus" | "SO+" => GroupFamily::SOplus,
            "SOminus" | "SO-" => GroupFamily::SOminus,
            "SOodd" | "SO" => GroupFamily::SOodd,
            _ => return Err(format!("unknown group family '{s}'")),
        })
    }
}

/// Checks the family/dimension pairing shared by all exponent formulas.
pub fn check_dimension(family: GroupFamily, n: usize) -> Result<(), GroupError> {
    let ok = match family {
        GroupFamily::SL | GroupFamily::GL => n >= 1,
        GroupFamily::Sp => n >= 2 && n % 2 == 0,
        GroupFamily::SOodd => n >= 3 && n % 2 == 1,
        GroupFamily::SOplus | GroupFamily::SOminus => n >= 4 && n % 2 == 0,
    };
    if ok {
        Ok(())
    } else {
        Err(GroupError::BadDimension { family, n })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: GroupFamily,
    pub n: usize,
    pub ell: u64,
    pub cap: u64,
}

impl GroupSpec {
    pub fn new(family: GroupFamily, n: usize, ell: u64) -> Result<Self, GroupError> {
        check_dimension(family, n)?;
        if ell == 2 || !arith::is_prime(ell) {
            return Err(GroupError::BadField(ell));
        }
        Ok(GroupSpec {
            family,
            n,
            ell,
            cap: DEFAULT_GROUP_CAP,
        })
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    /// `|G(F_ℓ)|` from the standard closed forms.
    pub fn order(&self) -> BigUint {
        group_order(self.family, self.n, self.ell)
    }

    pub fn fits_cap(&self) -> bool {
        self.order() <= BigUint::from(self.cap)
    }
}

/// Closed-form order of `G(F_q)`.
pub fn group_order(family: GroupFamily, n: usize, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let pw = |k: usize| q.pow(k as u32);
    let one = BigUint::from(1u32);
    let prod = |range: std::ops::RangeInclusive<usize>, step: usize| {
        range.fold(one.clone(), |acc, i| acc * (pw(step * i) - &one))
    };
    match family {
        GroupFamily::GL => pw(n * (n - 1) / 2) * prod(1..=n, 1),
        GroupFamily::SL => pw(n * (n - 1) / 2) * prod(2..=n, 1),
        GroupFamily::Sp | GroupFamily::SOodd => {
            let m = n / 2;
            pw(m * m) * prod(1..=m, 2)
        }
        GroupFamily::SOplus | GroupFamily::SOminus => {
            let m = n / 2;
            let middle = if family == GroupFamily::SOplus {
                pw(m) - &one
            } else {
                pw(m) + &one
            };
            pw(m * (m - 1)) * middle * prod(1..=m - 1, 2)
        }
    }
}

/// `α(G)` of the Gaussian-sum cancellation table.
pub fn alpha_exponent(family: GroupFamily, n: usize) -> Result<Rational64, GroupError> {
    check_dimension(family, n)?;
    let n = n as i64;
    Ok(match family {
        GroupFamily::GL => Rational64::new(n * (n - 1), 2),
        GroupFamily::SL => Rational64::new(n * n - 1, 2),
        GroupFamily::Sp | GroupFamily::SOminus => Rational64::new(n * (n + 2), 8),
        GroupFamily::SOodd => Rational64::new(n * n - 1, 8),
        GroupFamily::SOplus => Rational64::new(n * (n - 2), 8),
    })
}

/// `(dim G, rank G)`.
pub fn dim_rank(family: GroupFamily, n: usize) -> Result<(i64, Rational64), GroupError> {
    check_dimension(family, n)?;
    let n = n as i64;
    Ok(match family {
        GroupFamily::SL => (n * n - 1, Rational64::from_integer(n - 1)),
        GroupFamily::GL => (n * n, Rational64::from_integer(n)),
        GroupFamily::Sp => (n * (n + 1) / 2, Rational64::new(n, 2)),
        GroupFamily::SOodd | GroupFamily::SOplus | GroupFamily::SOminus => {
            (n * (n - 1) / 2, Rational64::from_integer(n / 2))
        }
    })
}

/// The sieve exponent `B`. For `SO^±_n` the value is `1 + dim + rank/2`
/// (see README); `GL_n` is not a sieve family.
pub fn sieve_exponent_b(family: GroupFamily, n: usize) -> Result<Rational64, GroupError> {
    check_dimension(family, n)?;
    let n = n as i64;
    Ok(match family {
        GroupFamily::GL => return Err(GroupError::UnsupportedFamily(family)),
        GroupFamily::SL => Rational64::new(2 * n * n + n - 1, 2),
        GroupFamily::Sp => Rational64::new(2 * n * n + 3 * n + 4, 4),
        GroupFamily::SOodd => Rational64::new(2 * n * n - n + 3, 4),
        GroupFamily::SOplus | GroupFamily::SOminus => Rational64::new(2 * n * n - n + 4, 4),
    })
}

/// `N_t = #{g : tr g = t}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceHistogram {
    pub ell: u64,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl TraceHistogram {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,count\n");
        for (t, c) in self.counts.iter().enumerate() {
            s.push_str(&format!("{t},{c}\n"));
        }
        s
    }
}

type Mat = Vec<u64>;

fn identity(n: usize) -> Mat {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

fn mat_mul(a: &[u64], b: &[u64], n: usize, ell: u64) -> Mat {
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
        for j in 0..n {
            out[i * n + j] %= ell;
        }
    }
    out
}

fn elementary(n: usize, i: usize, j: usize, t: u64) -> Mat {
    let mut m = identity(n);
    m[i * n + j] = t;
    m
}

/// Gram matrix of the pinned bilinear form.
pub fn pinned_form(family: GroupFamily, n: usize, ell: u64) -> Result<Vec<u64>, GroupError> {
    check_dimension(family, n)?;
    let mut g = vec![0u64; n * n];
    let mut hyperbolic = |k: usize| {
        for h in 0..k {
            g[(2 * h) * n + 2 * h + 1] = 1;
            g[(2 * h + 1) * n + 2 * h] = 1;
        }
    };
    match family {
        GroupFamily::Sp => {
            let m = n / 2;
            for i in 0..m {
                g[i * n + m + i] = 1;
                g[(m + i) * n + i] = ell - 1;
            }
        }
        GroupFamily::SOplus => hyperbolic(n / 2),
        GroupFamily::SOodd => {
            hyperbolic(n / 2);
            g[n * n - 1] = 1;
        }
        GroupFamily::SOminus => {
            hyperbolic(n / 2 - 1);
            let nu = smallest_nonsquare(ell);
            g[(n - 2) * n + n - 2] = 1;
            g[n * n - 1] = ell - nu;
        }
        GroupFamily::SL | GroupFamily::GL => return Err(GroupError::UnsupportedFamily(family)),
    }
    Ok(g)
}

fn smallest_nonsquare(ell: u64) -> u64 {
    (2..ell).find(|&a| pow_mod(a, (ell - 1) / 2, ell) == ell - 1).unwrap()
}

fn generators(spec: &GroupSpec) -> Result<Vec<Mat>, GroupError> {
    let (n, ell) = (spec.n, spec.ell);
    let mut gens = Vec::new();
    match spec.family {
        GroupFamily::SL | GroupFamily::GL => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        gens.push(elementary(n, i, j, 1));
                    }
                }
            }
            if spec.family == GroupFamily::GL {
                let mut d = identity(n);
                d[0] = arith::primitive_root(ell);
                gens.push(d);
            }
        }
        GroupFamily::Sp => {
            let m = n / 2;
            // [[I, S], [0, I]] and [[I, 0], [S, I]] for S = E_ii, E_ij + E_ji
            for i in 0..m {
                for j in i..m {
                    let mut up = identity(n);
                    let mut low = identity(n);
                    up[i * n + m + j] = 1;
                    up[j * n + m + i] = 1;
                    low[(m + i) * n + j] = 1;
                    low[(m + j) * n + i] = 1;
                    gens.push(up);
                    gens.push(low);
                }
            }
            // [[A, 0], [0, A^{-T}]] for A = I + E_ij
            for i in 0..m {
                for j in 0..m {
                    if i != j {
                        let mut g = identity(n);
                        g[i * n + j] = 1;
                        g[(m + j) * n + m + i] = ell - 1;
                        gens.push(g);
                    }
                }
            }
        }
        _ => {
            let form = pinned_form(spec.family, n, ell)?;
            let reflections = anisotropic_reflections(&form, n, ell);
            let first = reflections
                .first()
                .ok_or_else(|| GroupError::InternalInvariant("no anisotropic vector".into()))?
                .clone();
            gens.extend(reflections.iter().skip(1).map(|r| mat_mul(&first, r, n, ell)));
        }
    }
    Ok(gens)
}

/// Reflections `w ↦ w - 2 B(w,v)/B(v,v) v` in every anisotropic `v` whose
/// first nonzero coordinate is 1.
fn anisotropic_reflections(form: &[u64], n: usize, ell: u64) -> Vec<Mat> {
    let mut vectors = Vec::new();
    for lead in 0..n {
        let tail = ell.pow((n - lead - 1) as u32);
        for mut k in 0..tail {
            let mut v = vec![0u64; n];
            v[lead] = 1;
            for x in v.iter_mut().skip(lead + 1) {
                *x = k % ell;
                k /= ell;
            }
            vectors.push(v);
        }
    }
    let mut out = Vec::new();
    for v in vectors {
        let mv: Vec<u64> = (0..n)
            .map(|j| (0..n).map(|k| form[j * n + k] * v[k]).sum::<u64>() % ell)
            .collect();
        let q = v.iter().zip(&mv).map(|(a, b)| a * b).sum::<u64>() % ell;
        let Some(q_inv) = inv_mod_prime(q, ell) else {
            continue;
        };
        let c = 2 * q_inv % ell;
        let mut r = identity(n);
        for i in 0..n {
            for j in 0..n {
                let sub = c * v[i] % ell * mv[j] % ell;
                r[i * n + j] = (r[i * n + j] + ell - sub) % ell;
            }
        }
        out.push(r);
    }
    out
}

fn pack(m: &[u64], ell: u64) -> u128 {
    m.iter().rev().fold(0u128, |acc, &x| acc * ell as u128 + x as u128)
}

fn unpack(mut key: u128, n: usize, ell: u64) -> Mat {
    (0..n * n)
        .map(|_| {
            let d = (key % ell as u128) as u64;
            key /= ell as u128;
            d
        })
        .collect()
}

/// Breadth-first closure from the generators, calling `visit` once per
/// element; the count must match the closed-form order.
fn closure(spec: &GroupSpec, mut visit: impl FnMut(&[u64])) -> Result<u64, GroupError> {
    let (n, ell) = (spec.n, spec.ell);
    let expected = spec.order();
    if expected > BigUint::from(spec.cap) {
        return Err(GroupError::GroupTooLarge(format!(
            "{}_{}(F_{}) has order {expected}",
            spec.family, n, ell
        )));
    }
    if (ell as f64).log2() * (n * n) as f64 >= 127.0 {
        return Err(GroupError::GroupTooLarge(format!("{n}x{n} matrices over F_{ell}")));
    }
    let gens = generators(spec)?;
    let start = identity(n);
    let mut seen: HashSet<u128> = HashSet::new();
    let mut queue: Vec<u128> = vec![pack(&start, ell)];
    seen.insert(queue[0]);
    let mut head = 0;
    while head < queue.len() {
        let g = unpack(queue[head], n, ell);
        head += 1;
        visit(&g);
        for s in &gens {
            let key = pack(&mat_mul(&g, s, n, ell), ell);
            if seen.insert(key) {
                if seen.len() as u64 > spec.cap {
                    return Err(GroupError::GroupTooLarge(format!("closure passed {}", spec.cap)));
                }
                queue.push(key);
            }
        }
    }
    let order = queue.len() as u64;
    if BigUint::from(order) != expected {
        return Err(GroupError::InternalInvariant(format!(
            "closure of {}_{}(F_{}) has {order} elements, expected {expected}",
            spec.family, n, ell
        )));
    }
    Ok(order)
}

fn trace(m: &[u64], n: usize, ell: u64) -> u64 {
    (0..n).map(|i| m[i * n + i]).sum::<u64>() % ell
}

/// Exact order and trace histogram.
pub fn enumerate_group(spec: &GroupSpec) -> Result<(u64, TraceHistogram), GroupError> {
    let mut counts = vec![0u64; spec.ell as usize];
    let order = closure(spec, |g| counts[trace(g, spec.n, spec.ell) as usize] += 1)?;
    Ok((
        order,
        TraceHistogram {
            ell: spec.ell,
            counts,
            total: order,
        },
    ))
}

/// `N_t = ℓ(ℓ + χ(t² - 4))` for `SL_2(F_ℓ)`, `χ` the Legendre symbol.
pub fn sl2_trace_histogram(ell: u64) -> TraceHistogram {
    let counts = (0..ell)
        .map(|t| {
            let disc = (t * t % ell + ell * ell - 4) % ell;
            match disc {
                0 => ell * ell,
                _ if pow_mod(disc, (ell - 1) / 2, ell) == 1 => ell * (ell + 1),
                _ => ell * (ell - 1),
            }
        })
        .collect();
    TraceHistogram {
        ell,
        counts,
        total: ell * (ell * ell - 1),
    }
}

/// Exact trace histogram: closed form for `SL_2 = Sp_2`, enumeration otherwise.
pub fn trace_histogram(spec: &GroupSpec) -> Result<TraceHistogram, GroupError> {
    match (spec.family, spec.n) {
        (GroupFamily::SL | GroupFamily::Sp, 2) => Ok(sl2_trace_histogram(spec.ell)),
        _ => enumerate_group(spec).map(|(_, h)| h),
    }
}

/// Whether `trace_histogram` can answer without passing the cap.
pub fn histogram_available(spec: &GroupSpec) -> bool {
    matches!((spec.family, spec.n), (GroupFamily::SL | GroupFamily::Sp, 2)) || spec.fits_cap()
}

/// All elements, row-major. Meant for small groups and tests.
pub fn group_elements(spec: &GroupSpec) -> Result<Vec<Vec<u64>>, GroupError> {
    let mut out = Vec::new();
    closure(spec, |g| out.push(g.to_vec()))?;
    Ok(out)
}

/// `|Σ_t N_t e^{2πict/ℓ}| / |G|` for `c ≠ 0`.
pub fn gauss_sum_at(hist: &TraceHistogram, c: u64) -> Result<f64, GroupError> {
    if c % hist.ell == 0 {
        return Err(GroupError::TrivialCharacter);
    }
    let ell = hist.ell;
    let s: Complex64 = hist
        .counts
        .iter()
        .enumerate()
        .map(|(t, &n)| {
            let e = (c as u128 * t as u128 % ell as u128) as f64;
            Complex64::from_polar(n as f64, 2.0 * std::f64::consts::PI * e / ell as f64)
        })
        .sum();
    Ok(s.norm() / hist.total as f64)
}

/// `max_{c ≠ 0} |Σ_g ψ_c(tr g)| / |G|` and the smallest maximizing `c`.
pub fn gauss_sum_max(hist: &TraceHistogram) -> (f64, u64) {
    (1..hist.ell)
        .map(|c| (gauss_sum_at(hist, c).unwrap(), c))
        .fold((f64::NEG_INFINITY, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
}

/// `P(tr g ∈ A) = Σ_{t ∈ A} N_t / |G|`.
pub fn prob_trace_in(hist: &TraceHistogram, a: &LocalSet) -> Result<BigRational, GroupError> {
    if a.ell() != hist.ell {
        return Err(GroupError::MismatchedField {
            group: hist.ell,
            set: a.ell(),
        });
    }
    let hits: u64 = a.iter().map(|t| hist.counts[t as usize]).sum();
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(hist.total)))
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupMetadata {
    pub family: GroupFamily,
    pub n: usize,
    pub ell: u64,
    pub order: String,
    pub alpha_num: i64,
    pub alpha_den: i64,
    #[serde(rename = "B_num")]
    pub b_num: Option<i64>,
    #[serde(rename = "B_den")]
    pub b_den: Option<i64>,
}

pub fn metadata(spec: &GroupSpec) -> Result<GroupMetadata, GroupError> {
    let alpha = alpha_exponent(spec.family, spec.n)?;
    let b = sieve_exponent_b(spec.family, spec.n).ok();
    Ok(GroupMetadata {
        family: spec.family,
        n: spec.n,
        ell: spec.ell,
        order: spec.order().to_string(),
        alpha_num: *alpha.numer(),
        alpha_den: *alpha.denom(),
        b_num: b.map(|b| *b.numer()),
        b_den: b.map(|b| *b.denom()),
    })
}

/// `|G|` as `f64`, for logs and displays.
pub fn order_f64(spec: &GroupSpec) -> f64 {
    spec.order().to_f64().unwrap_or(f64::INFINITY)
}

impl GroupSpec {
    pub fn order_is_zero(&self) -> bool {
        self.order().is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_set::{mth_power_set, LocalSet, Provenance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(f: GroupFamily, n: usize, ell: u64) -> GroupSpec {
        GroupSpec::new(f, n, ell).unwrap()
    }

    #[test]
    fn small_orders() {
        assert_eq!(enumerate_group(&spec(GroupFamily::SL, 2, 3)).unwrap().0, 24);
        assert_eq!(enumerate_group(&spec(GroupFamily::SL, 2, 5)).unwrap().0, 120);
        assert_eq!(enumerate_group(&spec(GroupFamily::GL, 2, 3)).unwrap().0, 48);
        let cases = [
            (GroupFamily::SL, 3, 3),
            (GroupFamily::GL, 3, 3),
            (GroupFamily::Sp, 4, 3),
            (GroupFamily::SOodd, 3, 5),
            (GroupFamily::SOodd, 3, 7),
            (GroupFamily::SOodd, 5, 3),
            (GroupFamily::SOplus, 4, 3),
            (GroupFamily::SOminus, 4, 3),
            (GroupFamily::SOplus, 4, 5),
            (GroupFamily::SOminus, 4, 5),
        ];
        for (f, n, ell) in cases {
            let s = spec(f, n, ell);
            let (order, hist) = enumerate_group(&s).unwrap();
            assert_eq!(BigUint::from(order), s.order(), "{f}_{n}(F_{ell})");
            assert_eq!(hist.counts.iter().sum::<u64>(), order);
        }
        assert_eq!(spec(GroupFamily::Sp, 4, 3).order(), BigUint::from(51_840u32));
        assert_eq!(spec(GroupFamily::SL, 3, 5).order(), BigUint::from(372_000u32));
    }

    #[test]
    fn sp2_is_sl2() {
        for ell in [3, 5, 7] {
            let a = enumerate_group(&spec(GroupFamily::SL, 2, ell)).unwrap();
            let b = enumerate_group(&spec(GroupFamily::Sp, 2, ell)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn elements_preserve_pinned_forms() {
        for (f, n, ell) in [(GroupFamily::Sp, 4, 3), (GroupFamily::SOminus, 4, 3), (GroupFamily::SOodd, 3, 5)] {
            let s = spec(f, n, ell);
            let form = pinned_form(f, n, ell).unwrap();
            for g in group_elements(&s).unwrap().iter().step_by(97) {
                let gt: Vec<u64> = (0..n * n).map(|k| g[(k % n) * n + k / n]).collect();
                let lhs = mat_mul(&mat_mul(&gt, &form, n, ell), g, n, ell);
                assert_eq!(lhs, form);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(GroupSpec::new(GroupFamily::Sp, 3, 5), Err(GroupError::BadDimension { .. })));
        assert!(matches!(GroupSpec::new(GroupFamily::SOplus, 2, 5), Err(GroupError::BadDimension { .. })));
        assert!(matches!(GroupSpec::new(GroupFamily::SOodd, 4, 5), Err(GroupError::BadDimension { .. })));
        assert_eq!(GroupSpec::new(GroupFamily::SL, 2, 2).unwrap_err(), GroupError::BadField(2));
        let big = spec(GroupFamily::SL, 4, 7);
        assert!(matches!(enumerate_group(&big), Err(GroupError::GroupTooLarge(_))));
    }

    #[test]
    fn table_values() {
        let r = Rational64::new;
        assert_eq!(alpha_exponent(GroupFamily::SL, 2).unwrap(), r(3, 2));
        assert_eq!(alpha_exponent(GroupFamily::Sp, 2).unwrap(), r(1, 1));
        assert_eq!(alpha_exponent(GroupFamily::SOplus, 4).unwrap(), r(1, 1));
        assert_eq!(alpha_exponent(GroupFamily::GL, 3).unwrap(), r(3, 1));
        assert_eq!(alpha_exponent(GroupFamily::SOodd, 3).unwrap(), r(1, 1));
        assert_eq!(alpha_exponent(GroupFamily::SOminus, 4).unwrap(), r(3, 1));
        assert_eq!(sieve_exponent_b(GroupFamily::Sp, 2).unwrap(), r(9, 2));
        assert_eq!(sieve_exponent_b(GroupFamily::SL, 3).unwrap(), r(10, 1));
        assert_eq!(sieve_exponent_b(GroupFamily::SL, 2).unwrap(), r(9, 2));
        assert_eq!(sieve_exponent_b(GroupFamily::Sp, 4).unwrap(), r(12, 1));
        assert!(matches!(sieve_exponent_b(GroupFamily::GL, 2), Err(GroupError::UnsupportedFamily(_))));
        for n in 1..=6 {
            for f in [GroupFamily::SL, GroupFamily::Sp, GroupFamily::SOodd, GroupFamily::SOplus, GroupFamily::SOminus] {
                if let Ok(b) = sieve_exponent_b(f, n) {
                    let (dim, rank) = dim_rank(f, n).unwrap();
                    assert_eq!(b, Rational64::from_integer(1 + dim) + rank / 2);
                }
            }
        }
    }

    #[test]
    fn gauss_sums_match_matrix_level_sums() {
        let s = spec(GroupFamily::SL, 2, 3);
        let (_, hist) = enumerate_group(&s).unwrap();
        let elements = group_elements(&s).unwrap();
        for c in 1..3u64 {
            let direct: Complex64 = elements
                .iter()
                .map(|g| {
                    let t = (g[0] + g[3]) % 3;
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (c * t) as f64 / 3.0)
                })
                .sum();
            assert!((direct.norm() / 24.0 - gauss_sum_at(&hist, c).unwrap()).abs() < 1e-12);
        }
        assert_eq!(gauss_sum_at(&hist, 0).unwrap_err(), GroupError::TrivialCharacter);
        for ell in [3u64, 5, 7, 11, 13] {
            let (_, hist) = enumerate_group(&spec(GroupFamily::SL, 2, ell)).unwrap();
            let (g, _) = gauss_sum_max(&hist);
            assert!(g * (ell as f64).powf(1.5) <= 3.0, "ell = {ell}");
        }
    }

    #[test]
    fn sl2_histogram_closed_form() {
        for ell in [3u64, 5, 7, 11, 13] {
            let (_, hist) = enumerate_group(&spec(GroupFamily::SL, 2, ell)).unwrap();
            assert_eq!(hist, sl2_trace_histogram(ell));
        }
        let big = spec(GroupFamily::SL, 2, 661);
        assert!(!big.fits_cap() && histogram_available(&big));
        assert_eq!(trace_histogram(&big).unwrap().counts.iter().sum::<u64>(), 661 * (661 * 661 - 1));
    }

    #[test]
    fn trace_probabilities() {
        let s = spec(GroupFamily::SL, 2, 5);
        let (_, hist) = enumerate_group(&s).unwrap();
        let full = LocalSet::from_predicate(5, Provenance::ExplicitList, |_| true);
        assert_eq!(prob_trace_in(&hist, &full).unwrap(), BigRational::from_integer(1.into()));
        let none = LocalSet::empty(5, Provenance::ExplicitList);
        assert!(prob_trace_in(&hist, &none).unwrap().is_zero());
        let squares = mth_power_set(5, 2);
        let hits = group_elements(&s)
            .unwrap()
            .iter()
            .filter(|g| squares.contains((g[0] + g[3]) % 5))
            .count();
        assert_eq!(
            prob_trace_in(&hist, &squares).unwrap(),
            BigRational::new(BigInt::from(hits), BigInt::from(120))
        );
        assert!(prob_trace_in(&hist, &mth_power_set(7, 2)).is_err());
    }

    #[test]
    fn trace_is_a_class_function() {
        let s = spec(GroupFamily::SL, 3, 3);
        let elements = group_elements(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = &elements[rng.gen_range(0..elements.len())];
            let h = &elements[rng.gen_range(0..elements.len())];
            // h^{-1} = h^{|G| - 1}
            let mut h_inv = identity(3);
            let mut base = h.clone();
            let mut k = elements.len() as u64 - 1;
            while k > 0 {
                if k & 1 == 1 {
                    h_inv = mat_mul(&h_inv, &base, 3, 3);
                }
                base = mat_mul(&base, &base, 3, 3);
                k >>= 1;
            }
            let conj = mat_mul(&mat_mul(h, g, 3, 3), &h_inv, 3, 3);
            assert_eq!(trace(&conj, 3, 3), trace(g, 3, 3));
        }
    }

    #[test]
    fn exports() {
        let s = spec(GroupFamily::SL, 2, 7);
        let meta = serde_json::to_value(metadata(&s).unwrap()).unwrap();
        assert_eq!(meta["order"], "336");
        assert_eq!(meta["alpha_num"], 3);
        assert_eq!(meta["B_num"], 9);
        assert_eq!(meta["B_den"], 2);
        let (_, hist) = enumerate_group(&s).unwrap();
        let csv = hist.to_csv();
        assert!(csv.starts_with("t,count\n0,"));
        assert_eq!(csv.lines().count(), 8);
    }
}
