//! Exact arithmetic in `Z[ζ_d]` and reduction modulo degree-1 prime ideals.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, add_mod, gcd, mul_mod, pow_mod};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CyclotomicError {
    #[error("MixedOrders({0}, {1})")]
    MixedOrders(u64, u64),
    #[error("NotCoprime({0}, {1})")]
    NotCoprime(u64, u64),
    #[error("BadOrder({0}): cyclotomic order must be at least 1")]
    BadOrder(u64),
    #[error("NotAPrimeIdeal(d={d}, ell={ell}, omega={omega}): {reason}")]
    NotAPrimeIdeal {
        d: u64,
        ell: u64,
        omega: u64,
        reason: &'static str,
    },
    #[error("IdealOrderMismatch: ideal has d={found}, expected d={expected}")]
    IdealOrderMismatch { expected: u64, found: u64 },
}

/// Power-basis data for `Z[ζ_d]`: `Φ_d` and the reduction of every `ζ^k`.
#[derive(Debug)]
struct CycRing {
    phi: usize,
    /// `powers[k]` is `ζ^k` written in the basis `1, ζ, ..., ζ^{φ(d)-1}`.
    powers: Vec<Vec<i64>>,
}

fn ring(d: u64) -> Arc<CycRing> {
    static RINGS: OnceLock<Mutex<HashMap<u64, Arc<CycRing>>>> = OnceLock::new();
    let cache = RINGS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(d)
        .or_insert_with(|| Arc::new(CycRing::new(d)))
        .clone()
}

impl CycRing {
    fn new(d: u64) -> Self {
        let cyclotomic = cyclotomic_polynomial(d);
        let phi = cyclotomic.len() - 1;
        let mut powers = Vec::with_capacity(d as usize);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..d {
            powers.push(cur.clone());
            // multiply by X and reduce with the monic Φ_d
            let top = cur[phi - 1];
            let mut next = vec![0i64; phi];
            next[1..phi].copy_from_slice(&cur[..(phi - 1)]);
            if top != 0 {
                for (n, c) in next.iter_mut().zip(&cyclotomic) {
                    *n -= top * c;
                }
            }
            cur = next;
        }
        CycRing { phi, powers }
    }
}

/// Integer coefficients of `Φ_d`, lowest degree first.
pub fn cyclotomic_polynomial(d: u64) -> Vec<i64> {
    // Φ_d = Π_{k | d} (X^k - 1)^{μ(d/k)}; divide (X^d - 1) by Φ_k for proper k | d.
    let mut num = vec![0i64; d as usize + 1];
    num[0] = -1;
    num[d as usize] = 1;
    for k in arith::divisors(d) {
        if k == d {
            continue;
        }
        let div = cyclotomic_polynomial(k);
        num = exact_div(&num, &div);
    }
    num
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dn = den.len() - 1;
    let mut quot = vec![0i64; r.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = r[i + dn];
        quot[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            r[i + j] -= c * dj;
        }
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    quot
}

/// An exact element of `Z[ζ_d]` in the power basis `1, ζ, ..., ζ^{φ(d)-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycInt {
    d: u64,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(d: u64) -> Self {
        let r = ring(d);
        CycInt {
            d,
            coeffs: vec![BigInt::zero(); r.phi],
        }
    }

    pub fn from_int(d: u64, v: i64) -> Self {
        let mut z = Self::zero(d);
        z.coeffs[0] = BigInt::from(v);
        z
    }

    /// `ζ_d^k`.
    pub fn zeta_pow(d: u64, k: i64) -> Self {
        let r = ring(d);
        let k = arith::reduce_i64(k, d) as usize;
        CycInt {
            d,
            coeffs: r.powers[k].iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    /// `Σ_k counts[k] ζ_d^k` for a count vector of length `d`.
    pub fn from_exponent_counts<T>(d: u64, counts: &[T]) -> Self
    where
        T: Clone + Into<BigInt>,
    {
        assert_eq!(counts.len() as u64, d, "one count per exponent class");
        let r = ring(d);
        let mut coeffs = vec![BigInt::zero(); r.phi];
        for (k, c) in counts.iter().enumerate() {
            let c: BigInt = c.clone().into();
            if c.is_zero() {
                continue;
            }
            for (acc, &b) in coeffs.iter_mut().zip(&r.powers[k]) {
                if b != 0 {
                    *acc += &c * b;
                }
            }
        }
        CycInt { d, coeffs }
    }

    /// Builds from power-basis coefficients; shorter input is zero-padded,
    /// longer input is reduced modulo `Φ_d`.
    pub fn from_coeffs(d: u64, coeffs: Vec<BigInt>) -> Self {
        let mut counts = vec![BigInt::zero(); d as usize];
        for (i, c) in coeffs.into_iter().enumerate() {
            counts[i % d as usize] += c;
        }
        Self::from_exponent_counts(d, &counts)
    }

    pub fn order(&self) -> u64 {
        self.d
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &CycInt) -> Result<(), CyclotomicError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(CyclotomicError::MixedOrders(self.d, other.d))
        }
    }

    pub fn add(&self, other: &CycInt) -> Result<CycInt, CyclotomicError> {
        self.check(other)?;
        Ok(CycInt {
            d: self.d,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &CycInt) -> Result<CycInt, CyclotomicError> {
        self.check(other)?;
        Ok(CycInt {
            d: self.d,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn neg(&self) -> CycInt {
        CycInt {
            d: self.d,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &CycInt) -> Result<CycInt, CyclotomicError> {
        self.check(other)?;
        let d = self.d as usize;
        let mut counts = vec![BigInt::zero(); d];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    counts[(i + j) % d] += a * b;
                }
            }
        }
        Ok(Self::from_exponent_counts(self.d, &counts))
    }

    pub fn pow(&self, mut exp: u64) -> CycInt {
        let mut acc = CycInt::from_int(self.d, 1);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            base = base.mul(&base).unwrap();
            exp >>= 1;
        }
        acc
    }

    /// `Σ |c_i|`, the scale of the embedding error budget.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .sum()
    }
}

/// Product in `Z[ζ_d]`.
pub fn cyc_mul(a: &CycInt, b: &CycInt) -> Result<CycInt, CyclotomicError> {
    a.mul(b)
}

/// Image of `z` under `σ_k: ζ_d ↦ e^{2πik/d}`.
pub fn complex_embed(z: &CycInt, k: u64) -> Result<Complex64, CyclotomicError> {
    if gcd(k, z.d) != 1 {
        return Err(CyclotomicError::NotCoprime(k, z.d));
    }
    let d = z.d;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, c) in z.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = (k as u128 * i as u128 % d as u128) as f64;
        let angle = 2.0 * std::f64::consts::PI * e / d as f64;
        acc += Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), angle);
    }
    Ok(acc)
}

/// A prime ideal of `Z[ζ_d]` of residue degree 1: the kernel of `ζ_d ↦ ω`
/// in `F_ℓ`, for `ω` of exact order `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeIdealDeg1 {
    pub d: u64,
    pub ell: u64,
    pub omega: u64,
    pub norm: u64,
}

impl PrimeIdealDeg1 {
    /// Validates `ℓ` prime, `ℓ ≡ 1 (mod d)` and `ω` of exact order `d`.
    pub fn new(d: u64, ell: u64, omega: u64) -> Result<Self, CyclotomicError> {
        let bad = |reason| CyclotomicError::NotAPrimeIdeal {
            d,
            ell,
            omega,
            reason,
        };
        if d == 0 {
            return Err(CyclotomicError::BadOrder(d));
        }
        if !arith::is_prime(ell) {
            return Err(bad("ell is not prime"));
        }
        if (ell - 1) % d != 0 {
            return Err(bad("ell is not 1 mod d"));
        }
        let omega = omega % ell;
        if omega == 0 || pow_mod(omega, d, ell) != 1 {
            return Err(bad("omega^d != 1"));
        }
        if arith::prime_factors(d)
            .into_iter()
            .any(|r| pow_mod(omega, d / r, ell) == 1)
        {
            return Err(bad("omega has order smaller than d"));
        }
        Ok(PrimeIdealDeg1 {
            d,
            ell,
            omega,
            norm: ell,
        })
    }

    /// The ideal with `ω = g^{(ℓ-1)/d}` for the smallest primitive root `g`.
    pub fn canonical(d: u64, ell: u64) -> Result<Self, CyclotomicError> {
        if !arith::is_prime(ell) || d == 0 || (ell - 1) % d != 0 {
            return Err(CyclotomicError::NotAPrimeIdeal {
                d,
                ell,
                omega: 0,
                reason: "no degree-1 ideal of Z[zeta_d] above ell",
            });
        }
        let g = arith::primitive_root(ell);
        Self::new(d, ell, pow_mod(g, (ell - 1) / d, ell))
    }

    /// Galois conjugate `σ_k(λ)`, realized by `ω ↦ ω^k`.
    pub fn conjugate(&self, k: u64) -> Result<Self, CyclotomicError> {
        if gcd(k, self.d) != 1 {
            return Err(CyclotomicError::NotCoprime(k, self.d));
        }
        Self::new(self.d, self.ell, pow_mod(self.omega, k, self.ell))
    }

    /// Number of conjugate ideals above `ℓ`, all of degree 1.
    pub fn multiplicity(&self) -> u64 {
        arith::totient(self.d)
    }

    /// Whether the ideal divides `Φ_d(ω)`, i.e. `ζ ↦ ω` is well defined.
    pub fn kills_cyclotomic(&self) -> bool {
        let phi = cyclotomic_polynomial(self.d);
        let mut acc = 0u64;
        for &c in phi.iter().rev() {
            acc = add_mod(mul_mod(acc, self.omega, self.ell), arith::reduce_i64(c, self.ell), self.ell);
        }
        acc == 0
    }
}

/// Residue classes `C ⊂ (Z/m)^×` restricting the primes `ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceCondition {
    pub modulus: u64,
    pub classes: Vec<u64>,
}

impl CongruenceCondition {
    pub fn new(modulus: u64, classes: Vec<u64>) -> Self {
        let mut classes: Vec<u64> = classes.into_iter().map(|c| c % modulus).collect();
        classes.sort_unstable();
        classes.dedup();
        CongruenceCondition { modulus, classes }
    }

    pub fn admits(&self, ell: u64) -> bool {
        self.classes.contains(&(ell % self.modulus))
    }
}

/// One representative degree-1 ideal above each prime `ℓ <= bound` with
/// `ℓ ≡ 1 (mod d)` and, if given, `ℓ mod m ∈ C`.
pub fn deg1_prime_ideals(
    d: u64,
    bound: u64,
    condition: Option<&CongruenceCondition>,
) -> Result<Vec<PrimeIdealDeg1>, CyclotomicError> {
    if d == 0 {
        return Err(CyclotomicError::BadOrder(d));
    }
    if let Some(c) = condition {
        if gcd(d, c.modulus) != 1 {
            return Err(CyclotomicError::NotCoprime(d, c.modulus));
        }
    }
    arith::primes_up_to(bound)
        .into_iter()
        .filter(|&ell| ell % d == 1 % d && d % ell != 0)
        .filter(|&ell| condition.map_or(true, |c| c.admits(ell)))
        .map(|ell| PrimeIdealDeg1::canonical(d, ell))
        .collect()
}

/// Total count of ideals represented, each prime contributing `φ(d)` conjugates.
pub fn lambda_cardinality(ideals: &[PrimeIdealDeg1]) -> u64 {
    ideals.iter().map(|i| i.multiplicity()).sum()
}

/// The ring map `Z[ζ_d] → F_ℓ`, `ζ ↦ ω`.
pub fn reduce_mod(z: &CycInt, ideal: &PrimeIdealDeg1) -> Result<u64, CyclotomicError> {
    if z.d != ideal.d {
        return Err(CyclotomicError::MixedOrders(z.d, ideal.d));
    }
    let ell = BigInt::from(ideal.ell);
    let mut acc = 0u64;
    let mut w = 1u64;
    for c in &z.coeffs {
        let r = c.mod_floor(&ell).to_u64().unwrap();
        acc = add_mod(acc, mul_mod(r, w, ideal.ell), ideal.ell);
        w = mul_mod(w, ideal.omega, ideal.ell);
    }
    Ok(acc)
}

/// Quadratic Gauss sum `g_p = Σ_x (x|p) ζ_p^x` inside `Z[ζ_{4p}]` (`ζ_p = ζ_{4p}^4`).
pub fn quadratic_gauss_sum(p: u64) -> CycInt {
    let d = 4 * p;
    let mut counts = vec![0i64; d as usize];
    for x in 1..p {
        let s = if pow_mod(x, (p - 1) / 2, p) == 1 { 1 } else { -1 };
        counts[(4 * x % d) as usize] += s;
    }
    CycInt::from_exponent_counts(d, &counts)
}

/// `√p` in `Z[ζ_{4p}]` as `ε_p^{-1} g_p`, positive under `ζ ↦ e^{2πi/d}`.
/// For `p = 2` this is `ζ_8 + ζ_8^{-1}`.
pub fn sqrt_p_element(p: u64) -> CycInt {
    if p == 2 {
        return CycInt::zeta_pow(8, 1).add(&CycInt::zeta_pow(8, 7)).unwrap();
    }
    let g = quadratic_gauss_sum(p);
    if p % 4 == 1 {
        g
    } else {
        // ε_p = ζ_4 = ζ_{4p}^p, so ε_p^{-1} = ζ_{4p}^{3p}
        CycInt::zeta_pow(4 * p, 3 * p as i64).mul(&g).unwrap()
    }
}

/// The cyclotomic order used for trace functions in characteristic `p`.
pub fn trace_order(p: u64) -> u64 {
    if p == 2 {
        8
    } else {
        4 * p
    }
}

/// `√(p^e)` modulo `λ`, fixed by the Gauss-sum evaluation of `√p`.
pub fn sqrt_q_mod(ideal: &PrimeIdealDeg1, p: u64, e: u32) -> Result<u64, CyclotomicError> {
    let d = trace_order(p);
    if ideal.d != d {
        return Err(CyclotomicError::IdealOrderMismatch {
            expected: d,
            found: ideal.d,
        });
    }
    let s = reduce_mod(&sqrt_p_element(p), ideal)?;
    Ok(pow_mod(s, e as u64, ideal.ell))
}

/// `π(a, m, L)`: primes `ℓ <= L` with `ℓ ≡ a (mod m)`.
pub fn prime_count(a: u64, m: u64, bound: u64) -> Result<u64, CyclotomicError> {
    if m == 0 || gcd(a % m, m) != 1 {
        return Err(CyclotomicError::NotCoprime(a, m));
    }
    Ok(arith::primes_up_to(bound)
        .into_iter()
        .filter(|&ell| ell % m == a % m)
        .count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(d: u64, c: &[i64]) -> CycInt {
        CycInt::from_coeffs(d, c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(5), vec![1, 1, 1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(20).len(), 9);
    }

    #[test]
    fn products() {
        let i = CycInt::zeta_pow(4, 1);
        assert_eq!(cyc_mul(&i, &i).unwrap(), CycInt::from_int(4, -1));
        let a = cyc(5, &[1, 1]);
        let b = cyc(5, &[1, 0, 1]);
        assert_eq!(cyc_mul(&a, &b).unwrap(), cyc(5, &[1, 1, 1, 1]));
        assert!(cyc_mul(&a, &CycInt::zero(5)).unwrap().is_zero());
        assert_eq!(
            cyc_mul(&a, &CycInt::zero(7)).unwrap_err(),
            CyclotomicError::MixedOrders(5, 7)
        );
    }

    #[test]
    fn embeddings() {
        let i = complex_embed(&CycInt::zeta_pow(4, 1), 1).unwrap();
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let z = CycInt::zeta_pow(5, 1).add(&CycInt::zeta_pow(5, 4)).unwrap();
        let v = complex_embed(&z, 1).unwrap();
        assert!((v.re - 0.6180339887).abs() < 1e-9 && v.im.abs() < 1e-12);
        let mut counts = vec![0i64; 5];
        for x in 1..5u64 {
            counts[x as usize] = if pow_mod(x, 2, 5) == 1 { 1 } else { -1 };
        }
        let g5 = CycInt::from_exponent_counts(5, &counts);
        let v = complex_embed(&g5, 1).unwrap();
        assert!((v.re - 5f64.sqrt()).abs() < 1e-9 && v.im.abs() < 1e-9);
        assert_eq!(
            complex_embed(&g5, 5).unwrap_err(),
            CyclotomicError::NotCoprime(5, 5)
        );
    }

    #[test]
    fn sqrt_p_elements_embed_positively() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let v = complex_embed(&sqrt_p_element(p), 1).unwrap();
            assert!((v.re - (p as f64).sqrt()).abs() < 1e-9, "p={p}");
            assert!(v.im.abs() < 1e-9);
            let sq = sqrt_p_element(p).pow(2);
            assert_eq!(sq, CycInt::from_int(trace_order(p), p as i64));
        }
    }

    #[test]
    fn ideal_lists() {
        let ells = |v: Vec<PrimeIdealDeg1>| v.into_iter().map(|i| i.ell).collect::<Vec<_>>();
        assert_eq!(ells(deg1_prime_ideals(20, 100, None).unwrap()), vec![41, 61]);
        let c = CongruenceCondition::new(3, vec![1]);
        assert_eq!(
            ells(deg1_prime_ideals(20, 700, Some(&c)).unwrap()),
            vec![61, 181, 241, 421, 541, 601, 661]
        );
        assert!(deg1_prime_ideals(4, 4, None).unwrap().is_empty());
        let bad = CongruenceCondition::new(10, vec![1]);
        assert!(deg1_prime_ideals(20, 100, Some(&bad)).is_err());
        for ideal in deg1_prime_ideals(28, 2000, None).unwrap() {
            assert!(ideal.kills_cyclotomic());
            assert_eq!(ideal.multiplicity(), 12);
        }
    }

    #[test]
    fn reductions() {
        let lam = PrimeIdealDeg1::new(5, 11, 3).unwrap();
        assert_eq!(reduce_mod(&cyc(5, &[1, 1]), &lam).unwrap(), 4);
        // Φ_5(ζ) reduces to zero through from_coeffs as well
        assert_eq!(reduce_mod(&cyc(5, &[1, 1, 1, 1, 1]), &lam).unwrap(), 0);
        assert!(PrimeIdealDeg1::new(5, 11, 1).is_err());
        assert!(PrimeIdealDeg1::new(5, 13, 3).is_err());
        let lam20 = PrimeIdealDeg1::canonical(20, 41).unwrap();
        let g = sqrt_p_element(5);
        let s = reduce_mod(&g, &lam20).unwrap();
        assert_eq!(mul_mod(s, s, 41), 5);
    }

    #[test]
    fn square_roots_of_q() {
        for ideal in deg1_prime_ideals(20, 2000, None).unwrap() {
            assert_eq!(sqrt_q_mod(&ideal, 5, 2).unwrap(), 5);
            let s = sqrt_q_mod(&ideal, 5, 1).unwrap();
            assert_eq!(mul_mod(s, s, ideal.ell), 5);
            if ideal.ell == 41 {
                assert!(s == 13 || s == 28);
            }
        }
        for ideal in deg1_prime_ideals(12, 2000, None).unwrap() {
            for e in 1..6u32 {
                let s = sqrt_q_mod(&ideal, 3, e).unwrap();
                assert_eq!(mul_mod(s, s, ideal.ell), pow_mod(3, e as u64, ideal.ell));
            }
        }
        let lam = PrimeIdealDeg1::canonical(20, 41).unwrap();
        assert!(sqrt_q_mod(&lam, 3, 1).is_err());
    }

    #[test]
    fn prime_counts() {
        assert_eq!(prime_count(1, 20, 100).unwrap(), 2);
        assert_eq!(prime_count(1, 2, 10).unwrap(), 3);
        assert_eq!(prime_count(1, 20, 40).unwrap(), 0);
        assert!(prime_count(2, 20, 40).is_err());
    }

    #[test]
    fn ideal_json_shape() {
        let lam = PrimeIdealDeg1::canonical(20, 41).unwrap();
        let v = serde_json::to_value(&lam).unwrap();
        assert_eq!(v["d"], 20);
        assert_eq!(v["ell"], 41);
        assert_eq!(v["norm"], 41);
        assert!(v["omega"].is_u64());
    }

    fn small_cyc(d: u64) -> impl Strategy<Value = CycInt> {
        let phi = arith::totient(d) as usize;
        proptest::collection::vec(-50i64..50, phi).prop_map(move |c| cyc(d, &c))
    }

    proptest! {
        #[test]
        fn ring_axioms_and_homomorphisms(
            (a, b, c) in (small_cyc(20), small_cyc(20), small_cyc(20))
        ) {
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            let ab = a.mul(&b).unwrap();
            for ideal in deg1_prime_ideals(20, 300, None).unwrap() {
                let ra = reduce_mod(&a, &ideal).unwrap();
                let rb = reduce_mod(&b, &ideal).unwrap();
                prop_assert_eq!(reduce_mod(&ab, &ideal).unwrap(), mul_mod(ra, rb, ideal.ell));
                prop_assert_eq!(reduce_mod(&a.add(&b).unwrap(), &ideal).unwrap(), add_mod(ra, rb, ideal.ell));
            }
            for k in [1u64, 3, 7, 19] {
                let lhs = complex_embed(&ab, k).unwrap();
                let rhs = complex_embed(&a, k).unwrap() * complex_embed(&b, k).unwrap();
                prop_assert!((lhs - rhs).norm() <= 1e-6 * rhs.norm().max(1.0));
            }
        }
    }
}
