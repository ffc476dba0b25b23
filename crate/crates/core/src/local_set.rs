//! Subsets of a prime field `F_ℓ` with exact densities.

use bitvec::prelude::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{self, pow_mod};
use crate::intpoly::IntPoly;

/// Where a set came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Formula { text: String },
    MthPowers { m: u64 },
    PolynomialImage { f: String },
    ExplicitList,
    Scaled { factor: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSet {
    ell: u64,
    members: BitVec,
    pub provenance: Provenance,
}

impl LocalSet {
    pub fn empty(ell: u64, provenance: Provenance) -> Self {
        LocalSet {
            ell,
            members: bitvec![0; ell as usize],
            provenance,
        }
    }

    pub fn from_predicate(ell: u64, provenance: Provenance, mut pred: impl FnMut(u64) -> bool) -> Self {
        let mut s = Self::empty(ell, provenance);
        for a in 0..ell {
            if pred(a) {
                s.members.set(a as usize, true);
            }
        }
        s
    }

    /// Explicit residues, reduced mod `ℓ`.
    pub fn from_list(ell: u64, list: &[i64]) -> Self {
        let mut s = Self::empty(ell, Provenance::ExplicitList);
        for &v in list {
            s.insert(arith::reduce_i64(v, ell));
        }
        s
    }

    pub fn insert(&mut self, a: u64) {
        self.members.set((a % self.ell) as usize, true);
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn contains(&self, a: u64) -> bool {
        self.members[(a % self.ell) as usize]
    }

    pub fn count(&self) -> u64 {
        self.members.count_ones() as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter_ones().map(|i| i as u64)
    }

    pub fn bits(&self) -> &BitSlice {
        &self.members
    }

    /// `|A|/ℓ`, exactly.
    pub fn density(&self) -> BigRational {
        BigRational::new(BigInt::from(self.count()), BigInt::from(self.ell))
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.ell
    }

    /// `c·A = {c a : a ∈ A}`.
    pub fn scaled(&self, c: u64) -> LocalSet {
        let mut s = Self::empty(self.ell, Provenance::Scaled { factor: c % self.ell });
        for a in self.iter() {
            s.insert(arith::mul_mod(a, c, self.ell));
        }
        s
    }

    pub fn complement(&self) -> LocalSet {
        LocalSet {
            ell: self.ell,
            members: !self.members.clone(),
            provenance: Provenance::ExplicitList,
        }
    }
}

/// `{0} ∪ {y^m}` in `F_ℓ`.
pub fn mth_power_set(ell: u64, m: u64) -> LocalSet {
    let mut s = LocalSet::empty(ell, Provenance::MthPowers { m });
    s.insert(0);
    for y in 1..ell {
        s.insert(pow_mod(y, m, ell));
    }
    s
}

/// `(1 - 1/ℓ)/gcd(m, ℓ-1) + 1/ℓ`.
pub fn mth_power_density(ell: u64, m: u64) -> BigRational {
    let l = BigInt::from(ell);
    let g = BigInt::from(arith::gcd(m, ell - 1));
    (BigRational::one() - BigRational::new(BigInt::one(), l.clone())) / BigRational::from_integer(g)
        + BigRational::new(BigInt::one(), l)
}

/// `{f(y) : y ∈ F_ℓ}`.
pub fn polynomial_image_set(f: &IntPoly, ell: u64) -> LocalSet {
    let coeffs: Vec<u64> = f.coeffs().iter().map(|&c| arith::reduce_i64(c, ell)).collect();
    let mut s = LocalSet::empty(ell, Provenance::PolynomialImage { f: f.to_string() });
    for y in 0..ell {
        let v = coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| arith::add_mod(arith::mul_mod(acc, y, ell), c, ell));
        s.insert(v);
    }
    s
}

/// `Σ_{n=1}^d (-1)^{n+1}/n!`, the image density of a degree-`d` polynomial
/// with Galois group `S_d`.
pub fn image_density_expected(d: u32) -> BigRational {
    let mut fact = BigInt::one();
    let mut acc = BigRational::zero();
    for n in 1..=d {
        fact *= n;
        let term = BigRational::new(BigInt::one(), fact.clone());
        if n % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intpoly::parse_poly;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn power_sets() {
        let s = mth_power_set(13, 2);
        assert_eq!(s.density(), q(7, 13));
        let c = mth_power_set(7, 3);
        assert_eq!(c.iter().collect::<Vec<_>>(), vec![0, 1, 6]);
        assert_eq!(c.density(), q(3, 7));
        assert!(mth_power_set(5, 3).is_full());
        for ell in arith::primes_up_to(200) {
            for m in 2..=10 {
                assert_eq!(mth_power_set(ell, m).density(), mth_power_density(ell, m));
            }
        }
    }

    #[test]
    fn expected_image_densities() {
        assert_eq!(image_density_expected(1), q(1, 1));
        assert_eq!(image_density_expected(2), q(1, 2));
        assert_eq!(image_density_expected(3), q(2, 3));
        assert_eq!(image_density_expected(4), q(5, 8));
    }

    #[test]
    fn images_and_scaling() {
        let sq = polynomial_image_set(&parse_poly("X^2").unwrap(), 13);
        assert_eq!(sq.bits(), mth_power_set(13, 2).bits());
        let s = LocalSet::from_list(7, &[1, -1, 9]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 2, 6]);
        assert_eq!(s.scaled(3).iter().collect::<Vec<_>>(), vec![3, 4, 6]);
        assert_eq!(s.complement().count(), 4);
    }
}
