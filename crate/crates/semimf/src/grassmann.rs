//! Exact arithmetic in the finite-dimensional Grassmann algebra over the
//! rationals with `N` anticommuting generators `g1..gN`.
//!
//! Elements are kept in canonical sparse form: a map from generator subsets
//! (bitmasks over `{1..N}`) to nonzero rational coefficients. Canonicity makes
//! structural equality coincide with semantic equality.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

/// Hard cap on the number of generators; term keys are `u32` bitmasks and all
/// linear algebra over the algebra is bounded by the `2^N` monomial basis.
pub const MAX_GENERATORS: u32 = 16;

/// Generator-subset key: bit `i` set means generator `g(i+1)` is present.
pub type Mask = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrassmannError {
    #[error("algebra mismatch: {left} vs {right} generators")]
    AlgebraMismatch { left: u32, right: u32 },
    #[error("element with zero body is not invertible")]
    NotInvertible,
    #[error("generator index {index} out of range 1..={n}")]
    GeneratorOutOfRange { index: u32, n: u32 },
    #[error("{0} generators exceeds the supported maximum of {MAX_GENERATORS}")]
    TooManyGenerators(u32),
}

/// Grading class of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// No terms at all.
    Zero,
    /// Every term has an even number of generators.
    Even,
    /// Every term has an odd number of generators.
    Odd,
    /// Terms of both parities are present.
    Mixed,
}

/// Sign picked up when merging two ascending generator lists given as masks.
///
/// Counts the transpositions needed to interleave `b`'s generators into `a`'s,
/// i.e. the number of pairs `(i in a, j in b)` with `i > j`.
pub fn reorder_sign(a: Mask, b: Mask) -> i8 {
    let mut shifted = a >> 1;
    let mut swaps = 0u32;
    while shifted != 0 {
        swaps += (shifted & b).count_ones();
        shifted >>= 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// An element of the Grassmann algebra with `n_generators` generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrassmannElement {
    n_generators: u32,
    terms: BTreeMap<Mask, BigRational>,
}

impl GrassmannElement {
    fn check_n(n: u32) -> Result<(), GrassmannError> {
        if n > MAX_GENERATORS {
            return Err(GrassmannError::TooManyGenerators(n));
        }
        Ok(())
    }

    pub fn zero(n_generators: u32) -> Self {
        Self::check_n(n_generators).expect("generator count within cap");
        GrassmannElement {
            n_generators,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n_generators: u32) -> Self {
        Self::from_rational(n_generators, BigRational::one())
    }

    pub fn from_rational(n_generators: u32, value: BigRational) -> Self {
        let mut e = Self::zero(n_generators);
        if !value.is_zero() {
            e.terms.insert(0, value);
        }
        e
    }

    pub fn from_integer(n_generators: u32, value: i64) -> Self {
        Self::from_rational(n_generators, BigRational::from(BigInt::from(value)))
    }

    /// The single generator `g(index)`, 1-based.
    pub fn generator(n_generators: u32, index: u32) -> Result<Self, GrassmannError> {
        Self::check_n(n_generators)?;
        if index == 0 || index > n_generators {
            return Err(GrassmannError::GeneratorOutOfRange {
                index,
                n: n_generators,
            });
        }
        let mut e = Self::zero(n_generators);
        e.terms.insert(1 << (index - 1), BigRational::one());
        Ok(e)
    }

    /// A single monomial `coeff * g_{mask}`.
    pub fn monomial(n_generators: u32, mask: Mask, coeff: BigRational) -> Result<Self, GrassmannError> {
        Self::check_n(n_generators)?;
        if n_generators < 32 && mask >= (1 << n_generators) {
            return Err(GrassmannError::GeneratorOutOfRange {
                index: 32 - mask.leading_zeros(),
                n: n_generators,
            });
        }
        let mut e = Self::zero(n_generators);
        if !coeff.is_zero() {
            e.terms.insert(mask, coeff);
        }
        Ok(e)
    }

    pub fn n_generators(&self) -> u32 {
        self.n_generators
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Term iterator in ascending mask order.
    pub fn terms(&self) -> impl Iterator<Item = (Mask, &BigRational)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coefficient(&self, mask: Mask) -> BigRational {
        self.terms.get(&mask).cloned().unwrap_or_else(BigRational::zero)
    }

    fn same_algebra(&self, other: &Self) -> Result<(), GrassmannError> {
        if self.n_generators != other.n_generators {
            return Err(GrassmannError::AlgebraMismatch {
                left: self.n_generators,
                right: other.n_generators,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.same_algebra(other)?;
        let mut terms = self.terms.clone();
        for (mask, coeff) in &other.terms {
            let entry = terms.entry(*mask).or_insert_with(BigRational::zero);
            *entry += coeff;
            if entry.is_zero() {
                terms.remove(mask);
            }
        }
        Ok(GrassmannElement {
            n_generators: self.n_generators,
            terms,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GrassmannElement {
            n_generators: self.n_generators,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.n_generators);
        }
        GrassmannElement {
            n_generators: self.n_generators,
            terms: self.terms.iter().map(|(m, c)| (*m, c * factor)).collect(),
        }
    }

    /// Supercommutative product. Monomials sharing a generator multiply to
    /// zero; merging generator lists contributes the transposition sign.
    pub fn mul(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.same_algebra(other)?;
        let mut terms: BTreeMap<Mask, BigRational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let mut coeff = ca * cb;
                if reorder_sign(*ma, *mb) < 0 {
                    coeff = -coeff;
                }
                let mask = ma | mb;
                let entry = terms.entry(mask).or_insert_with(BigRational::zero);
                *entry += coeff;
                if entry.is_zero() {
                    terms.remove(&mask);
                }
            }
        }
        Ok(GrassmannElement {
            n_generators: self.n_generators,
            terms,
        })
    }

    pub fn pow(&self, exp: u32) -> Result<Self, GrassmannError> {
        let mut acc = Self::one(self.n_generators);
        for _ in 0..exp {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for mask in self.terms.keys() {
            if mask.count_ones() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (false, false) => Parity::Zero,
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    /// True when every term is compatible with the given homogeneous parity
    /// (zero is compatible with both).
    pub fn has_parity(&self, odd: bool) -> bool {
        match self.parity() {
            Parity::Zero => true,
            Parity::Even => !odd,
            Parity::Odd => odd,
            Parity::Mixed => false,
        }
    }

    /// Negates every odd-cardinality monomial; this is the grade involution
    /// picked up when an element moves past a single odd quantity.
    pub fn negate_odd_terms(&self) -> Self {
        GrassmannElement {
            n_generators: self.n_generators,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    if m.count_ones() % 2 == 1 {
                        (*m, -c)
                    } else {
                        (*m, c.clone())
                    }
                })
                .collect(),
        }
    }

    /// The body map: the pure-number part, i.e. the coefficient of the empty
    /// generator subset.
    pub fn body(&self) -> BigRational {
        self.coefficient(0)
    }

    /// The nilpotent remainder `a - body(a)`.
    pub fn soul(&self) -> Self {
        GrassmannElement {
            n_generators: self.n_generators,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| **m != 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Smallest `k >= 1` with `a^k = 0`, or `None` when the body is nonzero
    /// (such elements are never nilpotent). Terminates at `k <= N + 1` for
    /// bodyless elements.
    pub fn nilpotency_index(&self) -> Option<u32> {
        if !self.body().is_zero() {
            return None;
        }
        let mut power = self.clone();
        let mut k = 1;
        while !power.is_zero() {
            power = power.mul(self).expect("same algebra");
            k += 1;
        }
        Some(k)
    }

    /// Exact inverse via the finite geometric series in the nilpotent soul.
    pub fn invert(&self) -> Result<Self, GrassmannError> {
        let body = self.body();
        if body.is_zero() {
            return Err(GrassmannError::NotInvertible);
        }
        // a = body (1 + s/body); (1 + u)^-1 = sum (-u)^k, u nilpotent.
        let unit = self.scale(&body.recip());
        let u = unit.soul();
        let mut sum = Self::one(self.n_generators);
        let mut power = Self::one(self.n_generators);
        loop {
            power = power.mul(&u.neg()).expect("same algebra");
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power).expect("same algebra");
        }
        Ok(sum.scale(&body.recip()))
    }
}

fn render_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn render_monomial(mask: Mask, coeff: &BigRational) -> String {
    let gens: Vec<String> = (0..32)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| format!("g{}", i + 1))
        .collect();
    if gens.is_empty() {
        render_rational(coeff)
    } else if coeff.is_one() {
        gens.join("*")
    } else {
        format!("{}*{}", render_rational(coeff), gens.join("*"))
    }
}

impl fmt::Display for GrassmannElement {
    /// Canonical rendering: terms sorted by subset cardinality then mask,
    /// coefficients as `p/q`, generators as `g1..gN`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<Mask> = self.terms.keys().copied().collect();
        keys.sort_by_key(|m| (m.count_ones(), *m));
        for (i, mask) in keys.iter().enumerate() {
            let coeff = &self.terms[mask];
            if i == 0 {
                if coeff.is_negative() {
                    write!(f, "-{}", render_monomial(*mask, &-coeff))?;
                } else {
                    write!(f, "{}", render_monomial(*mask, coeff))?;
                }
            } else if coeff.is_negative() {
                write!(f, " - {}", render_monomial(*mask, &-coeff))?;
            } else {
                write!(f, " + {}", render_monomial(*mask, coeff))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ[{}]({})", self.n_generators, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32, i: u32) -> GrassmannElement {
        GrassmannElement::generator(n, i).unwrap()
    }

    fn int(n: u32, v: i64) -> GrassmannElement {
        GrassmannElement::from_integer(n, v)
    }

    #[test]
    fn additive_inverse() {
        let g1 = g(2, 1);
        assert!(g1.add(&g1.neg()).unwrap().is_zero());
    }

    #[test]
    fn coefficient_merge() {
        let n = 2;
        let g1g2 = g(n, 1).mul(&g(n, 2)).unwrap();
        let a = int(n, 1).add(&g1g2).unwrap();
        let sum = a.add(&g1g2).unwrap();
        let expected = int(n, 1)
            .add(&g1g2.scale(&BigRational::from(BigInt::from(2))))
            .unwrap();
        assert_eq!(sum, expected);
    }

    #[test]
    fn add_cancels_body() {
        let n = 1;
        let a = int(n, 3).add(&g(n, 1)).unwrap();
        assert_eq!(a.add(&int(n, -3)).unwrap(), g(n, 1));
    }

    #[test]
    fn generator_nilpotency() {
        let g1 = g(2, 1);
        assert!(g1.mul(&g1).unwrap().is_zero());
    }

    #[test]
    fn anticommutation() {
        let n = 2;
        let ab = g(n, 1).mul(&g(n, 2)).unwrap();
        let ba = g(n, 2).mul(&g(n, 1)).unwrap();
        assert_eq!(ba, ab.neg());
    }

    #[test]
    fn even_nilpotent_square_vanishes() {
        let n = 2;
        let g1g2 = g(n, 1).mul(&g(n, 2)).unwrap();
        let a = int(n, 1).add(&g1g2).unwrap();
        let b = int(n, 1).sub(&g1g2).unwrap();
        assert_eq!(a.mul(&b).unwrap(), int(n, 1));
    }

    #[test]
    fn parity_classification() {
        let n = 2;
        assert_eq!(g(n, 1).parity(), Parity::Odd);
        assert_eq!(g(n, 1).mul(&g(n, 2)).unwrap().parity(), Parity::Even);
        assert_eq!(int(n, 1).add(&g(n, 1)).unwrap().parity(), Parity::Mixed);
        assert_eq!(GrassmannElement::zero(n).parity(), Parity::Zero);
    }

    #[test]
    fn body_and_soul() {
        let n = 2;
        let g1g2 = g(n, 1).mul(&g(n, 2)).unwrap();
        let a = int(n, 3).add(&g1g2.scale(&BigRational::from(BigInt::from(2)))).unwrap();
        assert_eq!(a.body(), BigRational::from(BigInt::from(3)));
        assert_eq!(a.soul(), g1g2.scale(&BigRational::from(BigInt::from(2))));
        assert_eq!(g(n, 1).body(), BigRational::zero());
        assert_eq!(a.soul().add(&int(n, 3)).unwrap(), a);
    }

    #[test]
    fn nilpotency_indices() {
        let n = 4;
        assert_eq!(g(n, 1).nilpotency_index(), Some(2));
        // (g1g2 + g3g4)^2 = 2 g1g2g3g4 != 0, cube is 0.
        let a = g(n, 1)
            .mul(&g(n, 2))
            .unwrap()
            .add(&g(n, 3).mul(&g(n, 4)).unwrap())
            .unwrap();
        assert_eq!(a.nilpotency_index(), Some(3));
        assert_eq!(int(n, 1).add(&g(n, 1)).unwrap().nilpotency_index(), None);
    }

    #[test]
    fn inversion() {
        let n = 2;
        let two = int(n, 2);
        assert_eq!(
            two.invert().unwrap(),
            GrassmannElement::from_rational(n, BigRational::new(BigInt::from(1), BigInt::from(2)))
        );
        let g1g2 = g(n, 1).mul(&g(n, 2)).unwrap();
        let a = int(n, 1).add(&g1g2).unwrap();
        let inv = a.invert().unwrap();
        assert_eq!(inv, int(n, 1).sub(&g1g2).unwrap());
        assert_eq!(a.mul(&inv).unwrap(), int(n, 1));
        assert_eq!(g1g2.invert(), Err(GrassmannError::NotInvertible));
    }

    #[test]
    fn rendering() {
        let n = 3;
        let g1g2 = g(n, 1).mul(&g(n, 2)).unwrap();
        let e = int(n, 3)
            .add(&g1g2.scale(&BigRational::from(BigInt::from(2))))
            .unwrap()
            .sub(&g(n, 3).scale(&BigRational::new(BigInt::from(1), BigInt::from(2))))
            .unwrap();
        assert_eq!(e.to_string(), "3 - 1/2*g3 + 2*g1*g2");
        assert_eq!(GrassmannElement::zero(n).to_string(), "0");
        assert_eq!(g(n, 1).neg().to_string(), "-g1");
    }

    #[test]
    fn mismatched_algebras_error() {
        let a = g(2, 1);
        let b = g(3, 1);
        assert!(matches!(a.add(&b), Err(GrassmannError::AlgebraMismatch { .. })));
        assert!(matches!(a.mul(&b), Err(GrassmannError::AlgebraMismatch { .. })));
    }
}
