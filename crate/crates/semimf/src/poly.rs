//! Polynomials in even variables `x1..xn` and odd variables `t1..tm` with
//! Grassmann coefficients.
//!
//! A term is kept as `coeff * x^e * t_o` with the Grassmann coefficient on the
//! left of the odd-variable monomial; odd variables appear square-free and in
//! ascending order. All sign bookkeeping (odd variables anticommute among
//! themselves and with odd coefficient monomials) happens during
//! multiplication and differentiation, so stored data is always canonical.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, One, Signed, Zero};

use crate::grassmann::{reorder_sign, GrassmannElement, GrassmannError, Mask, Parity};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error(transparent)]
    Algebra(#[from] GrassmannError),
    #[error("variable context mismatch: ({0}|{1}) vs ({2}|{3})")]
    ContextMismatch(u32, u32, u32, u32),
    #[error("even variable index {index} out of range 1..={n}")]
    EvenVarOutOfRange { index: u32, n: u32 },
    #[error("odd variable index {index} out of range 1..={n}")]
    OddVarOutOfRange { index: u32, n: u32 },
    #[error("substitution arity mismatch: expected {expected} maps for {kind} variables, got {got}")]
    SubstitutionArity {
        kind: &'static str,
        expected: u32,
        got: u32,
    },
    #[error("substitution for {kind} variable {index} has wrong parity")]
    SubstitutionParity { kind: &'static str, index: u32 },
    #[error("evaluation did not reduce to a constant")]
    NotConstant,
}

/// Monomial in the commuting/anticommuting variables (without coefficient).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarMonomial {
    /// One exponent per even variable.
    pub even_exps: Vec<u32>,
    /// Bit `j` set means `t(j+1)` present.
    pub odd_mask: Mask,
}

impl VarMonomial {
    pub fn unit(n_even: u32) -> Self {
        VarMonomial {
            even_exps: vec![0; n_even as usize],
            odd_mask: 0,
        }
    }

    pub fn degree(&self) -> u32 {
        self.even_exps.iter().sum::<u32>() + self.odd_mask.count_ones()
    }

    pub fn is_unit(&self) -> bool {
        self.odd_mask == 0 && self.even_exps.iter().all(|e| *e == 0)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SuperPolynomial {
    n_generators: u32,
    n_even_vars: u32,
    n_odd_vars: u32,
    terms: BTreeMap<VarMonomial, GrassmannElement>,
}

impl SuperPolynomial {
    pub fn zero(n_generators: u32, n_even_vars: u32, n_odd_vars: u32) -> Self {
        SuperPolynomial {
            n_generators,
            n_even_vars,
            n_odd_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_even_vars: u32, n_odd_vars: u32, value: GrassmannElement) -> Self {
        let mut p = Self::zero(value.n_generators(), n_even_vars, n_odd_vars);
        if !value.is_zero() {
            p.terms.insert(VarMonomial::unit(n_even_vars), value);
        }
        p
    }

    pub fn even_var(
        n_generators: u32,
        n_even_vars: u32,
        n_odd_vars: u32,
        index: u32,
    ) -> Result<Self, PolyError> {
        if index == 0 || index > n_even_vars {
            return Err(PolyError::EvenVarOutOfRange {
                index,
                n: n_even_vars,
            });
        }
        let mut vm = VarMonomial::unit(n_even_vars);
        vm.even_exps[(index - 1) as usize] = 1;
        let mut p = Self::zero(n_generators, n_even_vars, n_odd_vars);
        p.terms.insert(vm, GrassmannElement::one(n_generators));
        Ok(p)
    }

    pub fn odd_var(
        n_generators: u32,
        n_even_vars: u32,
        n_odd_vars: u32,
        index: u32,
    ) -> Result<Self, PolyError> {
        if index == 0 || index > n_odd_vars {
            return Err(PolyError::OddVarOutOfRange {
                index,
                n: n_odd_vars,
            });
        }
        let mut vm = VarMonomial::unit(n_even_vars);
        vm.odd_mask = 1 << (index - 1);
        let mut p = Self::zero(n_generators, n_even_vars, n_odd_vars);
        p.terms.insert(vm, GrassmannElement::one(n_generators));
        Ok(p)
    }

    pub fn monomial(
        n_even_vars: u32,
        n_odd_vars: u32,
        vm: VarMonomial,
        coeff: GrassmannElement,
    ) -> Result<Self, PolyError> {
        if vm.even_exps.len() != n_even_vars as usize {
            return Err(PolyError::ContextMismatch(
                vm.even_exps.len() as u32,
                n_odd_vars,
                n_even_vars,
                n_odd_vars,
            ));
        }
        if n_odd_vars < 32 && vm.odd_mask >= (1 << n_odd_vars) {
            return Err(PolyError::OddVarOutOfRange {
                index: 32 - vm.odd_mask.leading_zeros(),
                n: n_odd_vars,
            });
        }
        let mut p = Self::zero(coeff.n_generators(), n_even_vars, n_odd_vars);
        if !coeff.is_zero() {
            p.terms.insert(vm, coeff);
        }
        Ok(p)
    }

    pub fn n_generators(&self) -> u32 {
        self.n_generators
    }

    pub fn n_even_vars(&self) -> u32 {
        self.n_even_vars
    }

    pub fn n_odd_vars(&self) -> u32 {
        self.n_odd_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VarMonomial, &GrassmannElement)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, vm: &VarMonomial) -> GrassmannElement {
        self.terms
            .get(vm)
            .cloned()
            .unwrap_or_else(|| GrassmannElement::zero(self.n_generators))
    }

    pub fn constant_term(&self) -> GrassmannElement {
        self.coefficient(&VarMonomial::unit(self.n_even_vars))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|vm| vm.degree()).max().unwrap_or(0)
    }

    fn same_context(&self, other: &Self) -> Result<(), PolyError> {
        if self.n_generators != other.n_generators {
            return Err(GrassmannError::AlgebraMismatch {
                left: self.n_generators,
                right: other.n_generators,
            }
            .into());
        }
        if self.n_even_vars != other.n_even_vars || self.n_odd_vars != other.n_odd_vars {
            return Err(PolyError::ContextMismatch(
                self.n_even_vars,
                self.n_odd_vars,
                other.n_even_vars,
                other.n_odd_vars,
            ));
        }
        Ok(())
    }

    fn insert_term(&mut self, vm: VarMonomial, coeff: GrassmannElement) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(vm) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let merged = e.get().add(&coeff).expect("same algebra");
                if merged.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = merged;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_context(other)?;
        let mut out = self.clone();
        for (vm, coeff) in &other.terms {
            out.insert_term(vm.clone(), coeff.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        SuperPolynomial {
            n_generators: self.n_generators,
            n_even_vars: self.n_even_vars,
            n_odd_vars: self.n_odd_vars,
            terms: self.terms.iter().map(|(vm, c)| (vm.clone(), c.neg())).collect(),
        }
    }

    /// Left multiplication by a Grassmann constant.
    pub fn scale_left(&self, factor: &GrassmannElement) -> Result<Self, PolyError> {
        let c = Self::constant(self.n_even_vars, self.n_odd_vars, factor.clone());
        c.mul(self)
    }

    pub fn scale_rational(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.n_generators, self.n_even_vars, self.n_odd_vars);
        }
        SuperPolynomial {
            n_generators: self.n_generators,
            n_even_vars: self.n_even_vars,
            n_odd_vars: self.n_odd_vars,
            terms: self
                .terms
                .iter()
                .map(|(vm, c)| (vm.clone(), c.scale(factor)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_context(other)?;
        let mut out = Self::zero(self.n_generators, self.n_even_vars, self.n_odd_vars);
        for (vm1, c1) in &self.terms {
            for (vm2, c2) in &other.terms {
                if vm1.odd_mask & vm2.odd_mask != 0 {
                    continue;
                }
                // Move c2 left through t_{o1}: each odd monomial of c2 picks
                // up (-1)^{|o1|}.
                let c2_adj = if vm1.odd_mask.count_ones() % 2 == 1 {
                    c2.negate_odd_terms()
                } else {
                    c2.clone()
                };
                let mut coeff = c1.mul(&c2_adj)?;
                if reorder_sign(vm1.odd_mask, vm2.odd_mask) < 0 {
                    coeff = coeff.neg();
                }
                let vm = VarMonomial {
                    even_exps: vm1
                        .even_exps
                        .iter()
                        .zip(&vm2.even_exps)
                        .map(|(a, b)| a + b)
                        .collect(),
                    odd_mask: vm1.odd_mask | vm2.odd_mask,
                };
                out.insert_term(vm, coeff);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> Result<Self, PolyError> {
        let mut acc = Self::constant(
            self.n_even_vars,
            self.n_odd_vars,
            GrassmannElement::one(self.n_generators),
        );
        for _ in 0..exp {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Total parity over terms: coefficient parity plus odd-variable count.
    pub fn total_parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for (vm, coeff) in &self.terms {
            let var_parity = vm.odd_mask.count_ones() % 2;
            for (mask, _) in coeff.terms() {
                if (mask.count_ones() + var_parity) % 2 == 0 {
                    even = true;
                } else {
                    odd = true;
                }
            }
        }
        match (even, odd) {
            (false, false) => Parity::Zero,
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    pub fn has_parity(&self, odd: bool) -> bool {
        match self.total_parity() {
            Parity::Zero => true,
            Parity::Even => !odd,
            Parity::Odd => odd,
            Parity::Mixed => false,
        }
    }

    /// Substitutes every variable by a polynomial over a common context.
    /// Even substitutes must be even, odd ones odd (parity-preserving
    /// substitution is a superalgebra homomorphism; anything else is
    /// rejected).
    pub fn substitute(
        &self,
        even_subs: &[SuperPolynomial],
        odd_subs: &[SuperPolynomial],
    ) -> Result<SuperPolynomial, PolyError> {
        if even_subs.len() != self.n_even_vars as usize {
            return Err(PolyError::SubstitutionArity {
                kind: "even",
                expected: self.n_even_vars,
                got: even_subs.len() as u32,
            });
        }
        if odd_subs.len() != self.n_odd_vars as usize {
            return Err(PolyError::SubstitutionArity {
                kind: "odd",
                expected: self.n_odd_vars,
                got: odd_subs.len() as u32,
            });
        }
        let (te, to) = match even_subs.first().or_else(|| odd_subs.first()) {
            Some(p) => (p.n_even_vars, p.n_odd_vars),
            None => (0, 0),
        };
        for (i, p) in even_subs.iter().enumerate() {
            if (p.n_even_vars, p.n_odd_vars) != (te, to) {
                return Err(PolyError::ContextMismatch(p.n_even_vars, p.n_odd_vars, te, to));
            }
            if !matches!(p.total_parity(), Parity::Even | Parity::Zero) {
                return Err(PolyError::SubstitutionParity {
                    kind: "even",
                    index: i as u32 + 1,
                });
            }
        }
        for (j, p) in odd_subs.iter().enumerate() {
            if (p.n_even_vars, p.n_odd_vars) != (te, to) {
                return Err(PolyError::ContextMismatch(p.n_even_vars, p.n_odd_vars, te, to));
            }
            if !matches!(p.total_parity(), Parity::Odd | Parity::Zero) {
                return Err(PolyError::SubstitutionParity {
                    kind: "odd",
                    index: j as u32 + 1,
                });
            }
        }
        let mut out = Self::zero(self.n_generators, te, to);
        for (vm, coeff) in &self.terms {
            let mut acc = Self::constant(te, to, coeff.clone());
            for (i, exp) in vm.even_exps.iter().enumerate() {
                if *exp > 0 {
                    acc = acc.mul(&even_subs[i].pow(*exp)?)?;
                }
            }
            for j in 0..32 {
                if vm.odd_mask & (1 << j) != 0 {
                    acc = acc.mul(&odd_subs[j as usize])?;
                }
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// Evaluates at a point: rational even coordinates, Grassmann odd ones.
    pub fn evaluate(
        &self,
        even_values: &[BigRational],
        odd_values: &[GrassmannElement],
    ) -> Result<GrassmannElement, PolyError> {
        let even_subs: Vec<SuperPolynomial> = even_values
            .iter()
            .map(|v| {
                Self::constant(0, 0, GrassmannElement::from_rational(self.n_generators, v.clone()))
            })
            .collect();
        let odd_subs: Vec<SuperPolynomial> = odd_values
            .iter()
            .map(|v| Self::constant(0, 0, v.clone()))
            .collect();
        let evaluated = self.substitute(&even_subs, &odd_subs)?;
        for vm in evaluated.terms.keys() {
            if !vm.is_unit() {
                return Err(PolyError::NotConstant);
            }
        }
        Ok(evaluated.constant_term())
    }

    /// Formal partial derivative with respect to even variable `x(index)`.
    pub fn partial_even(&self, index: u32) -> Result<Self, PolyError> {
        if index == 0 || index > self.n_even_vars {
            return Err(PolyError::EvenVarOutOfRange {
                index,
                n: self.n_even_vars,
            });
        }
        let i = (index - 1) as usize;
        let mut out = Self::zero(self.n_generators, self.n_even_vars, self.n_odd_vars);
        for (vm, coeff) in &self.terms {
            let exp = vm.even_exps[i];
            if exp == 0 {
                continue;
            }
            let mut new_vm = vm.clone();
            new_vm.even_exps[i] = exp - 1;
            out.insert_term(
                new_vm,
                coeff.scale(&BigRational::from(num::BigInt::from(exp as i64))),
            );
        }
        Ok(out)
    }

    /// Left derivative with respect to odd variable `t(index)`: the sign
    /// accounts for everything to the left of `t(index)` in the canonical
    /// term `coeff * x^e * t_o`, so d/dt_j (t_i t_j) = -t_i for i < j.
    pub fn partial_odd(&self, index: u32) -> Result<Self, PolyError> {
        if index == 0 || index > self.n_odd_vars {
            return Err(PolyError::OddVarOutOfRange {
                index,
                n: self.n_odd_vars,
            });
        }
        let bit = 1u32 << (index - 1);
        let below = bit - 1;
        let mut out = Self::zero(self.n_generators, self.n_even_vars, self.n_odd_vars);
        for (vm, coeff) in &self.terms {
            if vm.odd_mask & bit == 0 {
                continue;
            }
            // Pass the derivative through the coefficient (odd monomials of
            // the coefficient flip sign) and through the odd variables
            // preceding t(index).
            let mut d = coeff.negate_odd_terms();
            if (vm.odd_mask & below).count_ones() % 2 == 1 {
                d = d.neg();
            }
            let mut new_vm = vm.clone();
            new_vm.odd_mask &= !bit;
            out.insert_term(new_vm, d);
        }
        Ok(out)
    }

    /// Reinterprets the polynomial over a larger context with extra even and
    /// odd variables appended; existing terms are unchanged.
    pub fn pad_context(&self, n_even_vars: u32, n_odd_vars: u32) -> Result<Self, PolyError> {
        if n_even_vars < self.n_even_vars || n_odd_vars < self.n_odd_vars {
            return Err(PolyError::ContextMismatch(
                self.n_even_vars,
                self.n_odd_vars,
                n_even_vars,
                n_odd_vars,
            ));
        }
        let mut out = Self::zero(self.n_generators, n_even_vars, n_odd_vars);
        for (vm, coeff) in &self.terms {
            let mut exps = vm.even_exps.clone();
            exps.resize(n_even_vars as usize, 0);
            out.insert_term(
                VarMonomial {
                    even_exps: exps,
                    odd_mask: vm.odd_mask,
                },
                coeff.clone(),
            );
        }
        Ok(out)
    }
}

fn render_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn render_vars(vm: &VarMonomial) -> Vec<String> {
    let mut parts = Vec::new();
    for (i, exp) in vm.even_exps.iter().enumerate() {
        match exp {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}^{}", i + 1, exp)),
        }
    }
    for j in 0..32 {
        if vm.odd_mask & (1 << j) != 0 {
            parts.push(format!("t{}", j + 1));
        }
    }
    parts
}

/// Flat rendered term: sign and body text without the sign.
fn rendered_terms(p: &SuperPolynomial) -> Vec<(bool, String)> {
    let mut items = Vec::new();
    let mut ordered: Vec<(&VarMonomial, &GrassmannElement)> = p.terms().collect();
    ordered.sort_by_key(|(vm, _)| {
        (
            vm.odd_mask.count_ones(),
            vm.odd_mask,
            vm.even_exps.clone(),
        )
    });
    for (vm, coeff) in ordered {
        let vars = render_vars(vm);
        let masks: Vec<(Mask, &BigRational)> = {
            let mut v: Vec<(Mask, &BigRational)> = coeff.terms().collect();
            v.sort_by_key(|(m, _)| (m.count_ones(), *m));
            v
        };
        if vars.is_empty() || masks.len() == 1 {
            // Inline each Grassmann monomial as its own term.
            for (mask, q) in masks {
                let negative = q.is_negative();
                let abs = if negative { -q } else { q.clone() };
                let mut parts = Vec::new();
                if !abs.is_one() || (mask == 0 && vars.is_empty()) {
                    parts.push(render_rational(&abs));
                }
                for i in 0..32 {
                    if mask & (1 << i) != 0 {
                        parts.push(format!("g{}", i + 1));
                    }
                }
                parts.extend(vars.iter().cloned());
                if parts.is_empty() {
                    parts.push("1".to_string());
                }
                items.push((negative, parts.join("*")));
            }
        } else {
            let mut parts = vec![format!("({})", coeff)];
            parts.extend(vars.iter().cloned());
            items.push((false, parts.join("*")));
        }
    }
    items
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items = rendered_terms(self);
        if items.is_empty() {
            return write!(f, "0");
        }
        for (i, (negative, body)) in items.iter().enumerate() {
            if i == 0 {
                if *negative {
                    write!(f, "-{}", body)?;
                } else {
                    write!(f, "{}", body)?;
                }
            } else if *negative {
                write!(f, " - {}", body)?;
            } else {
                write!(f, " + {}", body)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Poly[{}|{};N={}]({})",
            self.n_even_vars, self.n_odd_vars, self.n_generators, self
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u32 = 3;

    fn x(i: u32) -> SuperPolynomial {
        SuperPolynomial::even_var(N, 2, 2, i).unwrap()
    }

    fn t(j: u32) -> SuperPolynomial {
        SuperPolynomial::odd_var(N, 2, 2, j).unwrap()
    }

    fn g(i: u32) -> GrassmannElement {
        GrassmannElement::generator(N, i).unwrap()
    }

    fn konst(e: GrassmannElement) -> SuperPolynomial {
        SuperPolynomial::constant(2, 2, e)
    }

    #[test]
    fn odd_vars_anticommute() {
        let t1t2 = t(1).mul(&t(2)).unwrap();
        let t2t1 = t(2).mul(&t(1)).unwrap();
        assert_eq!(t2t1, t1t2.neg());
        assert!(t(1).mul(&t(1)).unwrap().is_zero());
    }

    #[test]
    fn odd_coefficient_passes_through_odd_var() {
        // t1 * g1 = -g1 * t1 in canonical form.
        let lhs = t(1).mul(&konst(g(1))).unwrap();
        let rhs = konst(g(1)).mul(&t(1)).unwrap().neg();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn left_derivative_signs() {
        let t1t2 = t(1).mul(&t(2)).unwrap();
        assert_eq!(t1t2.partial_odd(1).unwrap(), t(2));
        assert_eq!(t1t2.partial_odd(2).unwrap(), t(1).neg());
    }

    #[test]
    fn derivative_through_odd_coefficient() {
        // d/dt1 (g1 * t1) = -g1 since g1 t1 = -t1 g1.
        let p = konst(g(1)).mul(&t(1)).unwrap();
        assert_eq!(p.partial_odd(1).unwrap(), konst(g(1)).neg());
    }

    #[test]
    fn even_derivative() {
        let p = x(1).pow(3).unwrap();
        let expected = x(1).pow(2).unwrap().scale_rational(&BigRational::from(num::BigInt::from(3)));
        assert_eq!(p.partial_even(1).unwrap(), expected);
    }

    #[test]
    fn substitution_is_homomorphic() {
        // p = x1 * t1; substitute x1 -> x1 + x2, t1 -> g1 constant-free odd poly.
        let p = x(1).mul(&t(1)).unwrap();
        let subs_even = vec![x(1).add(&x(2)).unwrap(), x(2)];
        let subs_odd = vec![konst(g(1)), t(2)];
        let image = p.substitute(&subs_even, &subs_odd).unwrap();
        let expected = x(1).add(&x(2)).unwrap().mul(&konst(g(1))).unwrap();
        assert_eq!(image, expected);
    }

    #[test]
    fn substitution_rejects_parity_violation() {
        let p = t(1);
        let err = p
            .substitute(&[x(1), x(2)], &[x(1), t(2)])
            .unwrap_err();
        assert!(matches!(err, PolyError::SubstitutionParity { kind: "odd", index: 1 }));
    }

    #[test]
    fn nilpotent_coefficient_square_vanishes() {
        let c = konst(g(1).mul(&g(2)).unwrap());
        let p = c.mul(&t(1)).unwrap();
        assert!(p.mul(&p).unwrap().is_zero());
    }

    #[test]
    fn evaluate_at_point() {
        use num::BigInt;
        let p = x(1)
            .pow(2)
            .unwrap()
            .add(&konst(g(1)).mul(&t(1)).unwrap())
            .unwrap();
        let v = p
            .evaluate(
                &[BigRational::from(BigInt::from(3)), BigRational::zero()],
                &[g(2), GrassmannElement::zero(N)],
            )
            .unwrap();
        // 9 + g1*g2
        let expected = GrassmannElement::from_integer(N, 9)
            .add(&g(1).mul(&g(2)).unwrap())
            .unwrap();
        assert_eq!(v, expected);
    }

    #[test]
    fn display_roundtrippable_shape() {
        let p = x(1)
            .pow(2)
            .unwrap()
            .scale_rational(&BigRational::new(num::BigInt::from(1), num::BigInt::from(2)))
            .add(&konst(g(1)).mul(&t(1)).unwrap())
            .unwrap();
        assert_eq!(p.to_string(), "1/2*x1^2 + g1*t1");
    }
}
