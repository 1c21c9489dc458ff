//! Linear solving over the Grassmann algebra viewed as a rational vector
//! space of dimension `2^N`, and coefficient-wise solving of map equations
//! that are linear in one unknown map.
//!
//! Division by a nilpotent element never has a unique answer; every solver
//! here returns an affine family (particular solution plus kernel basis) and
//! never collapses it to a single value.

use std::collections::BTreeSet;

use num::{BigRational, One, Zero};

use crate::grassmann::{GrassmannElement, GrassmannError, Mask};
use crate::linalg::QMatrix;
use crate::poly::{PolyError, SuperPolynomial, VarMonomial};
use crate::supermap::{SuperDomainSignature, SuperMap, SuperMapError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Algebra(#[from] GrassmannError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Map(#[from] SuperMapError),
    #[error("equation is not linear in the unknown map's coefficients")]
    NonlinearUnknown,
}

/// Affine family of solutions of `a·x = b` in the Grassmann algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    pub particular: GrassmannElement,
    pub kernel_basis: Vec<GrassmannElement>,
}

/// Coordinates of an element in the `2^N`-dimensional monomial basis,
/// ordered by mask value.
pub fn element_to_vec(e: &GrassmannElement) -> Vec<BigRational> {
    let dim = 1usize << e.n_generators();
    let mut v = vec![BigRational::zero(); dim];
    for (mask, coeff) in e.terms() {
        v[mask as usize] = coeff.clone();
    }
    v
}

pub fn vec_to_element(n_generators: u32, v: &[BigRational]) -> GrassmannElement {
    let mut acc = GrassmannElement::zero(n_generators);
    for (mask, coeff) in v.iter().enumerate() {
        if !coeff.is_zero() {
            let mono = GrassmannElement::monomial(n_generators, mask as Mask, coeff.clone())
                .expect("mask within range");
            acc = acc.add(&mono).expect("same algebra");
        }
    }
    acc
}

/// The matrix of `x ↦ a·x` in the monomial basis; column `j` is the
/// coordinate vector of `a · g_j`.
pub fn mult_operator_matrix(a: &GrassmannElement) -> QMatrix {
    let n = a.n_generators();
    let dim = 1usize << n;
    let mut m = QMatrix::zeros(dim, dim);
    for j in 0..dim {
        let basis = GrassmannElement::monomial(n, j as Mask, BigRational::one())
            .expect("mask within range");
        let product = a.mul(&basis).expect("same algebra");
        for (mask, coeff) in product.terms() {
            m.set(mask as usize, j, coeff.clone());
        }
    }
    m
}

/// Basis of the annihilator `{ y : a·y = 0 }`, by exact elimination.
pub fn annihilator(a: &GrassmannElement) -> Vec<GrassmannElement> {
    mult_operator_matrix(a)
        .kernel_basis()
        .iter()
        .map(|v| vec_to_element(a.n_generators(), v))
        .collect()
}

/// Solves `a·x = b` exactly; `None` when `b` is outside the image of
/// multiplication by `a`. The particular solution is the deterministic one
/// with lexicographically first pivots and free coordinates zero.
pub fn solve_linear(
    a: &GrassmannElement,
    b: &GrassmannElement,
) -> Result<Option<SolutionSet>, SolverError> {
    if a.n_generators() != b.n_generators() {
        return Err(GrassmannError::AlgebraMismatch {
            left: a.n_generators(),
            right: b.n_generators(),
        }
        .into());
    }
    let m = mult_operator_matrix(a);
    let Some(x) = m.solve(&element_to_vec(b)) else {
        return Ok(None);
    };
    Ok(Some(SolutionSet {
        particular: vec_to_element(a.n_generators(), &x),
        kernel_basis: annihilator(a),
    }))
}

/// Shape of the unknown map in a map equation: its signature and the degree
/// bound of the polynomial ansatz for each component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapAnsatz {
    pub n_generators: u32,
    pub source: SuperDomainSignature,
    pub target: SuperDomainSignature,
    pub degree_bound: u32,
}

/// Default ansatz degree: the largest degree appearing in the given maps plus
/// the number of Grassmann generators (composition cannot push the odd degree
/// further, and the even growth is capped to keep the system finite).
pub fn default_degree_bound(maps: &[&SuperMap]) -> u32 {
    let max_deg = maps
        .iter()
        .flat_map(|m| m.components().iter().map(|c| c.degree()))
        .max()
        .unwrap_or(0);
    let n = maps.first().map(|m| m.n_generators()).unwrap_or(0);
    max_deg + n
}

/// Affine family of maps solving a map equation. Every member
/// `particular + Σ cᵢ · basisᵢ` (rational `cᵢ`, basis added component-wise)
/// solves the source equation.
#[derive(Debug, Clone)]
pub struct MapSolutionSet {
    pub particular: SuperMap,
    /// Component-wise displacements spanning the solution differences.
    pub kernel_basis: Vec<Vec<SuperPolynomial>>,
}

impl MapSolutionSet {
    /// The member with the given kernel coordinates.
    pub fn member(&self, coeffs: &[BigRational]) -> Result<SuperMap, SolverError> {
        assert_eq!(coeffs.len(), self.kernel_basis.len());
        let mut components = self.particular.components().to_vec();
        for (c, basis) in coeffs.iter().zip(&self.kernel_basis) {
            for (comp, delta) in components.iter_mut().zip(basis) {
                *comp = comp.add(&delta.scale_rational(c))?;
            }
        }
        Ok(SuperMap::new(
            self.particular.n_generators(),
            self.particular.source(),
            self.particular.target(),
            components,
        )?)
    }

    /// Whether the given map belongs to the affine family.
    pub fn contains(&self, candidate: &SuperMap) -> Result<bool, SolverError> {
        if candidate.source() != self.particular.source()
            || candidate.target() != self.particular.target()
        {
            return Ok(false);
        }
        let diff: Vec<SuperPolynomial> = candidate
            .components()
            .iter()
            .zip(self.particular.components())
            .map(|(c, p)| c.sub(p))
            .collect::<Result<_, _>>()?;
        let mut lists: Vec<&[SuperPolynomial]> = vec![&diff];
        for b in &self.kernel_basis {
            lists.push(b);
        }
        let keys = collect_keys(&lists);
        let target = vectorize(&diff, &keys);
        let mut m = QMatrix::zeros(keys.len(), self.kernel_basis.len());
        for (col, basis) in self.kernel_basis.iter().enumerate() {
            for (row, v) in vectorize(basis, &keys).into_iter().enumerate() {
                m.set(row, col, v);
            }
        }
        Ok(m.solve(&target).is_some())
    }
}

type PKey = (usize, VarMonomial, Mask);

fn collect_keys(lists: &[&[SuperPolynomial]]) -> Vec<PKey> {
    let mut keys = BTreeSet::new();
    for list in lists {
        for (i, poly) in list.iter().enumerate() {
            for (vm, coeff) in poly.terms() {
                for (mask, _) in coeff.terms() {
                    keys.insert((i, vm.clone(), mask));
                }
            }
        }
    }
    keys.into_iter().collect()
}

fn vectorize(list: &[SuperPolynomial], keys: &[PKey]) -> Vec<BigRational> {
    keys.iter()
        .map(|(i, vm, mask)| list[*i].coefficient(vm).coefficient(*mask))
        .collect()
}

#[derive(Debug, Clone)]
struct Unknown {
    comp: usize,
    vm: VarMonomial,
    gmask: Mask,
}

fn enumerate_var_monomials(sig: SuperDomainSignature, degree_bound: u32) -> Vec<VarMonomial> {
    let mut out = Vec::new();
    let odd_masks = 1u32 << sig.n_odd;
    for odd_mask in 0..odd_masks {
        let odd_deg = odd_mask.count_ones();
        if odd_deg > degree_bound {
            continue;
        }
        let remaining = degree_bound - odd_deg;
        let mut exps = vec![0u32; sig.n_even as usize];
        push_exps(&mut out, &mut exps, 0, remaining, odd_mask);
    }
    out.sort();
    out
}

fn push_exps(out: &mut Vec<VarMonomial>, exps: &mut Vec<u32>, pos: usize, budget: u32, odd_mask: Mask) {
    if pos == exps.len() {
        out.push(VarMonomial {
            even_exps: exps.clone(),
            odd_mask,
        });
        return;
    }
    for e in 0..=budget {
        exps[pos] = e;
        push_exps(out, exps, pos + 1, budget - e, odd_mask);
    }
    exps[pos] = 0;
}

fn enumerate_unknowns(ansatz: &MapAnsatz) -> Vec<Unknown> {
    let monomials = enumerate_var_monomials(ansatz.source, ansatz.degree_bound);
    let gmasks = 1u32 << ansatz.n_generators;
    let mut unknowns = Vec::new();
    for comp in 0..ansatz.target.total() as usize {
        let comp_odd = comp >= ansatz.target.n_even as usize;
        for vm in &monomials {
            for gmask in 0..gmasks {
                let parity = (gmask.count_ones() + vm.odd_mask.count_ones()) % 2;
                if (parity == 1) == comp_odd {
                    unknowns.push(Unknown {
                        comp,
                        vm: vm.clone(),
                        gmask,
                    });
                }
            }
        }
    }
    unknowns
}

fn map_from_coeffs(
    ansatz: &MapAnsatz,
    unknowns: &[Unknown],
    coeffs: &[BigRational],
) -> Result<SuperMap, SolverError> {
    let mut components = vec![
        SuperPolynomial::zero(ansatz.n_generators, ansatz.source.n_even, ansatz.source.n_odd);
        ansatz.target.total() as usize
    ];
    for (u, c) in unknowns.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        let coeff = GrassmannElement::monomial(ansatz.n_generators, u.gmask, c.clone())?;
        let mono = SuperPolynomial::monomial(
            ansatz.source.n_even,
            ansatz.source.n_odd,
            u.vm.clone(),
            coeff,
        )?;
        components[u.comp] = components[u.comp].add(&mono)?;
    }
    Ok(SuperMap::new(
        ansatz.n_generators,
        ansatz.source,
        ansatz.target,
        components,
    )?)
}

/// Solves a map equation `lhs(Φ) = rhs` that is linear (affine) in the
/// coefficients of the unknown map `Φ`, by probing a polynomial ansatz of the
/// given shape. Returns the full affine solution family within the ansatz, or
/// `None` when no solution exists in it.
///
/// Linearity is verified by an exact superposition probe; equations where the
/// unknown's coefficients appear nonlinearly are rejected with
/// `NonlinearUnknown`.
pub fn solve_map_ansatz<F>(
    ansatz: &MapAnsatz,
    lhs: F,
    rhs: &[SuperPolynomial],
) -> Result<Option<MapSolutionSet>, SolverError>
where
    F: Fn(&SuperMap) -> Result<Vec<SuperPolynomial>, SuperMapError>,
{
    let unknowns = enumerate_unknowns(ansatz);
    let zero_coeffs = vec![BigRational::zero(); unknowns.len()];
    let zero_map = map_from_coeffs(ansatz, &unknowns, &zero_coeffs)?;
    let base = lhs(&zero_map)?;

    // offset = lhs(0) - rhs.
    let offset: Vec<SuperPolynomial> = base
        .iter()
        .zip(rhs)
        .map(|(l, r)| l.sub(r))
        .collect::<Result<_, _>>()?;

    // One column per unknown: lhs(e_u) - lhs(0).
    let mut columns: Vec<Vec<SuperPolynomial>> = Vec::with_capacity(unknowns.len());
    for u in 0..unknowns.len() {
        let mut coeffs = zero_coeffs.clone();
        coeffs[u] = BigRational::one();
        let probe = map_from_coeffs(ansatz, &unknowns, &coeffs)?;
        let image = lhs(&probe)?;
        columns.push(
            image
                .iter()
                .zip(&base)
                .map(|(l, b)| l.sub(b))
                .collect::<Result<_, _>>()?,
        );
    }

    // Superposition probe with distinct coefficients: catches any
    // nonlinearity in the unknown's coefficients.
    {
        let coeffs: Vec<BigRational> = (0..unknowns.len())
            .map(|u| BigRational::from(num::BigInt::from(u as i64 + 1)))
            .collect();
        let probe = map_from_coeffs(ansatz, &unknowns, &coeffs)?;
        let image = lhs(&probe)?;
        for (i, b) in base.iter().enumerate() {
            let mut expected = b.clone();
            for (u, col) in columns.iter().enumerate() {
                expected = expected.add(&col[i].scale_rational(&coeffs[u]))?;
            }
            if image[i] != expected {
                return Err(SolverError::NonlinearUnknown);
            }
        }
    }

    let mut lists: Vec<&[SuperPolynomial]> = vec![&offset];
    for col in &columns {
        lists.push(col);
    }
    let keys = collect_keys(&lists);
    let mut m = QMatrix::zeros(keys.len(), unknowns.len());
    for (col, column) in columns.iter().enumerate() {
        for (row, v) in vectorize(column, &keys).into_iter().enumerate() {
            m.set(row, col, v);
        }
    }
    let b: Vec<BigRational> = vectorize(&offset, &keys).iter().map(|v| -v).collect();
    let Some(x) = m.solve(&b) else {
        return Ok(None);
    };
    let particular = map_from_coeffs(ansatz, &unknowns, &x)?;
    debug_assert_eq!(lhs(&particular)?, rhs.to_vec());
    let kernel_basis = m
        .kernel_basis()
        .into_iter()
        .map(|v| {
            map_from_coeffs(ansatz, &unknowns, &v).map(|map| map.components().to_vec())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(MapSolutionSet {
        particular,
        kernel_basis,
    }))
}

/// Attempts to invert a supermap within a polynomial degree bound: solves
/// `Ψ ∘ f = id` for `Ψ` and keeps the result only when it is the unique
/// two-sided inverse. Returns `None` when `f` has no polynomial inverse of
/// degree at most `degree_bound`.
pub fn try_invert(f: &SuperMap, degree_bound: u32) -> Result<Option<SuperMap>, SolverError> {
    let ansatz = MapAnsatz {
        n_generators: f.n_generators(),
        source: f.target(),
        target: f.source(),
        degree_bound,
    };
    let id_source = SuperMap::identity(f.n_generators(), f.source());
    let rhs = id_source.components().to_vec();
    let sol = solve_map_ansatz(
        &ansatz,
        |psi| Ok(SuperMap::compose(psi, f)?.components().to_vec()),
        &rhs,
    )?;
    let Some(sol) = sol else {
        return Ok(None);
    };
    // A two-sided inverse forces the left inverse to be unique.
    if !sol.kernel_basis.is_empty() {
        return Ok(None);
    }
    let id_target = SuperMap::identity(f.n_generators(), f.target());
    let round = SuperMap::compose(f, &sol.particular)?;
    if SuperMap::map_equal(&round, &id_target)? {
        Ok(Some(sol.particular))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn g(n: u32, i: u32) -> GrassmannElement {
        GrassmannElement::generator(n, i).unwrap()
    }

    fn q(v: i64) -> BigRational {
        BigRational::from(BigInt::from(v))
    }

    #[test]
    fn mult_matrix_of_one_and_zero() {
        let n = 2;
        assert_eq!(
            mult_operator_matrix(&GrassmannElement::one(n)),
            QMatrix::identity(4)
        );
        assert_eq!(
            mult_operator_matrix(&GrassmannElement::zero(n)),
            QMatrix::zeros(4, 4)
        );
    }

    #[test]
    fn mult_matrix_of_generator() {
        // g1 sends (1, g1, g2, g1g2) to (g1, 0, g1g2, 0).
        let n = 2;
        let m = mult_operator_matrix(&g(n, 1));
        let images: Vec<Vec<BigRational>> = (0..4).map(|j| m.column(j)).collect();
        let unit = |mask: usize| {
            let mut v = vec![BigRational::zero(); 4];
            v[mask] = BigRational::one();
            v
        };
        assert_eq!(images[0], unit(1));
        assert_eq!(images[1], vec![BigRational::zero(); 4]);
        assert_eq!(images[2], unit(3));
        assert_eq!(images[3], vec![BigRational::zero(); 4]);
    }

    #[test]
    fn annihilator_examples() {
        let n = 3;
        assert!(annihilator(&GrassmannElement::one(n)).is_empty());
        assert_eq!(annihilator(&GrassmannElement::zero(n)).len(), 8);
        let ann = annihilator(&g(n, 1));
        let expected: Vec<GrassmannElement> = [0b001u32, 0b011, 0b101, 0b111]
            .iter()
            .map(|m| GrassmannElement::monomial(n, *m, BigRational::one()).unwrap())
            .collect();
        assert_eq!(ann, expected);
    }

    #[test]
    fn solve_division_by_generator() {
        // g1 * x = 2*g1g2g3 -> x = 2*g2g3 + Ann(g1).
        let n = 3;
        let b = GrassmannElement::monomial(n, 0b111, q(2)).unwrap();
        let sol = solve_linear(&g(n, 1), &b).unwrap().unwrap();
        let expected = GrassmannElement::monomial(n, 0b110, q(2)).unwrap();
        assert_eq!(sol.particular, expected);
        assert_eq!(sol.kernel_basis, annihilator(&g(n, 1)));
        // Every member solves the equation.
        for k in &sol.kernel_basis {
            let member = sol.particular.add(k).unwrap();
            assert_eq!(g(n, 1).mul(&member).unwrap(), b);
        }
    }

    #[test]
    fn solve_by_unit_is_unique() {
        let n = 2;
        let c = GrassmannElement::from_integer(n, 5)
            .add(&g(n, 1))
            .unwrap();
        let sol = solve_linear(&GrassmannElement::one(n), &c).unwrap().unwrap();
        assert_eq!(sol.particular, c);
        assert!(sol.kernel_basis.is_empty());
    }

    #[test]
    fn unsolvable_division() {
        let n = 3;
        assert_eq!(
            solve_linear(&g(n, 1), &GrassmannElement::one(n)).unwrap(),
            None
        );
    }

    #[test]
    fn nilpotent_rhs_needed() {
        // If a is nilpotent and ax = b solvable, then b is nilpotent.
        let n = 3;
        let a = g(n, 1).add(&g(n, 2).mul(&g(n, 3)).unwrap()).unwrap();
        assert!(a.nilpotency_index().is_some());
        let x = GrassmannElement::from_integer(n, 2).add(&g(n, 2)).unwrap();
        let b = a.mul(&x).unwrap();
        assert!(b.nilpotency_index().is_some());
        assert!(solve_linear(&a, &b).unwrap().is_some());
    }

    fn sig(n: u32, m: u32) -> SuperDomainSignature {
        SuperDomainSignature::new(n, m)
    }

    #[test]
    fn map_ansatz_recovers_composition_factor() {
        // phi_beta invertible: Phi o phi_beta = phi_alpha has the unique
        // solution phi_alpha o phi_beta^{-1}.
        let n = 2;
        let s = sig(1, 1);
        let x1 = SuperPolynomial::even_var(n, 1, 1, 1).unwrap();
        let t1 = SuperPolynomial::odd_var(n, 1, 1, 1).unwrap();
        let phi_beta =
            SuperMap::new(n, s, s, vec![x1.scale_rational(&q(2)), t1.clone()]).unwrap();
        let phi_alpha = SuperMap::new(
            n,
            s,
            s,
            vec![x1.clone(), t1.scale_rational(&q(3))],
        )
        .unwrap();
        let ansatz = MapAnsatz {
            n_generators: n,
            source: s,
            target: s,
            degree_bound: 2,
        };
        let sol = solve_map_ansatz(
            &ansatz,
            |phi| Ok(SuperMap::compose(phi, &phi_beta)?.components().to_vec()),
            phi_alpha.components(),
        )
        .unwrap()
        .unwrap();
        assert!(sol.kernel_basis.is_empty());
        let inv = try_invert(&phi_beta, 2).unwrap().unwrap();
        let expected = SuperMap::compose(&phi_alpha, &inv).unwrap();
        assert!(SuperMap::map_equal(&sol.particular, &expected).unwrap());
    }

    #[test]
    fn map_ansatz_nilpotent_transition() {
        // phi_alpha = (x, 0), phi_beta = (x, g1g2*t): the family solving
        // Phi o phi_beta = phi_alpha contains (x, 0) and has a kernel.
        let n = 2;
        let s = sig(1, 1);
        let x1 = SuperPolynomial::even_var(n, 1, 1, 1).unwrap();
        let t1 = SuperPolynomial::odd_var(n, 1, 1, 1).unwrap();
        let g1g2 = g(n, 1).mul(&g(n, 2)).unwrap();
        let phi_alpha =
            SuperMap::new(n, s, s, vec![x1.clone(), SuperPolynomial::zero(n, 1, 1)]).unwrap();
        let phi_beta = SuperMap::new(
            n,
            s,
            s,
            vec![
                x1.clone(),
                SuperPolynomial::constant(1, 1, g1g2).mul(&t1).unwrap(),
            ],
        )
        .unwrap();
        let ansatz = MapAnsatz {
            n_generators: n,
            source: s,
            target: s,
            degree_bound: 2,
        };
        let sol = solve_map_ansatz(
            &ansatz,
            |phi| Ok(SuperMap::compose(phi, &phi_beta)?.components().to_vec()),
            phi_alpha.components(),
        )
        .unwrap()
        .unwrap();
        assert!(!sol.kernel_basis.is_empty());
        let candidate = phi_alpha.clone();
        assert!(sol.contains(&candidate).unwrap());
        // Members all solve the equation.
        let member = sol
            .member(&vec![q(1); sol.kernel_basis.len()])
            .unwrap();
        let lhs = SuperMap::compose(&member, &phi_beta).unwrap();
        assert!(SuperMap::map_equal(&lhs, &phi_alpha).unwrap());
    }

    #[test]
    fn identity_is_particular_when_sides_match() {
        let n = 2;
        let s = sig(1, 1);
        let x1 = SuperPolynomial::even_var(n, 1, 1, 1).unwrap();
        let phi = SuperMap::new(n, s, s, vec![x1, SuperPolynomial::zero(n, 1, 1)]).unwrap();
        let ansatz = MapAnsatz {
            n_generators: n,
            source: s,
            target: s,
            degree_bound: 1,
        };
        let sol = solve_map_ansatz(
            &ansatz,
            |m| Ok(SuperMap::compose(m, &phi)?.components().to_vec()),
            phi.components(),
        )
        .unwrap()
        .unwrap();
        let id = SuperMap::identity(n, s);
        assert!(sol.contains(&id).unwrap());
    }

    #[test]
    fn nonlinear_unknown_rejected() {
        let n = 1;
        let s = sig(1, 0);
        let ansatz = MapAnsatz {
            n_generators: n,
            source: s,
            target: s,
            degree_bound: 1,
        };
        let rhs = vec![SuperPolynomial::zero(n, 1, 0)];
        let err = solve_map_ansatz(
            &ansatz,
            |m| Ok(SuperMap::compose(m, m)?.components().to_vec()),
            &rhs,
        )
        .unwrap_err();
        assert_eq!(err, SolverError::NonlinearUnknown);
    }

    #[test]
    fn try_invert_noninvertible() {
        let n = 2;
        let s = sig(1, 1);
        let x1 = SuperPolynomial::even_var(n, 1, 1, 1).unwrap();
        let f = SuperMap::new(n, s, s, vec![x1, SuperPolynomial::zero(n, 1, 1)]).unwrap();
        assert!(try_invert(&f, 2).unwrap().is_none());
    }

    #[test]
    fn try_invert_shear() {
        // f(x,t) = (x + t... ) needs an even shear: f(x1,t1) = (x1, t1) with
        // even shear on x by a nilpotent constant.
        let n = 2;
        let s = sig(1, 1);
        let x1 = SuperPolynomial::even_var(n, 1, 1, 1).unwrap();
        let t1 = SuperPolynomial::odd_var(n, 1, 1, 1).unwrap();
        let g1 = g(n, 1);
        let f = SuperMap::new(
            n,
            s,
            s,
            vec![
                x1.add(&SuperPolynomial::constant(1, 1, g1).mul(&t1).unwrap())
                    .unwrap(),
                t1.clone(),
            ],
        )
        .unwrap();
        let inv = try_invert(&f, 2).unwrap().unwrap();
        let id = SuperMap::identity(n, s);
        assert!(SuperMap::map_equal(&SuperMap::compose(&inv, &f).unwrap(), &id).unwrap());
        assert!(SuperMap::map_equal(&SuperMap::compose(&f, &inv).unwrap(), &id).unwrap());
    }
}
