//! Polynomial supermaps between superdomains: composition, formal
//! differentiation, Berezinians and orientation classes.

use num::{BigRational, Signed, Zero};

use crate::grassmann::{GrassmannElement, GrassmannError, Parity};
use crate::poly::{PolyError, SuperPolynomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SuperMapError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("signature mismatch: expected ({expected_even}|{expected_odd}), got ({got_even}|{got_odd})")]
    SignatureMismatch {
        expected_even: u32,
        expected_odd: u32,
        got_even: u32,
        got_odd: u32,
    },
    #[error("component {index} has parity {found:?}, expected {expected:?}")]
    ParityViolation {
        index: u32,
        expected: Parity,
        found: Parity,
    },
    #[error("component count {got} does not match target signature ({expected})")]
    ComponentCount { expected: u32, got: u32 },
    #[error("components live over different Grassmann algebras")]
    MixedAlgebras,
    #[error("odd-odd block determinant has zero body")]
    OddBlockSingular,
    #[error("point has {got} coordinates, source has {expected} even coordinates")]
    PointArity { expected: u32, got: u32 },
}

impl From<GrassmannError> for SuperMapError {
    fn from(e: GrassmannError) -> Self {
        SuperMapError::Poly(PolyError::Algebra(e))
    }
}

/// Dimension signature of a superdomain `R^{n|m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SuperDomainSignature {
    pub n_even: u32,
    pub n_odd: u32,
}

impl SuperDomainSignature {
    pub fn new(n_even: u32, n_odd: u32) -> Self {
        SuperDomainSignature { n_even, n_odd }
    }

    pub fn total(&self) -> u32 {
        self.n_even + self.n_odd
    }
}

impl std::fmt::Display for SuperDomainSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}|{})", self.n_even, self.n_odd)
    }
}

/// A polynomial supermap; components are ordered even targets first, then odd
/// targets, each a polynomial in the source variables. Even components must
/// have even total parity and odd components odd total parity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperMap {
    n_generators: u32,
    source: SuperDomainSignature,
    target: SuperDomainSignature,
    components: Vec<SuperPolynomial>,
}

impl SuperMap {
    pub fn new(
        n_generators: u32,
        source: SuperDomainSignature,
        target: SuperDomainSignature,
        components: Vec<SuperPolynomial>,
    ) -> Result<Self, SuperMapError> {
        if components.len() != target.total() as usize {
            return Err(SuperMapError::ComponentCount {
                expected: target.total(),
                got: components.len() as u32,
            });
        }
        for (i, comp) in components.iter().enumerate() {
            if comp.n_generators() != n_generators {
                return Err(SuperMapError::MixedAlgebras);
            }
            if comp.n_even_vars() != source.n_even || comp.n_odd_vars() != source.n_odd {
                return Err(SuperMapError::SignatureMismatch {
                    expected_even: source.n_even,
                    expected_odd: source.n_odd,
                    got_even: comp.n_even_vars(),
                    got_odd: comp.n_odd_vars(),
                });
            }
            let expected = if (i as u32) < target.n_even {
                Parity::Even
            } else {
                Parity::Odd
            };
            let found = comp.total_parity();
            let ok = matches!(found, Parity::Zero) || found == expected;
            if !ok {
                return Err(SuperMapError::ParityViolation {
                    index: i as u32,
                    expected,
                    found,
                });
            }
        }
        Ok(SuperMap {
            n_generators,
            source,
            target,
            components,
        })
    }

    pub fn identity(n_generators: u32, sig: SuperDomainSignature) -> Self {
        let mut components = Vec::new();
        for i in 1..=sig.n_even {
            components
                .push(SuperPolynomial::even_var(n_generators, sig.n_even, sig.n_odd, i).unwrap());
        }
        for j in 1..=sig.n_odd {
            components
                .push(SuperPolynomial::odd_var(n_generators, sig.n_even, sig.n_odd, j).unwrap());
        }
        SuperMap::new(n_generators, sig, sig, components).expect("identity is parity-valid")
    }

    pub fn n_generators(&self) -> u32 {
        self.n_generators
    }

    pub fn source(&self) -> SuperDomainSignature {
        self.source
    }

    pub fn target(&self) -> SuperDomainSignature {
        self.target
    }

    pub fn components(&self) -> &[SuperPolynomial] {
        &self.components
    }

    pub fn even_components(&self) -> &[SuperPolynomial] {
        &self.components[..self.target.n_even as usize]
    }

    pub fn odd_components(&self) -> &[SuperPolynomial] {
        &self.components[self.target.n_even as usize..]
    }

    /// `outer ∘ inner`: substitutes `inner`'s components into `outer`.
    pub fn compose(outer: &SuperMap, inner: &SuperMap) -> Result<SuperMap, SuperMapError> {
        if inner.target != outer.source {
            return Err(SuperMapError::SignatureMismatch {
                expected_even: outer.source.n_even,
                expected_odd: outer.source.n_odd,
                got_even: inner.target.n_even,
                got_odd: inner.target.n_odd,
            });
        }
        if inner.n_generators != outer.n_generators {
            return Err(SuperMapError::MixedAlgebras);
        }
        let components = outer
            .components
            .iter()
            .map(|c| c.substitute(inner.even_components(), inner.odd_components()))
            .collect::<Result<Vec<_>, _>>()?;
        SuperMap::new(outer.n_generators, inner.source, outer.target, components)
    }

    /// Formal equality of canonical components; signatures must agree.
    pub fn map_equal(f: &SuperMap, g: &SuperMap) -> Result<bool, SuperMapError> {
        if f.source != g.source || f.target != g.target {
            return Err(SuperMapError::SignatureMismatch {
                expected_even: f.source.n_even,
                expected_odd: f.source.n_odd,
                got_even: g.source.n_even,
                got_odd: g.source.n_odd,
            });
        }
        Ok(f.components == g.components)
    }

    /// Evaluates all components at a point.
    pub fn evaluate(
        &self,
        even_values: &[BigRational],
        odd_values: &[GrassmannElement],
    ) -> Result<Vec<GrassmannElement>, SuperMapError> {
        self.components
            .iter()
            .map(|c| c.evaluate(even_values, odd_values).map_err(Into::into))
            .collect()
    }

    /// Formal block Jacobian; odd-variable derivatives are left derivatives.
    pub fn super_jacobian(&self) -> SuperJacobian {
        let n = self.target.n_even as usize;
        let se = self.source.n_even;
        let so = self.source.n_odd;
        let block = |comps: &[SuperPolynomial], odd: bool| -> Vec<Vec<SuperPolynomial>> {
            comps
                .iter()
                .map(|c| {
                    (1..=if odd { so } else { se })
                        .map(|v| {
                            if odd {
                                c.partial_odd(v).expect("index in range")
                            } else {
                                c.partial_even(v).expect("index in range")
                            }
                        })
                        .collect()
                })
                .collect()
        };
        SuperJacobian {
            a: block(&self.components[..n], false),
            b: block(&self.components[..n], true),
            c: block(&self.components[n..], false),
            d: block(&self.components[n..], true),
        }
    }

    /// The Berezinian at a rational even point (odd coordinates set to zero).
    ///
    /// With left derivatives the Jacobian is arranged with source variables as
    /// rows before taking the superdeterminant; this is the arrangement under
    /// which the chain rule `Ber(f∘g, p) = Ber(f, g(p)) · Ber(g, p)` holds
    /// exactly.
    pub fn berezinian(&self, at: &[BigRational]) -> Result<Berezinian, SuperMapError> {
        if self.source != self.target {
            return Err(SuperMapError::SignatureMismatch {
                expected_even: self.source.n_even,
                expected_odd: self.source.n_odd,
                got_even: self.target.n_even,
                got_odd: self.target.n_odd,
            });
        }
        if at.len() != self.source.n_even as usize {
            return Err(SuperMapError::PointArity {
                expected: self.source.n_even,
                got: at.len() as u32,
            });
        }
        let zeros: Vec<GrassmannElement> = (0..self.source.n_odd)
            .map(|_| GrassmannElement::zero(self.n_generators))
            .collect();
        let jac = self.super_jacobian();
        let eval_block = |b: &Vec<Vec<SuperPolynomial>>| -> Result<GMat, SuperMapError> {
            b.iter()
                .map(|row| {
                    row.iter()
                        .map(|p| p.evaluate(at, &zeros).map_err(SuperMapError::from))
                        .collect()
                })
                .collect()
        };
        // Transpose to source-rows/target-columns arrangement.
        let p = transpose(&eval_block(&jac.a)?, self.source.n_even as usize);
        let q = transpose(&eval_block(&jac.c)?, self.source.n_even as usize);
        let r = transpose(&eval_block(&jac.b)?, self.source.n_odd as usize);
        let s = transpose(&eval_block(&jac.d)?, self.source.n_odd as usize);
        let odd_det = gdet_or_one(&s, self.n_generators)?;
        if odd_det.body().is_zero() {
            return Err(SuperMapError::OddBlockSingular);
        }
        let schur = if self.source.n_odd == 0 || self.source.n_even == 0 {
            p
        } else {
            let s_inv = gmat_inverse(&s, &odd_det)?;
            let qsr = gmat_mul(&gmat_mul(&q, &s_inv)?, &r)?;
            p.iter()
                .zip(&qsr)
                .map(|(pr, cr)| {
                    pr.iter()
                        .zip(cr)
                        .map(|(a, b)| a.sub(b))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<_, _>>()?
        };
        let schur_det = gdet_or_one(&schur, self.n_generators)?;
        let value = schur_det.mul(&odd_det.invert()?)?;
        Ok(Berezinian {
            value,
            schur_det,
            odd_det,
        })
    }
}

impl std::fmt::Display for SuperMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rendered: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "{} -> {} : ({})",
            self.source,
            self.target,
            rendered.join(", ")
        )
    }
}

/// Blocks of formal partial derivatives, target components as rows:
/// `a[i][j] = d(even'_i)/d(x_j)`, `b[i][j] = d(even'_i)/d(t_j)` (left),
/// `c[i][j] = d(odd'_i)/d(x_j)`, `d[i][j] = d(odd'_i)/d(t_j)` (left).
#[derive(Debug, Clone)]
pub struct SuperJacobian {
    pub a: Vec<Vec<SuperPolynomial>>,
    pub b: Vec<Vec<SuperPolynomial>>,
    pub c: Vec<Vec<SuperPolynomial>>,
    pub d: Vec<Vec<SuperPolynomial>>,
}

/// Berezinian value together with its two determinant factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Berezinian {
    pub value: GrassmannElement,
    /// det of the Schur complement of the odd-odd block.
    pub schur_det: GrassmannElement,
    /// det of the odd-odd block.
    pub odd_det: GrassmannElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

/// Orientation data extracted from a Berezinian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationClass {
    /// Both factor bodies are nonzero: their signs, ordered (Schur factor,
    /// odd-block factor).
    SignPair(Sign, Sign),
    /// Nonzero Berezinian with zero body; carries the nilpotency index.
    Nilpotent(u32),
    ZeroBerezinian,
}

pub fn orientation_class(ber: &Berezinian) -> OrientationClass {
    let sb = ber.schur_det.body();
    let ob = ber.odd_det.body();
    if !sb.is_zero() && !ob.is_zero() {
        let sign = |q: &BigRational| if q.is_negative() { Sign::Minus } else { Sign::Plus };
        return OrientationClass::SignPair(sign(&sb), sign(&ob));
    }
    if ber.value.is_zero() {
        return OrientationClass::ZeroBerezinian;
    }
    match ber.value.nilpotency_index() {
        Some(k) => OrientationClass::Nilpotent(k),
        None => {
            let b = ber.value.body();
            let sign = if b.is_negative() { Sign::Minus } else { Sign::Plus };
            // Body nonzero but a factor body vanished cannot happen for exact
            // products; classify by the value's sign in both slots.
            OrientationClass::SignPair(sign, Sign::Plus)
        }
    }
}

type GMat = Vec<Vec<GrassmannElement>>;

fn transpose(m: &GMat, cols: usize) -> GMat {
    (0..cols)
        .map(|c| m.iter().map(|row| row[c].clone()).collect())
        .collect()
}

fn gmat_mul(a: &GMat, b: &GMat) -> Result<GMat, SuperMapError> {
    let inner = a.first().map_or(0, |r| r.len());
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    let mut acc: Option<GrassmannElement> = None;
                    for k in 0..inner {
                        let term = row[k].mul(&b[k][c])?;
                        acc = Some(match acc {
                            None => term,
                            Some(prev) => prev.add(&term)?,
                        });
                    }
                    Ok(acc.expect("inner dimension nonzero"))
                })
                .collect()
        })
        .collect()
}

/// Determinant of a square matrix of commuting (even) Grassmann entries, by
/// Laplace expansion along the first row. The empty determinant is undefined
/// here; callers handle the 0x0 case.
fn gdet(m: &GMat) -> Result<GrassmannElement, SuperMapError> {
    let n = m.len();
    if n == 0 {
        // Convention: empty determinant is 1; generator count is unknown here,
        // so callers with 0x0 blocks must not rely on the algebra size. Use
        // the entry algebra when available.
        unreachable!("gdet called on empty matrix; use gdet_or_one");
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = GrassmannElement::zero(m[0][0].n_generators());
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: GMat = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let mut term = entry.mul(&gdet(&minor)?)?;
        if j % 2 == 1 {
            term = term.neg();
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

fn gdet_or_one(m: &GMat, n_generators: u32) -> Result<GrassmannElement, SuperMapError> {
    if m.is_empty() {
        Ok(GrassmannElement::one(n_generators))
    } else {
        gdet(m)
    }
}

/// Inverse of a square matrix of even entries via the adjugate; `det` is the
/// precomputed determinant, whose body must be nonzero.
fn gmat_inverse(m: &GMat, det: &GrassmannElement) -> Result<GMat, SuperMapError> {
    let n = m.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let det_inv = det.invert().map_err(|_| SuperMapError::OddBlockSingular)?;
    let mut inv = vec![vec![GrassmannElement::zero(det.n_generators()); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: GMat = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != j)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != i)
                        .map(|(_, e)| e.clone())
                        .collect()
                })
                .collect();
            let mut cof = gdet_or_one(&minor, det.n_generators())?;
            if (i + j) % 2 == 1 {
                cof = cof.neg();
            }
            inv[i][j] = cof.mul(&det_inv)?;
        }
    }
    Ok(inv)
}
