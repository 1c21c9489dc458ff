//! Semi-homotopies: one-parameter families of supermaps with a nilpotent
//! even or an odd parameter. Endpoint agreement is only required after
//! multiplication by the (noninvertible) endpoint difference, and that factor
//! is never cancelled.

use num::BigRational;

use crate::grassmann::GrassmannElement;
use crate::poly::{PolyError, SuperPolynomial};
use crate::report::RelationReport;
use crate::solver::{solve_map_ansatz, MapAnsatz, MapSolutionSet, SolverError};
use crate::supermap::{SuperDomainSignature, SuperMap, SuperMapError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HomotopyError {
    #[error(transparent)]
    Map(#[from] SuperMapError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("value parity does not match the homotopy parameter kind")]
    ParityMismatch,
    #[error("even homotopy parameter values must have zero body")]
    BodyNotZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterKind {
    Even,
    Odd,
}

/// A family `Γ` of maps, with the parameter as the last coordinate of its
/// parity block, together with the two endpoint parameter values.
#[derive(Debug, Clone)]
pub struct SemiHomotopy {
    big_map: SuperMap,
    parameter_kind: ParameterKind,
    endpoints: (GrassmannElement, GrassmannElement),
}

impl SemiHomotopy {
    pub fn new(
        big_map: SuperMap,
        parameter_kind: ParameterKind,
        endpoints: (GrassmannElement, GrassmannElement),
    ) -> Result<Self, HomotopyError> {
        let src = big_map.source();
        match parameter_kind {
            ParameterKind::Even if src.n_even == 0 => return Err(HomotopyError::ParityMismatch),
            ParameterKind::Odd if src.n_odd == 0 => return Err(HomotopyError::ParityMismatch),
            _ => {}
        }
        for value in [&endpoints.0, &endpoints.1] {
            check_parameter_value(value, parameter_kind)?;
        }
        Ok(SemiHomotopy {
            big_map,
            parameter_kind,
            endpoints,
        })
    }

    pub fn big_map(&self) -> &SuperMap {
        &self.big_map
    }

    pub fn parameter_kind(&self) -> ParameterKind {
        self.parameter_kind
    }

    pub fn endpoints(&self) -> (&GrassmannElement, &GrassmannElement) {
        (&self.endpoints.0, &self.endpoints.1)
    }

    /// Signature of the stages: the parameter coordinate removed.
    pub fn stage_signature(&self) -> SuperDomainSignature {
        let src = self.big_map.source();
        match self.parameter_kind {
            ParameterKind::Even => SuperDomainSignature::new(src.n_even - 1, src.n_odd),
            ParameterKind::Odd => SuperDomainSignature::new(src.n_even, src.n_odd - 1),
        }
    }

    /// The stage at a fixed parameter value: substitutes the constant into the
    /// parameter coordinate.
    pub fn stage(&self, value: &GrassmannElement) -> Result<SuperMap, HomotopyError> {
        check_parameter_value(value, self.parameter_kind)?;
        let n = self.big_map.n_generators();
        let sig = self.stage_signature();
        let mut comps = Vec::new();
        for i in 1..=sig.n_even {
            comps.push(SuperPolynomial::even_var(n, sig.n_even, sig.n_odd, i)?);
        }
        let value_poly = SuperPolynomial::constant(sig.n_even, sig.n_odd, value.clone());
        if self.parameter_kind == ParameterKind::Even {
            comps.push(value_poly.clone());
        }
        for j in 1..=sig.n_odd {
            comps.push(SuperPolynomial::odd_var(n, sig.n_even, sig.n_odd, j)?);
        }
        if self.parameter_kind == ParameterKind::Odd {
            comps.push(value_poly);
        }
        let inclusion = SuperMap::new(n, sig, self.big_map.source(), comps)?;
        Ok(SuperMap::compose(&self.big_map, &inclusion)?)
    }

    /// Endpoint agreement of an even family with `f` and `g`: with
    /// `Δ = b − a`, checks `Δ·γ_a = Δ·f` and `Δ·γ_b = Δ·g` componentwise as
    /// formal identities. `Δ` is nilpotent, so the factor is never cancelled.
    pub fn check_even_semihomotopy(
        &self,
        f: &SuperMap,
        g: &SuperMap,
    ) -> Result<Vec<RelationReport>, HomotopyError> {
        if self.parameter_kind != ParameterKind::Even {
            return Err(HomotopyError::ParityMismatch);
        }
        self.endpoint_reports("homotopy-even", f, g)
    }

    /// The odd analogue: `Δ = β − α` is odd, so every product flips parity;
    /// the comparison is still componentwise polynomial equality.
    pub fn check_odd_semihomotopy(
        &self,
        f: &SuperMap,
        g: &SuperMap,
    ) -> Result<Vec<RelationReport>, HomotopyError> {
        if self.parameter_kind != ParameterKind::Odd {
            return Err(HomotopyError::ParityMismatch);
        }
        self.endpoint_reports("homotopy-odd", f, g)
    }

    fn endpoint_reports(
        &self,
        prefix: &str,
        f: &SuperMap,
        g: &SuperMap,
    ) -> Result<Vec<RelationReport>, HomotopyError> {
        let delta = self.endpoints.1.sub(&self.endpoints.0).map_err(|e| {
            HomotopyError::Map(SuperMapError::from(crate::poly::PolyError::from(e)))
        })?;
        let mut reports = Vec::new();
        for (suffix, value, map) in [
            ("start", &self.endpoints.0, f),
            ("end", &self.endpoints.1, g),
        ] {
            let label = format!("{}-{}", prefix, suffix);
            let cycle: Vec<String> = Vec::new();
            if map.source() != self.stage_signature() || map.target() != self.big_map.target() {
                reports.push(RelationReport::skipped(label, &cycle, "signature mismatch"));
                continue;
            }
            let stage = self.stage(value)?;
            let mut equal = true;
            let mut lhs_text = Vec::new();
            let mut rhs_text = Vec::new();
            for (sc, fc) in stage.components().iter().zip(map.components()) {
                let lhs = sc.scale_left(&delta)?;
                let rhs = fc.scale_left(&delta)?;
                if lhs != rhs {
                    equal = false;
                }
                lhs_text.push(lhs.to_string());
                rhs_text.push(rhs.to_string());
            }
            reports.push(if equal {
                RelationReport::holds(label, &cycle)
            } else {
                RelationReport::fails(
                    label,
                    &cycle,
                    format!("({})", lhs_text.join(", ")),
                    format!("({})", rhs_text.join(", ")),
                )
            });
        }
        Ok(reports)
    }
}

fn check_parameter_value(
    value: &GrassmannElement,
    kind: ParameterKind,
) -> Result<(), HomotopyError> {
    match kind {
        ParameterKind::Even => {
            if !value.has_parity(false) {
                return Err(HomotopyError::ParityMismatch);
            }
            if !value.body().eq(&BigRational::default()) {
                return Err(HomotopyError::BodyNotZero);
            }
        }
        ParameterKind::Odd => {
            if !value.has_parity(true) {
                return Err(HomotopyError::ParityMismatch);
            }
        }
    }
    Ok(())
}

/// All bounded-degree families `Γ(x, τ)` satisfying the averaged interpolation
/// `(β−α)·Γ(x,τ) = (β−τ)·f(x) + (τ−α)·g(x)`. Division by `β−α` is
/// impossible; the equation is solved coefficient-wise instead, and `None`
/// means no family of the given degree exists.
pub fn odd_average_solutions(
    f: &SuperMap,
    g: &SuperMap,
    alpha: &GrassmannElement,
    beta: &GrassmannElement,
    degree_bound: u32,
) -> Result<Option<MapSolutionSet>, HomotopyError> {
    for value in [alpha, beta] {
        check_parameter_value(value, ParameterKind::Odd)?;
    }
    if f.source() != g.source() || f.target() != g.target() {
        return Err(SuperMapError::SignatureMismatch {
            expected_even: f.source().n_even,
            expected_odd: f.source().n_odd,
            got_even: g.source().n_even,
            got_odd: g.source().n_odd,
        }
        .into());
    }
    let n = f.n_generators();
    let src = f.source();
    let gamma_sig = SuperDomainSignature::new(src.n_even, src.n_odd + 1);
    let (ne, no) = (gamma_sig.n_even, gamma_sig.n_odd);
    let tau = SuperPolynomial::odd_var(n, ne, no, no)?;
    let beta_minus_tau =
        SuperPolynomial::constant(ne, no, beta.clone()).sub(&tau)?;
    let tau_minus_alpha = tau.sub(&SuperPolynomial::constant(ne, no, alpha.clone()))?;
    let delta = beta.sub(alpha).expect("same algebra");

    let mut rhs = Vec::new();
    for (fc, gc) in f.components().iter().zip(g.components()) {
        let fc = fc.pad_context(ne, no)?;
        let gc = gc.pad_context(ne, no)?;
        rhs.push(beta_minus_tau.mul(&fc)?.add(&tau_minus_alpha.mul(&gc)?)?);
    }

    let ansatz = MapAnsatz {
        n_generators: n,
        source: gamma_sig,
        target: f.target(),
        degree_bound,
    };
    let sol = solve_map_ansatz(
        &ansatz,
        |gamma| {
            gamma
                .components()
                .iter()
                .map(|c| c.scale_left(&delta).map_err(SuperMapError::from))
                .collect()
        },
        &rhs,
    )?;
    Ok(sol)
}
