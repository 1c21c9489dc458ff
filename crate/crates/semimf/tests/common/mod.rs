//! Shared generators and independent oracles for the integration suite.
#![allow(dead_code)]

use num::{BigInt, BigRational, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use semimf::{
    solve_map_ansatz, GrassmannElement, MapAnsatz, SemiAtlas, SuperDomainSignature, SuperMap,
    SuperPolynomial,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    qr(rng.gen_range(-3i64..=3), rng.gen_range(1i64..=3))
}

pub fn random_nonzero_rational(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let r = random_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

/// Random element with a handful of random monomials.
pub fn random_element(rng: &mut ChaCha8Rng, n: u32, max_terms: usize) -> GrassmannElement {
    let mut acc = GrassmannElement::zero(n);
    let dim = 1u32 << n;
    for _ in 0..rng.gen_range(0..=max_terms) {
        let mask = rng.gen_range(0..dim);
        let coeff = random_rational(rng);
        let term = GrassmannElement::monomial(n, mask, coeff).unwrap();
        acc = acc.add(&term).unwrap();
    }
    acc
}

pub fn random_nilpotent(rng: &mut ChaCha8Rng, n: u32, max_terms: usize) -> GrassmannElement {
    let e = random_element(rng, n, max_terms);
    e.sub(&GrassmannElement::from_rational(n, e.body())).unwrap()
}

// ---------------------------------------------------------------------------
// Independent dense Gaussian-elimination oracle for a·x = b
// ---------------------------------------------------------------------------

/// Sign of `e_A · e_B` by direct inversion counting; `None` when the masks
/// overlap (product is zero). Deliberately not the library's shift-popcount.
fn naive_sign(a_mask: u32, b_mask: u32) -> Option<i32> {
    if a_mask & b_mask != 0 {
        return None;
    }
    let mut inversions = 0;
    for i in 0..32 {
        if a_mask & (1 << i) == 0 {
            continue;
        }
        for j in 0..32 {
            if b_mask & (1 << j) != 0 && j < i {
                inversions += 1;
            }
        }
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

#[derive(Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub solvable: bool,
    /// Dimension of the solution space when solvable.
    pub nullity: usize,
}

/// Solvability and solution-space dimension of `a·x = b` by dense elimination
/// over the full `2^N`-dimensional monomial basis.
pub fn oracle_solve(a: &GrassmannElement, b: &GrassmannElement) -> OracleOutcome {
    let n = a.n_generators();
    let dim = 1usize << n;
    // rows[i][j] = coefficient of e_i in a·e_j; last column = b.
    let mut rows = vec![vec![BigRational::zero(); dim + 1]; dim];
    for (a_mask, a_coeff) in a.terms() {
        for j in 0..dim as u32 {
            if let Some(sign) = naive_sign(a_mask, j) {
                let target = (a_mask | j) as usize;
                let delta = if sign > 0 {
                    a_coeff.clone()
                } else {
                    -a_coeff.clone()
                };
                rows[target][j as usize] += delta;
            }
        }
    }
    for (b_mask, b_coeff) in b.terms() {
        rows[b_mask as usize][dim] = b_coeff.clone();
    }
    // Forward elimination.
    let mut rank = 0usize;
    for col in 0..dim {
        let Some(pivot) = (rank..dim).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].clone().recip();
        for r in 0..dim {
            if r != rank && !rows[r][col].is_zero() {
                let factor = &rows[r][col] * &inv;
                for c in col..=dim {
                    let sub = &factor * &rows[rank][c];
                    rows[r][c] -= sub;
                }
            }
        }
        rank += 1;
    }
    let solvable = rows[rank..].iter().all(|row| row[dim].is_zero());
    OracleOutcome {
        solvable,
        nullity: dim - rank,
    }
}

// ---------------------------------------------------------------------------
// Invertible supermaps with tracked inverses
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct InvertiblePair {
    pub map: SuperMap,
    pub inv: SuperMap,
}

fn identity_components(n: u32, sig: SuperDomainSignature) -> Vec<SuperPolynomial> {
    let mut comps = Vec::new();
    for i in 1..=sig.n_even {
        comps.push(SuperPolynomial::even_var(n, sig.n_even, sig.n_odd, i).unwrap());
    }
    for j in 1..=sig.n_odd {
        comps.push(SuperPolynomial::odd_var(n, sig.n_even, sig.n_odd, j).unwrap());
    }
    comps
}

fn endomap(n: u32, sig: SuperDomainSignature, comps: Vec<SuperPolynomial>) -> SuperMap {
    SuperMap::new(n, sig, sig, comps).unwrap()
}

/// One random elementary invertible endomap together with its exact inverse.
/// Even components stay rational at odd-zero points (no Grassmann constants
/// in the even block), so Berezinians evaluate at rational points.
fn random_elementary(
    rng: &mut ChaCha8Rng,
    n: u32,
    sig: SuperDomainSignature,
) -> InvertiblePair {
    let (ne, no) = (sig.n_even, sig.n_odd);
    let id = identity_components(n, sig);
    loop {
        match rng.gen_range(0..6) {
            // x_i *= r (r ≠ 0)
            0 if ne >= 1 => {
                let i = rng.gen_range(0..ne) as usize;
                let r = random_nonzero_rational(rng);
                let mut fwd = id.clone();
                let mut bwd = id.clone();
                fwd[i] = fwd[i].scale_rational(&r);
                bwd[i] = bwd[i].scale_rational(&r.clone().recip());
                return InvertiblePair {
                    map: endomap(n, sig, fwd),
                    inv: endomap(n, sig, bwd),
                };
            }
            // x_i += r (constant shift)
            1 if ne >= 1 => {
                let i = rng.gen_range(0..ne) as usize;
                let r = random_nonzero_rational(rng);
                let c = SuperPolynomial::constant(ne, no, GrassmannElement::from_rational(n, r));
                let mut fwd = id.clone();
                let mut bwd = id.clone();
                fwd[i] = fwd[i].add(&c).unwrap();
                bwd[i] = bwd[i].sub(&c).unwrap();
                return InvertiblePair {
                    map: endomap(n, sig, fwd),
                    inv: endomap(n, sig, bwd),
                };
            }
            // x_i += r·x_j (j ≠ i)
            2 if ne >= 2 => {
                let i = rng.gen_range(0..ne) as usize;
                let j = rng.gen_range(0..ne) as usize;
                if i == j {
                    continue;
                }
                let r = random_nonzero_rational(rng);
                let xj = SuperPolynomial::even_var(n, ne, no, j as u32 + 1)
                    .unwrap()
                    .scale_rational(&r);
                let mut fwd = id.clone();
                let mut bwd = id.clone();
                fwd[i] = fwd[i].add(&xj).unwrap();
                bwd[i] = bwd[i].sub(&xj).unwrap();
                return InvertiblePair {
                    map: endomap(n, sig, fwd),
                    inv: endomap(n, sig, bwd),
                };
            }
            // x_i += r·t_j·t_k (j < k)
            3 if ne >= 1 && no >= 2 => {
                let i = rng.gen_range(0..ne) as usize;
                let j = rng.gen_range(1..no);
                let k = rng.gen_range(j + 1..=no);
                let r = random_nonzero_rational(rng);
                let tt = SuperPolynomial::odd_var(n, ne, no, j)
                    .unwrap()
                    .mul(&SuperPolynomial::odd_var(n, ne, no, k).unwrap())
                    .unwrap()
                    .scale_rational(&r);
                let mut fwd = id.clone();
                let mut bwd = id.clone();
                fwd[i] = fwd[i].add(&tt).unwrap();
                bwd[i] = bwd[i].sub(&tt).unwrap();
                return InvertiblePair {
                    map: endomap(n, sig, fwd),
                    inv: endomap(n, sig, bwd),
                };
            }
            // t_j *= c, c an invertible even constant
            4 if no >= 1 => {
                let j = rng.gen_range(0..no) as usize;
                let mut c = GrassmannElement::from_rational(n, random_nonzero_rational(rng));
                if n >= 2 && rng.gen_bool(0.5) {
                    let soul = GrassmannElement::generator(n, 1)
                        .unwrap()
                        .mul(&GrassmannElement::generator(n, 2).unwrap())
                        .unwrap()
                        .scale(&random_rational(rng));
                    c = c.add(&soul).unwrap();
                }
                let c_inv = c.invert().unwrap();
                let idx = (ne as usize) + j;
                let mut fwd = id.clone();
                let mut bwd = id.clone();
                fwd[idx] = fwd[idx].scale_left(&c).unwrap();
                bwd[idx] = bwd[idx].scale_left(&c_inv).unwrap();
                return InvertiblePair {
                    map: endomap(n, sig, fwd),
                    inv: endomap(n, sig, bwd),
                };
            }
            // t_j += odd term without t_j: r·t_k, g_m, or g_m·x_i
            5 if no >= 1 && n >= 1 => {
                let j = rng.gen_range(0..no) as usize;
                let term = match rng.gen_range(0..3) {
                    0 if no >= 2 => {
                        let k = rng.gen_range(0..no) as usize;
                        if k == j {
                            continue;
                        }
                        SuperPolynomial::odd_var(n, ne, no, k as u32 + 1)
                            .unwrap()
                            .scale_rational(&random_nonzero_rational(rng))
                    }
                    1 => SuperPolynomial::constant(
                        ne,
                        no,
                        GrassmannElement::generator(n, rng.gen_range(1..=n))
                            .unwrap()
                            .scale(&random_nonzero_rational(rng)),
                    ),
                    _ if ne >= 1 => {
                        let i = rng.gen_range(1..=ne);
                        SuperPolynomial::even_var(n, ne, no, i)
                            .unwrap()
                            .scale_left(
                                &GrassmannElement::generator(n, rng.gen_range(1..=n)).unwrap(),
                            )
                            .unwrap()
                    }
                    _ => continue,
                };
                let idx = (ne as usize) + j;
                let mut fwd = id.clone();
                let mut bwd = id.clone();
                fwd[idx] = fwd[idx].add(&term).unwrap();
                bwd[idx] = bwd[idx].sub(&term).unwrap();
                return InvertiblePair {
                    map: endomap(n, sig, fwd),
                    inv: endomap(n, sig, bwd),
                };
            }
            _ => continue,
        }
    }
}

/// A random invertible endomap as a composite of `k` elementary maps.
pub fn random_invertible(
    rng: &mut ChaCha8Rng,
    n: u32,
    sig: SuperDomainSignature,
    k: usize,
) -> InvertiblePair {
    let mut map = SuperMap::identity(n, sig);
    let mut inv = SuperMap::identity(n, sig);
    for _ in 0..k {
        let e = random_elementary(rng, n, sig);
        map = SuperMap::compose(&e.map, &map).unwrap();
        inv = SuperMap::compose(&inv, &e.inv).unwrap();
    }
    InvertiblePair { map, inv }
}

/// Fully connected invertible atlas: per-chart invertible coordinate changes
/// `φ_α`, transitions `Φ_{αβ} = φ_α ∘ φ_β⁻¹` for every ordered pair
/// (including self-loops, which are the identity).
pub fn random_invertible_atlas(
    rng: &mut ChaCha8Rng,
    n: u32,
    sig: SuperDomainSignature,
    n_charts: usize,
) -> SemiAtlas {
    let charts: Vec<String> = (0..n_charts).map(|i| format!("C{}", i)).collect();
    let phis: Vec<InvertiblePair> = (0..n_charts)
        .map(|_| random_invertible(rng, n, sig, 2))
        .collect();
    let mut atlas = SemiAtlas::new(n, sig);
    for c in &charts {
        atlas.add_chart(c.clone());
    }
    for (a, pa) in charts.iter().zip(&phis) {
        for (b, pb) in charts.iter().zip(&phis) {
            let phi = SuperMap::compose(&pa.map, &pb.inv).unwrap();
            atlas.set_transition(a.clone(), b.clone(), phi).unwrap();
        }
    }
    atlas
}

/// A random idempotent "projection": kills a nonempty subset of the odd
/// coordinates and optionally duplicates one even coordinate into another.
pub fn random_projection(
    rng: &mut ChaCha8Rng,
    n: u32,
    sig: SuperDomainSignature,
) -> SuperMap {
    let (ne, no) = (sig.n_even, sig.n_odd);
    let mut comps = identity_components(n, sig);
    let mut changed = false;
    for j in 0..no {
        if rng.gen_bool(0.6) {
            comps[(ne + j) as usize] = SuperPolynomial::zero(n, ne, no);
            changed = true;
        }
    }
    if ne >= 2 && rng.gen_bool(0.4) {
        let from = rng.gen_range(0..ne);
        let mut to = rng.gen_range(0..ne);
        while to == from {
            to = rng.gen_range(0..ne);
        }
        comps[to as usize] = comps[from as usize].clone();
        changed = true;
    }
    if !changed && no >= 1 {
        comps[ne as usize] = SuperPolynomial::zero(n, ne, no);
    }
    endomap(n, sig, comps)
}

/// Noninvertible but well-behaved atlas: every transition is the same
/// conjugated idempotent `A ∘ P ∘ A⁻¹`. All tower identities coincide, so the
/// atlas is nice and satisfies the tower, unit, idempotency and annihilation
/// laws.
pub fn conjugated_projection_atlas(
    rng: &mut ChaCha8Rng,
    n: u32,
    sig: SuperDomainSignature,
    n_charts: usize,
) -> SemiAtlas {
    let a = random_invertible(rng, n, sig, 2);
    let p = random_projection(rng, n, sig);
    let e = SuperMap::compose(&SuperMap::compose(&a.map, &p).unwrap(), &a.inv).unwrap();
    let charts: Vec<String> = (0..n_charts).map(|i| format!("C{}", i)).collect();
    let mut atlas = SemiAtlas::new(n, sig);
    for c in &charts {
        atlas.add_chart(c.clone());
    }
    for ca in &charts {
        for cb in &charts {
            if ca != cb {
                atlas
                    .set_transition(ca.clone(), cb.clone(), e.clone())
                    .unwrap();
            }
        }
    }
    atlas
}

/// Solves `Φ ∘ X ∘ Φ = Φ` by the linear map ansatz and returns a reflexive
/// solution `X ∘ Φ ∘ X` (a generalized inverse of `Φ`).
pub fn ansatz_partner(phi: &SuperMap, degree_bound: u32) -> Option<SuperMap> {
    let ansatz = MapAnsatz {
        n_generators: phi.n_generators(),
        source: phi.target(),
        target: phi.source(),
        degree_bound,
    };
    let rhs = phi.components().to_vec();
    let sol = solve_map_ansatz(
        &ansatz,
        |x| {
            Ok(SuperMap::compose(&SuperMap::compose(phi, x)?, phi)?
                .components()
                .to_vec())
        },
        &rhs,
    )
    .ok()??;
    let x0 = sol.particular;
    let x = SuperMap::compose(&SuperMap::compose(&x0, phi).unwrap(), &x0).unwrap();
    Some(x)
}

/// Random polynomial supermap with the given signatures (parity-respecting,
/// small degree).
pub fn random_supermap(
    rng: &mut ChaCha8Rng,
    n: u32,
    source: SuperDomainSignature,
    target: SuperDomainSignature,
) -> SuperMap {
    let (ne, no) = (source.n_even, source.n_odd);
    let mut comps = Vec::new();
    for c in 0..(target.n_even + target.n_odd) {
        let want_odd = c >= target.n_even;
        let mut poly = SuperPolynomial::zero(n, ne, no);
        for _ in 0..rng.gen_range(1..=3) {
            let mut term = SuperPolynomial::constant(
                ne,
                no,
                GrassmannElement::from_rational(n, random_nonzero_rational(rng)),
            );
            // Random small monomial.
            if ne >= 1 && rng.gen_bool(0.6) {
                let i = rng.gen_range(1..=ne);
                term = term
                    .mul(&SuperPolynomial::even_var(n, ne, no, i).unwrap())
                    .unwrap();
            }
            let mut parity_odd = false;
            if no >= 1 && rng.gen_bool(0.5) {
                let j = rng.gen_range(1..=no);
                term = term
                    .mul(&SuperPolynomial::odd_var(n, ne, no, j).unwrap())
                    .unwrap();
                parity_odd = !parity_odd;
            }
            if parity_odd != want_odd {
                // Fix parity with a generator factor.
                if n == 0 {
                    continue;
                }
                let g = GrassmannElement::generator(n, rng.gen_range(1..=n)).unwrap();
                term = term.scale_left(&g).unwrap();
            }
            poly = poly.add(&term).unwrap();
        }
        if !poly.has_parity(want_odd) {
            poly = SuperPolynomial::zero(n, ne, no);
        }
        comps.push(poly);
    }
    SuperMap::new(n, source, target, comps).unwrap()
}
