//! Semi-atlases: charts glued by possibly noninvertible transition maps, and
//! the full verification suite for their gluing laws, cycle regularity,
//! tower identities, obstructedness, niceness and the tower semigroup.
//!
//! Overlaps are purely combinatorial labels; every law is checked as a formal
//! polynomial identity. Nothing is ever cancelled: a composite equality never
//! licenses simplifying a shared factor away.

use std::collections::{BTreeMap, BTreeSet};

use crate::report::{RelationReport, Verdict};
use crate::solver::{default_degree_bound, try_invert, SolverError};
use crate::supermap::{SuperDomainSignature, SuperMap, SuperMapError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AtlasError {
    #[error(transparent)]
    Map(#[from] SuperMapError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("missing transition map {from} -> {to}")]
    MissingTransition { from: String, to: String },
    #[error("missing coordinate map for chart `{0}`")]
    MissingCoordinateMap(String),
    #[error("atlas is not nice up to n = {n}: chart `{chart}` has differing tower identities for cycles {cycle_a:?} and {cycle_b:?}")]
    NotNice {
        chart: String,
        n: u32,
        cycle_a: Vec<String>,
        cycle_b: Vec<String>,
    },
    #[error("transition {from} -> {to} must be an endomap of the atlas signature")]
    BadTransitionSignature { from: String, to: String },
}

/// Whether a chart's coordinate map is invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChartKind {
    /// Invertible coordinate map.
    Chart,
    /// Noninvertible coordinate map.
    SemiChart,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NicenessWitness {
    pub chart: String,
    pub n: u32,
    pub cycle_a: Vec<String>,
    pub cycle_b: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NicenessReport {
    pub nice: bool,
    pub witness: Option<NicenessWitness>,
}

/// Tower semigroup data for one chart: the sequence `e^(n)` for
/// `n = 1..=n_max`, its distinct elements, eventual periodicity, the Cayley
/// table under index addition, and the compatibility of map composition with
/// that abstract product.
#[derive(Debug, Clone)]
pub struct TowerSemigroup {
    pub chart: String,
    /// `sequence[n-1]` = index into `elements` of `e^(n)`, when defined.
    pub sequence: Vec<Option<usize>>,
    pub elements: Vec<SuperMap>,
    /// Smallest representative `n` for each element.
    pub element_order: Vec<u32>,
    /// `(index, period)` of the eventually periodic sequence, when detected.
    pub index_period: Option<(u32, u32)>,
    /// `cayley[i][j]` = element index of `e^(n_i + n_j)` folded through the
    /// periodicity; `None` when it cannot be determined from the data.
    pub cayley: Vec<Vec<Option<usize>>>,
    /// One report per checked pair: does `compose(e^(n), e^(m))` equal
    /// `e^(n+m)` as a map?
    pub compatibility: Vec<RelationReport>,
}

#[derive(Debug, Clone)]
pub struct SemiAtlas {
    n_generators: u32,
    signature: SuperDomainSignature,
    chart_ids: Vec<String>,
    coordinate_maps: BTreeMap<String, SuperMap>,
    transitions: BTreeMap<(String, String), SuperMap>,
    overlaps: BTreeSet<Vec<String>>,
}

impl SemiAtlas {
    pub fn new(n_generators: u32, signature: SuperDomainSignature) -> Self {
        SemiAtlas {
            n_generators,
            signature,
            chart_ids: Vec::new(),
            coordinate_maps: BTreeMap::new(),
            transitions: BTreeMap::new(),
            overlaps: BTreeSet::new(),
        }
    }

    pub fn n_generators(&self) -> u32 {
        self.n_generators
    }

    pub fn signature(&self) -> SuperDomainSignature {
        self.signature
    }

    pub fn chart_ids(&self) -> &[String] {
        &self.chart_ids
    }

    pub fn add_chart(&mut self, id: impl Into<String>) {
        let id = id.into();
        if !self.chart_ids.contains(&id) {
            self.chart_ids.push(id);
            self.chart_ids.sort();
        }
    }

    fn require_chart(&self, id: &str) -> Result<(), AtlasError> {
        if self.chart_ids.iter().any(|c| c == id) {
            Ok(())
        } else {
            Err(AtlasError::UnknownChart(id.to_string()))
        }
    }

    pub fn set_coordinate_map(
        &mut self,
        chart: impl Into<String>,
        map: SuperMap,
    ) -> Result<(), AtlasError> {
        let chart = chart.into();
        self.require_chart(&chart)?;
        if map.target() != self.signature {
            return Err(AtlasError::BadTransitionSignature {
                from: chart.clone(),
                to: chart,
            });
        }
        self.coordinate_maps.insert(chart, map);
        Ok(())
    }

    pub fn coordinate_map(&self, chart: &str) -> Option<&SuperMap> {
        self.coordinate_maps.get(chart)
    }

    /// Declares an unordered set of charts as overlapping.
    pub fn add_overlap(&mut self, charts: &[String]) -> Result<(), AtlasError> {
        for c in charts {
            self.require_chart(c)?;
        }
        let mut set: Vec<String> = charts.to_vec();
        set.sort();
        set.dedup();
        self.overlaps.insert(set);
        Ok(())
    }

    /// Stores `Φ_{from,to}`; the pair overlap is declared implicitly.
    pub fn set_transition(
        &mut self,
        from: impl Into<String>,
        to: impl Into<String>,
        map: SuperMap,
    ) -> Result<(), AtlasError> {
        let from = from.into();
        let to = to.into();
        self.require_chart(&from)?;
        self.require_chart(&to)?;
        if map.source() != self.signature || map.target() != self.signature {
            return Err(AtlasError::BadTransitionSignature { from, to });
        }
        self.add_overlap(&[from.clone(), to.clone()])?;
        self.transitions.insert((from, to), map);
        Ok(())
    }

    pub fn transition(&self, from: &str, to: &str) -> Option<&SuperMap> {
        self.transitions
            .get(&(from.to_string(), to.to_string()))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&(String, String), &SuperMap)> {
        self.transitions.iter()
    }

    pub fn overlaps(&self) -> impl Iterator<Item = &Vec<String>> {
        self.overlaps.iter()
    }

    /// Whether the unordered pair is declared overlapping (directly or inside
    /// a larger overlap set).
    pub fn pair_overlaps(&self, a: &str, b: &str) -> bool {
        if a == b {
            return true;
        }
        self.overlaps
            .iter()
            .any(|set| set.iter().any(|c| c == a) && set.iter().any(|c| c == b))
    }

    /// Chart vs semi-chart: a chart has an exactly invertible coordinate map
    /// (polynomial inverse within the default degree bound); everything else
    /// is a semi-chart.
    pub fn classify_chart(&self, chart: &str) -> Result<ChartKind, AtlasError> {
        self.require_chart(chart)?;
        let map = self
            .coordinate_maps
            .get(chart)
            .ok_or_else(|| AtlasError::MissingCoordinateMap(chart.to_string()))?;
        let bound = default_degree_bound(&[map]);
        Ok(if try_invert(map, bound)?.is_some() {
            ChartKind::Chart
        } else {
            ChartKind::SemiChart
        })
    }

    fn equality_report(
        relation: &str,
        cycle: &[String],
        lhs: &SuperMap,
        rhs: &SuperMap,
    ) -> RelationReport {
        match SuperMap::map_equal(lhs, rhs) {
            Ok(true) => RelationReport::holds(relation, cycle),
            Ok(false) => {
                RelationReport::fails(relation, cycle, lhs.to_string(), rhs.to_string())
            }
            Err(e) => RelationReport::skipped(relation, cycle, e.to_string()),
        }
    }

    /// Gluing laws: for every ordered overlapping pair with a stored
    /// transition, `Φ_{αβ} ∘ φ_β = φ_α`.
    pub fn check_gluing(&self) -> Vec<RelationReport> {
        let mut reports = Vec::new();
        for ((a, b), phi) in &self.transitions {
            let cycle = vec![a.clone(), b.clone()];
            let (Some(pa), Some(pb)) =
                (self.coordinate_maps.get(a), self.coordinate_maps.get(b))
            else {
                let missing = if self.coordinate_maps.contains_key(a) { b } else { a };
                reports.push(RelationReport::skipped(
                    "gluing",
                    &cycle,
                    format!("missing coordinate map for chart `{}`", missing),
                ));
                continue;
            };
            match SuperMap::compose(phi, pb) {
                Ok(lhs) => reports.push(Self::equality_report("gluing", &cycle, &lhs, pa)),
                Err(e) => reports.push(RelationReport::skipped("gluing", &cycle, e.to_string())),
            }
        }
        reports
    }

    /// Composite around the cycle, diagrammatic order: the rightmost factor
    /// (the closing map back to the start) is applied first.
    fn cycle_composite(&self, cycle: &[String]) -> Result<SuperMap, AtlasError> {
        let l = cycle.len();
        let mut acc: Option<SuperMap> = None;
        for i in 0..l {
            let from = &cycle[i];
            let to = &cycle[(i + 1) % l];
            let phi = self
                .transition(from, to)
                .ok_or_else(|| AtlasError::MissingTransition {
                    from: from.clone(),
                    to: to.clone(),
                })?;
            acc = Some(match acc {
                None => phi.clone(),
                Some(outer) => SuperMap::compose(&outer, phi)?,
            });
        }
        Ok(acc.expect("cycle nonempty"))
    }

    /// The tower identity `e^(n)` of the cycle `[α, β, ..., ρ]`:
    /// `Φ_{αβ} ∘ Φ_{βγ} ∘ ... ∘ Φ_{ρα}`.
    pub fn tower_identity(&self, cycle: &[String]) -> Result<SuperMap, AtlasError> {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        self.cycle_composite(cycle)
    }

    /// The conjugate tower identity: the same charts traversed in opposite
    /// order, `Φ_{αρ} ∘ ... ∘ Φ_{βα}`.
    pub fn conjugate_tower_identity(&self, cycle: &[String]) -> Result<SuperMap, AtlasError> {
        self.tower_identity(&reverse_cycle(cycle))
    }

    fn regularity_report(&self, label: &str, rotation: &[String]) -> RelationReport {
        let first = match self.transition(&rotation[0], &rotation[1 % rotation.len()]) {
            Some(m) => m.clone(),
            None => {
                return RelationReport::skipped(
                    label,
                    rotation,
                    format!(
                        "missing transition {} -> {}",
                        rotation[0],
                        rotation[1 % rotation.len()]
                    ),
                )
            }
        };
        let composite = match self.cycle_composite(rotation) {
            Ok(c) => c,
            Err(e) => return RelationReport::skipped(label, rotation, e.to_string()),
        };
        match SuperMap::compose(&composite, &first) {
            Ok(lhs) => Self::equality_report(label, rotation, &lhs, &first),
            Err(e) => RelationReport::skipped(label, rotation, e.to_string()),
        }
    }

    /// `n`-regularity of one cycle, all cyclic rotations: for each rotation
    /// `[α, β, ..., ρ]`, `(Φ_{αβ}∘Φ_{βγ}∘...∘Φ_{ρα})∘Φ_{αβ} = Φ_{αβ}`.
    pub fn check_n_regular(&self, cycle: &[String]) -> Vec<RelationReport> {
        self.n_regular_with_label(cycle, "regular")
    }

    pub(crate) fn n_regular_with_label(&self, cycle: &[String], prefix: &str) -> Vec<RelationReport> {
        let label = format!("{}-{}", prefix, cycle.len() + 1);
        rotations(cycle)
            .iter()
            .map(|rot| self.regularity_report(&label, rot))
            .collect()
    }

    /// All canonical simple cycles of the given length: distinct charts,
    /// cyclically adjacent pairs declared overlapping, starting at the
    /// minimal chart, and (for length ≥ 3) one orientation only.
    pub fn simple_cycles(&self, length: usize) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        if length == 0 || length > self.chart_ids.len() {
            return out;
        }
        if length == 1 {
            for c in &self.chart_ids {
                out.push(vec![c.clone()]);
            }
            return out;
        }
        let mut path: Vec<String> = Vec::new();
        for start in &self.chart_ids {
            path.push(start.clone());
            self.extend_cycle(&mut path, length, &mut out, true);
            path.pop();
        }
        out
    }

    /// All simple cycles of the given length anchored at one chart, in both
    /// orientations (used for cycle-independence questions).
    pub fn anchored_cycles(&self, chart: &str, length: usize) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        if length == 0 || length > self.chart_ids.len() {
            return out;
        }
        if length == 1 {
            return vec![vec![chart.to_string()]];
        }
        let mut path = vec![chart.to_string()];
        self.extend_cycle(&mut path, length, &mut out, false);
        out
    }

    fn extend_cycle(
        &self,
        path: &mut Vec<String>,
        length: usize,
        out: &mut Vec<Vec<String>>,
        canonical: bool,
    ) {
        if path.len() == length {
            if self.pair_overlaps(&path[length - 1], &path[0]) {
                // Canonical orientation for length >= 3: second < last.
                if !canonical || length < 3 || path[1] < path[length - 1] {
                    out.push(path.clone());
                }
            }
            return;
        }
        let last = path[path.len() - 1].clone();
        for next in &self.chart_ids {
            if path.contains(next) {
                continue;
            }
            // Canonical start: the first chart is minimal in the cycle.
            if canonical && next < &path[0] {
                continue;
            }
            if !self.pair_overlaps(&last, next) {
                continue;
            }
            path.push(next.clone());
            self.extend_cycle(path, length, out, canonical);
            path.pop();
        }
    }

    /// Tower relations: `n`-regularity of every canonical simple cycle of
    /// length `2..=min(n_max, chart count)`, all rotations.
    pub fn check_tower_relations(&self, n_max: u32) -> Vec<RelationReport> {
        let mut reports = Vec::new();
        let top = (n_max as usize).min(self.chart_ids.len());
        for l in 2..=top {
            for cycle in self.simple_cycles(l) {
                reports.extend(self.n_regular_with_label(&cycle, "regular"));
            }
        }
        reports
    }

    /// Reflexivity conditions: the same relations on the reversed-orientation
    /// cycles (independent equations on the same maps).
    pub fn check_reflexivity(&self, n_max: u32) -> Vec<RelationReport> {
        let mut reports = Vec::new();
        let top = (n_max as usize).min(self.chart_ids.len());
        for l in 2..=top {
            for cycle in self.simple_cycles(l) {
                reports.extend(self.n_regular_with_label(&reverse_cycle(&cycle), "reflexive"));
            }
        }
        reports
    }

    /// The two-multiplier relation of a cycle `[α, β, γ, ...]`:
    /// `(full cycle composite) ∘ Φ_{αβ}∘Φ_{βγ} = Φ_{αβ}∘Φ_{βγ}`.
    pub fn check_two_multiplier(&self, cycle: &[String]) -> RelationReport {
        let label = "two-multiplier";
        if cycle.len() < 2 {
            return RelationReport::skipped(label, cycle, "cycle shorter than two charts");
        }
        let composite = match self.cycle_composite(cycle) {
            Ok(c) => c,
            Err(e) => return RelationReport::skipped(label, cycle, e.to_string()),
        };
        let first_two = {
            let p1 = self.transition(&cycle[0], &cycle[1]);
            let p2 = self.transition(&cycle[1], &cycle[2 % cycle.len()]);
            match (p1, p2) {
                (Some(p1), Some(p2)) => match SuperMap::compose(p1, p2) {
                    Ok(m) => m,
                    Err(e) => return RelationReport::skipped(label, cycle, e.to_string()),
                },
                _ => {
                    return RelationReport::skipped(label, cycle, "missing transition".to_string())
                }
            }
        };
        match SuperMap::compose(&composite, &first_two) {
            Ok(lhs) => Self::equality_report(label, cycle, &lhs, &first_two),
            Err(e) => RelationReport::skipped(label, cycle, e.to_string()),
        }
    }

    /// Unit, idempotency, conjugate-unit and annihilation laws of the tower
    /// identities, for every rotation of every simple cycle up to `n_max`.
    pub fn check_tower_identity_laws(&self, n_max: u32) -> Vec<RelationReport> {
        let mut reports = Vec::new();
        let top = (n_max as usize).min(self.chart_ids.len());
        for l in 1..=top {
            for cycle in self.simple_cycles(l) {
                for rot in rotations(&cycle) {
                    reports.extend(self.identity_laws_for_rotation(&rot));
                }
            }
        }
        reports
    }

    fn identity_laws_for_rotation(&self, rot: &[String]) -> Vec<RelationReport> {
        let mut reports = Vec::new();
        let l = rot.len();
        let next = rotations(rot)[1 % l].clone();
        let skip_all = |reports: &mut Vec<RelationReport>, reason: &str| {
            for label in [
                "unit-left",
                "unit-right",
                "idempotent",
                "conj-unit-left",
                "conj-unit-right",
                "annihilation",
            ] {
                reports.push(RelationReport::skipped(label, rot, reason.to_string()));
            }
        };
        let (e0, e1) = match (self.tower_identity(rot), self.tower_identity(&next)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                skip_all(&mut reports, &e.to_string());
                return reports;
            }
        };
        let c0 = &rot[0];
        let c1 = &rot[1 % l];
        let check = |label: &str, lhs: Result<SuperMap, SuperMapError>, rhs: &SuperMap| match lhs {
            Ok(lhs) => Self::equality_report(label, rot, &lhs, rhs),
            Err(e) => RelationReport::skipped(label, rot, e.to_string()),
        };
        // Units: e_{c0} ∘ Φ_{c0 c1} = Φ_{c0 c1} and Φ_{c0 c1} ∘ e_{c1} = Φ_{c0 c1}.
        match self.transition(c0, c1) {
            Some(phi) => {
                reports.push(check("unit-left", SuperMap::compose(&e0, phi), phi));
                reports.push(check("unit-right", SuperMap::compose(phi, &e1), phi));
            }
            None => {
                for label in ["unit-left", "unit-right"] {
                    reports.push(RelationReport::skipped(
                        label,
                        rot,
                        format!("missing transition {} -> {}", c0, c1),
                    ));
                }
            }
        }
        // Idempotency: e ∘ e = e.
        reports.push(check("idempotent", SuperMap::compose(&e0, &e0), &e0));
        // Conjugate units: ẽ_{c1} ∘ Φ_{c1 c0} = Φ_{c1 c0}, Φ_{c1 c0} ∘ ẽ_{c0} = Φ_{c1 c0}.
        let conj0 = self.conjugate_tower_identity(rot);
        let conj1 = self.conjugate_tower_identity(&next);
        match (self.transition(c1, c0), conj0, conj1) {
            (Some(phi), Ok(cj0), Ok(cj1)) => {
                reports.push(check("conj-unit-left", SuperMap::compose(&cj1, phi), phi));
                reports.push(check("conj-unit-right", SuperMap::compose(phi, &cj0), phi));
                // Annihilation: e^(n) ∘ ẽ^(n) = e^(2) of the first pair.
                if l >= 2 {
                    match (self.transition(c0, c1), self.transition(c1, c0)) {
                        (Some(a), Some(b)) => match SuperMap::compose(a, b) {
                            Ok(e2) => reports
                                .push(check("annihilation", SuperMap::compose(&e0, &cj0), &e2)),
                            Err(e) => reports.push(RelationReport::skipped(
                                "annihilation",
                                rot,
                                e.to_string(),
                            )),
                        },
                        _ => reports.push(RelationReport::skipped(
                            "annihilation",
                            rot,
                            "missing transition for the anchoring pair".to_string(),
                        )),
                    }
                } else {
                    // n = 1: ẽ = e and e^(2) is not anchored; nothing to check.
                    reports.push(RelationReport::skipped(
                        "annihilation",
                        rot,
                        "cycle of length 1 has no anchoring pair".to_string(),
                    ));
                }
            }
            (None, _, _) => {
                for label in ["conj-unit-left", "conj-unit-right", "annihilation"] {
                    reports.push(RelationReport::skipped(
                        label,
                        rot,
                        format!("missing transition {} -> {}", c1, c0),
                    ));
                }
            }
            (_, Err(e), _) | (_, _, Err(e)) => {
                for label in ["conj-unit-left", "conj-unit-right", "annihilation"] {
                    reports.push(RelationReport::skipped(label, rot, e.to_string()));
                }
            }
        }
        reports
    }

    /// Tower identities `e^(n)` of complete anchored cycles, one per cycle.
    fn anchored_identities(&self, chart: &str, n: usize) -> Vec<(Vec<String>, SuperMap)> {
        self.anchored_cycles(chart, n)
            .into_iter()
            .filter_map(|cycle| {
                self.tower_identity(&cycle)
                    .ok()
                    .map(|e| (cycle, e))
            })
            .collect()
    }

    /// Largest `n ≤ min(n_max, chart count)` at which some simple cycle's
    /// tower identity differs from the identity map; 0 when every computable
    /// tower identity is the identity.
    pub fn obstructedness_degree(&self, n_max: u32) -> u32 {
        let id = SuperMap::identity(self.n_generators, self.signature);
        let top = (n_max as usize).min(self.chart_ids.len());
        for n in (1..=top).rev() {
            for chart in &self.chart_ids {
                for (_, e) in self.anchored_identities(chart, n) {
                    if !SuperMap::map_equal(&e, &id).unwrap_or(false) {
                        return n as u32;
                    }
                }
            }
        }
        0
    }

    /// Whether tower identities are independent of the chosen cycle: for each
    /// chart and each `n ≤ n_max`, all complete length-`n` simple cycles
    /// through the chart yield equal `e^(n)`.
    pub fn is_nice(&self, n_max: u32) -> NicenessReport {
        let top = (n_max as usize).min(self.chart_ids.len());
        for chart in &self.chart_ids {
            for n in 1..=top {
                let values = self.anchored_identities(chart, n);
                if values.len() < 2 {
                    continue;
                }
                let (first_cycle, first) = &values[0];
                for (cycle, e) in &values[1..] {
                    if !SuperMap::map_equal(first, e).unwrap_or(false) {
                        return NicenessReport {
                            nice: false,
                            witness: Some(NicenessWitness {
                                chart: chart.clone(),
                                n: n as u32,
                                cycle_a: first_cycle.clone(),
                                cycle_b: cycle.clone(),
                            }),
                        };
                    }
                }
            }
        }
        NicenessReport {
            nice: true,
            witness: None,
        }
    }

    /// The tower semigroup at a chart. Requires niceness up to `n_max`.
    ///
    /// `e^(n)` is taken from a simple cycle when one exists; for larger `n`
    /// it is extended through the index-additive product, composing the
    /// smallest defined summand pair. Compatibility of map composition with
    /// the abstract product is checked and reported, never assumed.
    pub fn tower_semigroup(&self, chart: &str, n_max: u32) -> Result<TowerSemigroup, AtlasError> {
        self.require_chart(chart)?;
        let nice = self.is_nice(n_max);
        if let Some(w) = nice.witness {
            return Err(AtlasError::NotNice {
                chart: w.chart,
                n: w.n,
                cycle_a: w.cycle_a,
                cycle_b: w.cycle_b,
            });
        }
        let n_max = n_max as usize;
        // Values of e^(n), n = 1..=n_max.
        let mut values: Vec<Option<SuperMap>> = vec![None; n_max];
        for n in 1..=n_max.min(self.chart_ids.len()) {
            if let Some((_, e)) = self.anchored_identities(chart, n).into_iter().next() {
                values[n - 1] = Some(e);
            }
        }
        for n in 1..=n_max {
            if values[n - 1].is_some() {
                continue;
            }
            for a in 1..n {
                let b = n - a;
                if let (Some(ea), Some(eb)) = (&values[a - 1], &values[b - 1]) {
                    values[n - 1] = Some(SuperMap::compose(ea, eb)?);
                    break;
                }
            }
        }
        // Distinct elements in order of first appearance.
        let mut elements: Vec<SuperMap> = Vec::new();
        let mut element_order: Vec<u32> = Vec::new();
        let mut sequence: Vec<Option<usize>> = Vec::new();
        for (i, v) in values.iter().enumerate() {
            match v {
                None => sequence.push(None),
                Some(map) => {
                    let idx = elements
                        .iter()
                        .position(|e| SuperMap::map_equal(e, map).unwrap_or(false));
                    match idx {
                        Some(idx) => sequence.push(Some(idx)),
                        None => {
                            elements.push(map.clone());
                            element_order.push(i as u32 + 1);
                            sequence.push(Some(elements.len() - 1));
                        }
                    }
                }
            }
        }
        // Eventual periodicity under map equality.
        let mut index_period = None;
        'outer: for period in 1..=n_max {
            for start in 1..=n_max {
                let mut compared = false;
                let mut ok = true;
                for n in start..=n_max.saturating_sub(period) {
                    if n < start {
                        continue;
                    }
                    match (&sequence[n - 1], &sequence[n + period - 1]) {
                        (Some(a), Some(b)) => {
                            compared = true;
                            if a != b {
                                ok = false;
                                break;
                            }
                        }
                        _ => {}
                    }
                }
                if ok && compared {
                    index_period = Some((start as u32, period as u32));
                    break 'outer;
                }
            }
        }
        // Cayley table under index addition, folded through periodicity.
        let fold = |n: usize| -> Option<usize> {
            if n >= 1 && n <= n_max && sequence[n - 1].is_some() {
                return sequence[n - 1];
            }
            let (start, period) = index_period?;
            let (start, period) = (start as usize, period as usize);
            if n < start || period == 0 {
                return None;
            }
            let folded = start + (n - start) % period;
            // Search the periodicity class for a defined representative.
            let mut k = folded;
            while k <= n_max {
                if sequence[k - 1].is_some() {
                    return sequence[k - 1];
                }
                k += period;
            }
            None
        };
        let cayley: Vec<Vec<Option<usize>>> = element_order
            .iter()
            .map(|ni| {
                element_order
                    .iter()
                    .map(|nj| fold((*ni + *nj) as usize))
                    .collect()
            })
            .collect();
        // Compatibility: compose(e^(n), e^(m)) vs e^(n+m).
        let mut compatibility = Vec::new();
        for n in 1..=n_max {
            for m in 1..=n_max {
                if n + m > n_max {
                    continue;
                }
                let label = format!("semigroup-compat-{}-{}", n, m);
                let cycle = vec![chart.to_string()];
                match (&values[n - 1], &values[m - 1], &values[n + m - 1]) {
                    (Some(en), Some(em), Some(enm)) => {
                        match SuperMap::compose(en, em) {
                            Ok(lhs) => compatibility
                                .push(Self::equality_report(&label, &cycle, &lhs, enm)),
                            Err(e) => compatibility.push(RelationReport::skipped(
                                &label,
                                &cycle,
                                e.to_string(),
                            )),
                        }
                    }
                    _ => compatibility.push(RelationReport::skipped(
                        &label,
                        &cycle,
                        "tower identity undefined at this order".to_string(),
                    )),
                }
            }
        }
        Ok(TowerSemigroup {
            chart: chart.to_string(),
            sequence,
            elements,
            element_order,
            index_period,
            cayley,
            compatibility,
        })
    }
}

/// All cyclic rotations of a cycle, starting with the cycle itself.
pub fn rotations(cycle: &[String]) -> Vec<Vec<String>> {
    let l = cycle.len();
    (0..l)
        .map(|s| (0..l).map(|i| cycle[(s + i) % l].clone()).collect())
        .collect()
}

/// Same anchor, opposite orientation: `[α, β, γ, ...] -> [α, ..., γ, β]`.
pub fn reverse_cycle(cycle: &[String]) -> Vec<String> {
    let mut out = vec![cycle[0].clone()];
    out.extend(cycle[1..].iter().rev().cloned());
    out
}

/// Summary counts over a report list.
pub fn summarize(reports: &[RelationReport]) -> (usize, usize, usize) {
    let mut hold = 0;
    let mut fail = 0;
    let mut skip = 0;
    for r in reports {
        match r.verdict {
            Verdict::Holds => hold += 1,
            Verdict::Fails { .. } => fail += 1,
            Verdict::Skipped { .. } => skip += 1,
        }
    }
    (hold, fail, skip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::GrassmannElement;
    use crate::poly::SuperPolynomial;

    const N: u32 = 2;

    fn sig() -> SuperDomainSignature {
        SuperDomainSignature::new(1, 1)
    }

    fn x1() -> SuperPolynomial {
        SuperPolynomial::even_var(N, 1, 1, 1).unwrap()
    }

    fn t1() -> SuperPolynomial {
        SuperPolynomial::odd_var(N, 1, 1, 1).unwrap()
    }

    fn proj_map() -> SuperMap {
        // P(x, t) = (x, 0): idempotent, noninvertible.
        SuperMap::new(N, sig(), sig(), vec![x1(), SuperPolynomial::zero(N, 1, 1)]).unwrap()
    }

    fn nilpotent_map() -> SuperMap {
        // (x, g1g2 * t).
        let g1g2 = GrassmannElement::generator(N, 1)
            .unwrap()
            .mul(&GrassmannElement::generator(N, 2).unwrap())
            .unwrap();
        SuperMap::new(
            N,
            sig(),
            sig(),
            vec![
                x1(),
                SuperPolynomial::constant(1, 1, g1g2).mul(&t1()).unwrap(),
            ],
        )
        .unwrap()
    }

    fn two_chart_projection_atlas() -> SemiAtlas {
        // Phi_{AB} = Phi_{BA} = P, a shared idempotent projection.
        let mut atlas = SemiAtlas::new(N, sig());
        atlas.add_chart("A");
        atlas.add_chart("B");
        atlas.set_transition("A", "B", proj_map()).unwrap();
        atlas.set_transition("B", "A", proj_map()).unwrap();
        atlas
    }

    #[test]
    fn gluing_example_with_nilpotent_chart() {
        // phi_A = (x, 0), phi_B = (x, g1g2 t), Phi_{AB} = (x, 0): Eq-5 holds.
        let mut atlas = SemiAtlas::new(N, sig());
        atlas.add_chart("A");
        atlas.add_chart("B");
        atlas.set_coordinate_map("A", proj_map()).unwrap();
        atlas.set_coordinate_map("B", nilpotent_map()).unwrap();
        atlas.set_transition("A", "B", proj_map()).unwrap();
        let reports = atlas.check_gluing();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].verdict.is_hold(), "{:?}", reports[0]);
    }

    #[test]
    fn projection_atlas_regularity() {
        let atlas = two_chart_projection_atlas();
        let cycle = vec!["A".to_string(), "B".to_string()];
        for r in atlas.check_n_regular(&cycle) {
            assert!(r.verdict.is_hold(), "{:?}", r);
        }
        for r in atlas.check_tower_relations(4) {
            assert!(r.verdict.is_hold(), "{:?}", r);
        }
        for r in atlas.check_reflexivity(4) {
            assert!(r.verdict.is_hold(), "{:?}", r);
        }
        for r in atlas.check_tower_identity_laws(4) {
            assert!(!r.verdict.is_fail(), "{:?}", r);
        }
    }

    #[test]
    fn obstructedness_of_projection_atlas() {
        // e^(2) = P o P = P != id, so the degree is 2.
        let atlas = two_chart_projection_atlas();
        assert_eq!(atlas.obstructedness_degree(4), 2);
        assert!(atlas.is_nice(4).nice);
    }

    #[test]
    fn identity_atlas_unobstructed() {
        let mut atlas = SemiAtlas::new(N, sig());
        atlas.add_chart("A");
        atlas.add_chart("B");
        let id = SuperMap::identity(N, sig());
        atlas.set_transition("A", "B", id.clone()).unwrap();
        atlas.set_transition("B", "A", id.clone()).unwrap();
        assert_eq!(atlas.obstructedness_degree(4), 0);
        for r in atlas.check_tower_relations(4) {
            assert!(r.verdict.is_hold());
        }
    }

    #[test]
    fn self_loop_obstruction() {
        // Phi_{AA} != id on one chart, nothing else: degree 1.
        let mut atlas = SemiAtlas::new(N, sig());
        atlas.add_chart("A");
        atlas.set_transition("A", "A", proj_map()).unwrap();
        assert_eq!(atlas.obstructedness_degree(4), 1);
    }

    #[test]
    fn tower_identity_of_pair() {
        let atlas = two_chart_projection_atlas();
        let e2 = atlas
            .tower_identity(&["A".to_string(), "B".to_string()])
            .unwrap();
        assert!(SuperMap::map_equal(&e2, &proj_map()).unwrap());
        let conj = atlas
            .conjugate_tower_identity(&["A".to_string(), "B".to_string()])
            .unwrap();
        assert!(SuperMap::map_equal(&e2, &conj).unwrap());
    }

    #[test]
    fn missing_transition_reported_skipped() {
        let mut atlas = SemiAtlas::new(N, sig());
        atlas.add_chart("A");
        atlas.add_chart("B");
        atlas.set_transition("A", "B", proj_map()).unwrap();
        // No B -> A map: everything involving it is Skipped, never passed.
        let reports = atlas.check_tower_relations(2);
        assert!(!reports.is_empty());
        assert!(reports.iter().all(|r| r.verdict.is_skip()));
    }

    #[test]
    fn two_multiplier_on_projection_triple() {
        let mut atlas = SemiAtlas::new(N, sig());
        for c in ["A", "B", "C"] {
            atlas.add_chart(c);
        }
        for a in ["A", "B", "C"] {
            for b in ["A", "B", "C"] {
                if a != b {
                    atlas.set_transition(a, b, proj_map()).unwrap();
                }
            }
        }
        let cycle = vec!["A".to_string(), "B".to_string(), "C".to_string()];
        assert!(atlas.check_two_multiplier(&cycle).verdict.is_hold());
        for r in atlas.check_tower_relations(3) {
            assert!(r.verdict.is_hold(), "{:?}", r);
        }
        for r in atlas.check_tower_identity_laws(3) {
            assert!(!r.verdict.is_fail(), "{:?}", r);
        }
    }

    #[test]
    fn semigroup_of_projection_atlas() {
        let atlas = two_chart_projection_atlas();
        let sg = atlas.tower_semigroup("A", 6).unwrap();
        // Only even n have simple cycles; odd orders are undefined at first
        // but n = 2 composes to give 4, 6, ... all equal to P.
        assert_eq!(sg.elements.len(), 1);
        assert!(SuperMap::map_equal(&sg.elements[0], &proj_map()).unwrap());
        assert!(sg.index_period.is_some());
        for r in &sg.compatibility {
            assert!(!r.verdict.is_fail(), "{:?}", r);
        }
    }

    #[test]
    fn chart_classification() {
        let mut atlas = SemiAtlas::new(N, sig());
        atlas.add_chart("A");
        atlas.add_chart("B");
        atlas
            .set_coordinate_map("A", SuperMap::identity(N, sig()))
            .unwrap();
        atlas.set_coordinate_map("B", proj_map()).unwrap();
        assert_eq!(atlas.classify_chart("A").unwrap(), ChartKind::Chart);
        assert_eq!(atlas.classify_chart("B").unwrap(), ChartKind::SemiChart);
    }

    #[test]
    fn cycle_enumeration_is_canonical() {
        let mut atlas = SemiAtlas::new(N, sig());
        for c in ["A", "B", "C"] {
            atlas.add_chart(c);
        }
        atlas
            .add_overlap(&["A".into(), "B".into(), "C".into()])
            .unwrap();
        let cycles = atlas.simple_cycles(3);
        assert_eq!(cycles, vec![vec!["A".to_string(), "B".into(), "C".into()]]);
        let anchored = atlas.anchored_cycles("A", 3);
        assert_eq!(anchored.len(), 2); // both orientations
        assert_eq!(atlas.simple_cycles(2).len(), 3);
    }
}
