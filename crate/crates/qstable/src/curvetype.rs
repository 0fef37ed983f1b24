//! Combinatorial types of marked Gorenstein genus-one curves: components,
//! nodes and elliptic m-fold points with branch multiplicities, levels of
//! subcurves and singularities, and the stability predicates.

use crate::partitions::SetPartition;
use crate::qcond::QCondition;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("duplicate component id {0}")]
    DuplicateComponent(usize),
    #[error("duplicate singularity id {0}")]
    DuplicateSingularity(usize),
    #[error("unknown component id {0}")]
    UnknownComponent(usize),
    #[error("unknown singularity id {0}")]
    UnknownSingularity(usize),
    #[error("markings do not partition 1..={n}: marking {marking}")]
    BadMarkings { n: usize, marking: usize },
    #[error("incidence multiplicity must be positive")]
    ZeroMultiplicity,
    #[error("singularity {singularity} has genus {sgenus}, expected 0 or 1")]
    BadSingularityGenus { singularity: usize, sgenus: u32 },
    #[error("node {singularity} has total branch multiplicity {total}, expected 2")]
    NodeBranchCount { singularity: usize, total: u32 },
    #[error("elliptic singularity {singularity} has no branches")]
    EllipticWithoutBranches { singularity: usize },
    #[error("more than one elliptic singularity")]
    MultipleElliptic,
    #[error("type is not connected")]
    NotConnected,
    #[error("type has arithmetic genus {0}, expected 1")]
    WrongGenus(i64),
    #[error("subcurve is not connected")]
    SubcurveNotConnected,
    #[error("subcurve has genus {0}, expected 1")]
    SubcurveWrongGenus(i64),
    #[error("singularity {0} is a node, not an elliptic singularity")]
    NotElliptic(usize),
    #[error("n = {0} too large for enumeration")]
    TooLargeForEnumeration(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Component {
    pub id: usize,
    pub genus: u32,
    pub markings: BTreeSet<usize>,
}

/// `sgenus` 0 is a node, 1 an elliptic m-fold point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Singularity {
    pub id: usize,
    pub sgenus: u32,
}

/// Components and singularities of a Gorenstein genus-one curve with the
/// incidence recorded as branch multiplicities, so self-nodes and multi-branch
/// points are faithful.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CombinatorialType {
    n: usize,
    components: Vec<Component>,
    singularities: Vec<Singularity>,
    /// (component id, singularity id) -> branch multiplicity >= 1
    incidence: BTreeMap<(usize, usize), u32>,
}

/// How the minimal genus-one subcurve realizes its genus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreStructure {
    SmoothGenusOne {
        component: usize,
    },
    NodeCycle {
        components: Vec<usize>,
    },
    EllipticSingularity {
        singularity: usize,
        branches: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilityFailure {
    /// The minimal genus-one subcurve's level lies in the condition.
    SubcurveLevel {
        level: SetPartition,
    },
    /// The elliptic singularity's level is missing from the condition.
    SingularityLevel {
        level: SetPartition,
    },
    InfinitesimalAutomorphisms,
    /// A subcurve level is missing from the allowed set (interpolated
    /// stability only).
    SubcurveLevelNotAllowed {
        level: SetPartition,
    },
    /// Nested genus-one subcurves without a strict level increase
    /// (interpolated stability only).
    LevelNotStrict {
        inner: SetPartition,
        outer: SetPartition,
    },
    /// A core component meeting neither the complement closure nor a marking
    /// (interpolated stability only).
    IsolatedCoreComponent {
        component: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub failure: Option<StabilityFailure>,
}

impl StabilityVerdict {
    fn ok() -> Self {
        StabilityVerdict {
            stable: true,
            failure: None,
        }
    }

    fn fail(failure: StabilityFailure) -> Self {
        StabilityVerdict {
            stable: false,
            failure: Some(failure),
        }
    }
}

/// Which block the markings carried by the subcurve itself contribute to its
/// level. The singleton convention treats them as isolated points of the
/// marking divisor; the omitting convention drops them. The stability
/// predicates use singletons; the omitting variant exists to document that
/// the exactly-one-contraction property forces the singleton reading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CoreMarkingConvention {
    #[default]
    Singletons,
    Omit,
}

impl CombinatorialType {
    pub fn new(
        n: usize,
        components: Vec<Component>,
        singularities: Vec<Singularity>,
        incidence: BTreeMap<(usize, usize), u32>,
    ) -> Result<Self, TypeError> {
        let mut comp_ids = BTreeSet::new();
        for c in &components {
            if !comp_ids.insert(c.id) {
                return Err(TypeError::DuplicateComponent(c.id));
            }
        }
        let mut sing_ids = BTreeSet::new();
        for s in &singularities {
            if !sing_ids.insert(s.id) {
                return Err(TypeError::DuplicateSingularity(s.id));
            }
            if s.sgenus > 1 {
                return Err(TypeError::BadSingularityGenus {
                    singularity: s.id,
                    sgenus: s.sgenus,
                });
            }
        }
        let mut seen = vec![false; n + 1];
        for c in &components {
            for &m in &c.markings {
                if m == 0 || m > n || seen[m] {
                    return Err(TypeError::BadMarkings { n, marking: m });
                }
                seen[m] = true;
            }
        }
        if let Some(missing) = (1..=n).find(|&m| !seen[m]) {
            return Err(TypeError::BadMarkings {
                n,
                marking: missing,
            });
        }
        for (&(c, s), &mult) in &incidence {
            if !comp_ids.contains(&c) {
                return Err(TypeError::UnknownComponent(c));
            }
            if !sing_ids.contains(&s) {
                return Err(TypeError::UnknownSingularity(s));
            }
            if mult == 0 {
                return Err(TypeError::ZeroMultiplicity);
            }
        }
        let out = CombinatorialType {
            n,
            components,
            singularities,
            incidence,
        };
        let mut elliptic_seen = false;
        for s in &out.singularities {
            let total = out.total_branches(s.id);
            match s.sgenus {
                0 => {
                    if total != 2 {
                        return Err(TypeError::NodeBranchCount {
                            singularity: s.id,
                            total,
                        });
                    }
                }
                _ => {
                    if total == 0 {
                        return Err(TypeError::EllipticWithoutBranches { singularity: s.id });
                    }
                    if elliptic_seen {
                        return Err(TypeError::MultipleElliptic);
                    }
                    elliptic_seen = true;
                }
            }
        }
        if !out.is_connected() {
            return Err(TypeError::NotConnected);
        }
        let genus = out.arithmetic_genus();
        if genus != 1 {
            return Err(TypeError::WrongGenus(genus));
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn singularities(&self) -> &[Singularity] {
        &self.singularities
    }

    pub fn incidence(&self) -> &BTreeMap<(usize, usize), u32> {
        &self.incidence
    }

    pub fn multiplicity(&self, component: usize, singularity: usize) -> u32 {
        self.incidence
            .get(&(component, singularity))
            .copied()
            .unwrap_or(0)
    }

    fn component(&self, id: usize) -> &Component {
        self.components
            .iter()
            .find(|c| c.id == id)
            .expect("validated component id")
    }

    fn singularity(&self, id: usize) -> &Singularity {
        self.singularities
            .iter()
            .find(|s| s.id == id)
            .expect("validated singularity id")
    }

    pub fn total_branches(&self, singularity: usize) -> u32 {
        self.incidence
            .iter()
            .filter(|(&(_, s), _)| s == singularity)
            .map(|(_, &m)| m)
            .sum()
    }

    fn branches_in(&self, singularity: usize, z: &BTreeSet<usize>) -> u32 {
        self.incidence
            .iter()
            .filter(|(&(c, s), _)| s == singularity && z.contains(&c))
            .map(|(_, &m)| m)
            .sum()
    }

    /// Branch components of a singularity, i.e. components meeting it.
    pub fn branch_components(&self, singularity: usize) -> Vec<usize> {
        self.components
            .iter()
            .map(|c| c.id)
            .filter(|&c| self.multiplicity(c, singularity) > 0)
            .collect()
    }

    pub fn elliptic_singularity(&self) -> Option<usize> {
        self.singularities
            .iter()
            .find(|s| s.sgenus == 1)
            .map(|s| s.id)
    }

    /// First Betti number of the component-singularity incidence graph with
    /// multiplicity edges, plus component and singularity genera.
    pub fn arithmetic_genus(&self) -> i64 {
        let all: BTreeSet<usize> = self.components.iter().map(|c| c.id).collect();
        self.subcurve_genus(&all)
    }

    /// The arithmetic genus of the subcurve spanned by the given components.
    /// A singularity keeps its genus only when all of its branches lie in the
    /// subcurve; a partial bundle of branches is an ordinary (seminormal)
    /// point of genus zero, and a single branch is a smooth point.
    pub fn subcurve_genus(&self, z: &BTreeSet<usize>) -> i64 {
        let mut edge_count: i64 = 0;
        let mut sing_count: i64 = 0;
        let mut sing_genus: i64 = 0;
        for s in &self.singularities {
            let inside = self.branches_in(s.id, z);
            let total = self.total_branches(s.id);
            if self.singularity_in_subcurve(s.id, z) {
                sing_count += 1;
                edge_count += inside as i64;
                if inside == total {
                    sing_genus += s.sgenus as i64;
                }
            }
        }
        let comp_genus: i64 = z.iter().map(|&c| self.component(c).genus as i64).sum();
        let v = z.len() as i64 + sing_count;
        let b1 = edge_count - v + self.subcurve_components(z).len() as i64;
        b1 + comp_genus + sing_genus
    }

    /// Whether the singularity survives as a distinguished point of the
    /// subcurve: at least two inside branches, or an elliptic point with all
    /// branches inside.
    fn singularity_in_subcurve(&self, singularity: usize, z: &BTreeSet<usize>) -> bool {
        let inside = self.branches_in(singularity, z);
        let total = self.total_branches(singularity);
        inside >= 2 || (self.singularity(singularity).sgenus == 1 && inside == total && inside > 0)
    }

    /// Connected pieces of the subcurve, glued along singularities with at
    /// least two inside branches.
    fn subcurve_components(&self, z: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
        let mut repr: BTreeMap<usize, usize> = z.iter().map(|&c| (c, c)).collect();
        fn find(repr: &mut BTreeMap<usize, usize>, x: usize) -> usize {
            let parent = repr[&x];
            if parent == x {
                return x;
            }
            let root = find(repr, parent);
            repr.insert(x, root);
            root
        }
        for s in &self.singularities {
            let on: Vec<usize> = z
                .iter()
                .copied()
                .filter(|&c| self.multiplicity(c, s.id) > 0)
                .collect();
            for w in on.windows(2) {
                let (a, b) = (find(&mut repr, w[0]), find(&mut repr, w[1]));
                if a != b {
                    repr.insert(a, b);
                }
            }
        }
        let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &c in z {
            let r = find(&mut repr, c);
            groups.entry(r).or_default().insert(c);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        let all: BTreeSet<usize> = self.components.iter().map(|c| c.id).collect();
        self.subcurve_components(&all).len() == 1
    }

    pub fn is_subcurve_connected(&self, z: &BTreeSet<usize>) -> bool {
        self.subcurve_components(z).len() == 1
    }

    /// All connected genus-one subcurves, as component-id sets.
    pub fn connected_genus_one_subcurves(&self) -> Vec<BTreeSet<usize>> {
        let ids: Vec<usize> = self.components.iter().map(|c| c.id).collect();
        let mut out = Vec::new();
        for bits in 1u64..(1 << ids.len()) {
            let z: BTreeSet<usize> = ids
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, &c)| c)
                .collect();
            if self.is_subcurve_connected(&z) && self.subcurve_genus(&z) == 1 {
                out.push(z);
            }
        }
        out
    }

    /// The unique minimal connected genus-one subcurve and how it carries its
    /// genus: the branches of the elliptic singularity, the genus-one
    /// component, or the node cycle left after stripping rational leaves.
    /// Agreement with the brute-force subset search is tested.
    pub fn minimal_genus_one_subcurve(&self) -> (BTreeSet<usize>, CoreStructure) {
        if let Some(q) = self.elliptic_singularity() {
            let branches = self.branch_components(q);
            return (
                branches.iter().copied().collect(),
                CoreStructure::EllipticSingularity {
                    singularity: q,
                    branches,
                },
            );
        }
        if let Some(c) = self.components.iter().find(|c| c.genus == 1) {
            return (
                BTreeSet::from([c.id]),
                CoreStructure::SmoothGenusOne { component: c.id },
            );
        }
        let mut alive: BTreeSet<usize> = self.components.iter().map(|c| c.id).collect();
        loop {
            let degree = |c: usize, alive: &BTreeSet<usize>| -> u32 {
                self.singularities
                    .iter()
                    .filter(|s| {
                        self.branch_components(s.id)
                            .iter()
                            .all(|d| alive.contains(d))
                    })
                    .map(|s| self.multiplicity(c, s.id))
                    .sum()
            };
            let leaf = alive.iter().copied().find(|&c| degree(c, &alive) <= 1);
            match leaf {
                Some(c) => {
                    alive.remove(&c);
                }
                None => break,
            }
        }
        let components: Vec<usize> = alive.iter().copied().collect();
        (alive, CoreStructure::NodeCycle { components })
    }

    /// Raw level blocks of a genus-one subcurve: connected components of the
    /// complement, plus (per the convention) the markings on the subcurve.
    pub fn level_blocks(
        &self,
        z: &BTreeSet<usize>,
        convention: CoreMarkingConvention,
    ) -> Result<Vec<Vec<usize>>, TypeError> {
        if !self.is_subcurve_connected(z) {
            return Err(TypeError::SubcurveNotConnected);
        }
        let genus = self.subcurve_genus(z);
        if genus != 1 {
            return Err(TypeError::SubcurveWrongGenus(genus));
        }
        let complement: BTreeSet<usize> = self
            .components
            .iter()
            .map(|c| c.id)
            .filter(|c| !z.contains(c))
            .collect();
        // glue complement components only along singularities untouched by z
        let mut repr: BTreeMap<usize, usize> = complement.iter().map(|&c| (c, c)).collect();
        fn find(repr: &mut BTreeMap<usize, usize>, x: usize) -> usize {
            let parent = repr[&x];
            if parent == x {
                return x;
            }
            let root = find(repr, parent);
            repr.insert(x, root);
            root
        }
        for s in &self.singularities {
            if self.branches_in(s.id, z) > 0 {
                continue;
            }
            let on: Vec<usize> = complement
                .iter()
                .copied()
                .filter(|&c| self.multiplicity(c, s.id) > 0)
                .collect();
            for w in on.windows(2) {
                let (a, b) = (find(&mut repr, w[0]), find(&mut repr, w[1]));
                if a != b {
                    repr.insert(a, b);
                }
            }
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &c in &complement {
            let r = find(&mut repr, c);
            let markings = &self.component(c).markings;
            blocks.entry(r).or_default().extend(markings.iter());
        }
        let mut out: Vec<Vec<usize>> = blocks.into_values().filter(|b| !b.is_empty()).collect();
        if convention == CoreMarkingConvention::Singletons {
            for &c in z {
                for &m in &self.component(c).markings {
                    out.push(vec![m]);
                }
            }
        }
        Ok(out)
    }

    /// The level of a genus-one subcurve: the partition of the markings by
    /// connected components of the complement together with the marking
    /// divisor, markings on the subcurve itself contributing singletons.
    pub fn level_of_subcurve(&self, z: &BTreeSet<usize>) -> Result<SetPartition, TypeError> {
        let blocks = self.level_blocks(z, CoreMarkingConvention::Singletons)?;
        Ok(SetPartition::new(self.n, blocks).expect("blocks partition the markings"))
    }

    /// The level of an elliptic singularity: the partition of the markings by
    /// connected components of the normalization at the point, i.e. after
    /// detaching all of its branches.
    pub fn level_of_singularity(&self, singularity: usize) -> Result<SetPartition, TypeError> {
        let s = self
            .singularities
            .iter()
            .find(|s| s.id == singularity)
            .ok_or(TypeError::UnknownSingularity(singularity))?;
        if s.sgenus != 1 {
            return Err(TypeError::NotElliptic(singularity));
        }
        let mut repr: BTreeMap<usize, usize> =
            self.components.iter().map(|c| (c.id, c.id)).collect();
        fn find(repr: &mut BTreeMap<usize, usize>, x: usize) -> usize {
            let parent = repr[&x];
            if parent == x {
                return x;
            }
            let root = find(repr, parent);
            repr.insert(x, root);
            root
        }
        for other in &self.singularities {
            if other.id == singularity {
                continue;
            }
            let on: Vec<usize> = self
                .components
                .iter()
                .map(|c| c.id)
                .filter(|&c| self.multiplicity(c, other.id) > 0)
                .collect();
            for w in on.windows(2) {
                let (a, b) = (find(&mut repr, w[0]), find(&mut repr, w[1]));
                if a != b {
                    repr.insert(a, b);
                }
            }
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for c in &self.components {
            let r = find(&mut repr, c.id);
            blocks.entry(r).or_default().extend(c.markings.iter());
        }
        let blocks: Vec<Vec<usize>> = blocks.into_values().filter(|b| !b.is_empty()).collect();
        Ok(SetPartition::new(self.n, blocks).expect("blocks partition the markings"))
    }

    /// Special points of a component: markings plus branch incidences counted
    /// with multiplicity.
    pub fn special_points(&self, component: usize) -> u32 {
        let marks = self.component(component).markings.len() as u32;
        let branches: u32 = self
            .incidence
            .iter()
            .filter(|(&(c, _), _)| c == component)
            .map(|(_, &m)| m)
            .sum();
        marks + branches
    }

    /// Detects positive-dimensional automorphism groups: a rational component
    /// away from the elliptic point with fewer than three special points, a
    /// genus-one component with none, or elliptic branches that are too bare
    /// (every branch needs a special point besides the singularity, and some
    /// branch needs two).
    pub fn has_infinitesimal_automorphisms(&self) -> bool {
        if let Some(q) = self.elliptic_singularity() {
            let branches: BTreeSet<usize> = self.branch_components(q).into_iter().collect();
            for c in &self.components {
                if branches.contains(&c.id) {
                    continue;
                }
                if c.genus == 0 && self.special_points(c.id) < 3 {
                    return true;
                }
                if c.genus >= 1 && self.special_points(c.id) < 1 {
                    return true;
                }
            }
            let others: Vec<u32> = branches
                .iter()
                .map(|&f| self.special_points(f) - self.multiplicity(f, q))
                .collect();
            if others.iter().any(|&k| k < 1) {
                return true;
            }
            if others.iter().all(|&k| k < 2) {
                return true;
            }
            false
        } else {
            self.components.iter().any(|c| {
                (c.genus == 0 && self.special_points(c.id) < 3)
                    || (c.genus >= 1 && self.special_points(c.id) < 1)
            })
        }
    }

    /// The stability predicate for a condition: the minimal genus-one
    /// subcurve's level must avoid the condition (level monotonicity and
    /// downward closure make the minimal check sufficient), the elliptic
    /// singularity's level must lie in it, and there must be no infinitesimal
    /// automorphisms.
    pub fn is_stable_for(&self, q: &QCondition) -> StabilityVerdict {
        let (z_min, _) = self.minimal_genus_one_subcurve();
        let level = self
            .level_of_subcurve(&z_min)
            .expect("minimal subcurve is connected genus one");
        if q.contains(&level) {
            return StabilityVerdict::fail(StabilityFailure::SubcurveLevel { level });
        }
        if let Some(sing) = self.elliptic_singularity() {
            let level = self
                .level_of_singularity(sing)
                .expect("validated elliptic singularity");
            if !q.contains(&level) {
                return StabilityVerdict::fail(StabilityFailure::SingularityLevel { level });
            }
        }
        if self.has_infinitesimal_automorphisms() {
            return StabilityVerdict::fail(StabilityFailure::InfinitesimalAutomorphisms);
        }
        StabilityVerdict::ok()
    }

    /// Stability against a cube point: the interpolated predicate evaluated
    /// at the point's two level sets.
    pub fn is_stable_for_cube_point(
        &self,
        point: &crate::cubecomplex::CubePoint,
    ) -> StabilityVerdict {
        self.is_stable_for_interpolated(&point.q_sing(), &point.q_curve())
    }

    /// The interpolated stability predicate of a cube point, given its two
    /// level sets: singularity levels must lie in `q_sing`, every connected
    /// genus-one subcurve's level in `q_curve`, levels must strictly increase
    /// along proper inclusions of genus-one subcurves, and every component of
    /// the minimal genus-one subcurve must meet the complement closure or a
    /// marking.
    pub fn is_stable_for_interpolated(
        &self,
        q_sing: &QCondition,
        q_curve: &BTreeSet<SetPartition>,
    ) -> StabilityVerdict {
        if let Some(sing) = self.elliptic_singularity() {
            let level = self
                .level_of_singularity(sing)
                .expect("validated elliptic singularity");
            if !q_sing.contains(&level) {
                return StabilityVerdict::fail(StabilityFailure::SingularityLevel { level });
            }
        }
        let subcurves = self.connected_genus_one_subcurves();
        let levels: Vec<SetPartition> = subcurves
            .iter()
            .map(|z| {
                self.level_of_subcurve(z)
                    .expect("enumerated subcurves are connected genus one")
            })
            .collect();
        for level in &levels {
            if !q_curve.contains(level) {
                return StabilityVerdict::fail(StabilityFailure::SubcurveLevelNotAllowed {
                    level: level.clone(),
                });
            }
        }
        for (i, zi) in subcurves.iter().enumerate() {
            for (j, zj) in subcurves.iter().enumerate() {
                if zi.is_subset(zj) && zi.len() < zj.len() {
                    let (inner, outer) = (&levels[i], &levels[j]);
                    if !inner.strictly_refined_by(outer) {
                        return StabilityVerdict::fail(StabilityFailure::LevelNotStrict {
                            inner: inner.clone(),
                            outer: outer.clone(),
                        });
                    }
                }
            }
        }
        let (z_min, _) = self.minimal_genus_one_subcurve();
        for &f in &z_min {
            let has_marking = !self.component(f).markings.is_empty();
            let meets_complement = self.incidence.iter().any(|(&(c, s), &m)| {
                c == f
                    && m > 0
                    && self
                        .components
                        .iter()
                        .any(|d| !z_min.contains(&d.id) && self.multiplicity(d.id, s) > 0)
            });
            if !has_marking && !meets_complement {
                return StabilityVerdict::fail(StabilityFailure::IsolatedCoreComponent {
                    component: f,
                });
            }
        }
        StabilityVerdict::ok()
    }

    /// Isomorphism-invariant canonical relabeling: components and
    /// singularities are sorted by invariant keys, ties broken by the
    /// incidence-minimizing permutation.
    pub fn canonical_form(&self) -> CombinatorialType {
        let comp_key = |c: &Component| {
            let mut profile: Vec<(u32, u32, u32)> = self
                .incidence
                .iter()
                .filter(|(&(cc, _), _)| cc == c.id)
                .map(|(&(_, s), &m)| (self.singularity(s).sgenus, m, self.total_branches(s)))
                .collect();
            profile.sort();
            (c.genus, c.markings.clone(), profile)
        };
        let sing_key = |s: &Singularity| {
            let mut profile: Vec<(u32, u32, BTreeSet<usize>)> = self
                .incidence
                .iter()
                .filter(|(&(_, ss), _)| ss == s.id)
                .map(|(&(c, _), &m)| {
                    let comp = self.component(c);
                    (m, comp.genus, comp.markings.clone())
                })
                .collect();
            profile.sort();
            (s.sgenus, profile)
        };
        let mut comps = self.components.clone();
        comps.sort_by_key(|c| comp_key(c));
        let mut sings = self.singularities.clone();
        sings.sort_by_key(|s| sing_key(s));

        // permute within equal-key classes to minimize the incidence list
        let comp_classes = classes_by_key(&comps, |c| comp_key(c));
        let sing_classes = classes_by_key(&sings, |s| sing_key(s));
        let mut best: Option<CombinatorialType> = None;
        for comp_order in class_permutations(&comps, &comp_classes) {
            for sing_order in class_permutations(&sings, &sing_classes) {
                let comp_new: BTreeMap<usize, usize> = comp_order
                    .iter()
                    .enumerate()
                    .map(|(new, c)| (c.id, new))
                    .collect();
                let sing_new: BTreeMap<usize, usize> = sing_order
                    .iter()
                    .enumerate()
                    .map(|(new, s)| (s.id, new))
                    .collect();
                let candidate = CombinatorialType {
                    n: self.n,
                    components: comp_order
                        .iter()
                        .enumerate()
                        .map(|(new, c)| Component {
                            id: new,
                            genus: c.genus,
                            markings: c.markings.clone(),
                        })
                        .collect(),
                    singularities: sing_order
                        .iter()
                        .enumerate()
                        .map(|(new, s)| Singularity {
                            id: new,
                            sgenus: s.sgenus,
                        })
                        .collect(),
                    incidence: self
                        .incidence
                        .iter()
                        .map(|(&(c, s), &m)| ((comp_new[&c], sing_new[&s]), m))
                        .collect(),
                };
                if best.as_ref().map(|b| candidate < *b).unwrap_or(true) {
                    best = Some(candidate);
                }
            }
        }
        best.expect("at least one relabeling")
    }

    pub fn is_isomorphic(&self, other: &CombinatorialType) -> bool {
        self.n == other.n && self.canonical_form() == other.canonical_form()
    }

    /// Graphviz rendering of the dual graph: components as circles sized by
    /// genus, nodes as points, elliptic points as doubled circles, branch
    /// multiplicities as edge labels.
    pub fn render_dot(&self) -> String {
        let mut out = String::from("graph type {\n  node [fontsize=10];\n");
        for c in &self.components {
            let marks: Vec<String> = c.markings.iter().map(|m| m.to_string()).collect();
            let label = if marks.is_empty() {
                format!("c{} g{}", c.id, c.genus)
            } else {
                format!("c{} g{} {{{}}}", c.id, c.genus, marks.join(","))
            };
            out.push_str(&format!(
                "  c{} [shape={} label=\"{}\"];\n",
                c.id,
                if c.genus > 0 {
                    "doublecircle"
                } else {
                    "circle"
                },
                label
            ));
        }
        for s in &self.singularities {
            let (shape, label) = if s.sgenus == 0 {
                ("point", String::new())
            } else {
                ("square", format!("E{}", self.total_branches(s.id)))
            };
            out.push_str(&format!(
                "  s{} [shape={} label=\"{}\"];\n",
                s.id, shape, label
            ));
        }
        for (&(c, s), &m) in &self.incidence {
            if m > 1 {
                out.push_str(&format!("  c{c} -- s{s} [label=\"{m}\"];\n"));
            } else {
                out.push_str(&format!("  c{c} -- s{s};\n"));
            }
        }
        out.push_str("}\n");
        out
    }

    /// Text rendering: an adjacency listing with singularity annotations,
    /// `N` for nodes and `Em` for elliptic m-fold points, e.g.
    /// `c0:g0{1,2}; c1:g0{3}; E2[c0,c1]`. Singularity ids in the text form
    /// are positional.
    pub fn render_text(&self) -> String {
        let mut items: Vec<String> = Vec::new();
        for c in &self.components {
            let mut item = format!("c{}:g{}", c.id, c.genus);
            if !c.markings.is_empty() {
                let marks: Vec<String> = c.markings.iter().map(|m| m.to_string()).collect();
                item.push_str(&format!("{{{}}}", marks.join(",")));
            }
            items.push(item);
        }
        for s in &self.singularities {
            let label = if s.sgenus == 0 {
                "N".to_string()
            } else {
                format!("E{}", self.total_branches(s.id))
            };
            let touches: Vec<String> = self
                .incidence
                .iter()
                .filter(|(&(_, ss), _)| ss == s.id)
                .map(|(&(c, _), &m)| {
                    if m > 1 {
                        format!("c{c}x{m}")
                    } else {
                        format!("c{c}")
                    }
                })
                .collect();
            items.push(format!("{}[{}]", label, touches.join(",")));
        }
        items.join("; ")
    }
}

fn classes_by_key<T, K: Ord>(items: &[T], key: impl Fn(&T) -> K) -> Vec<(usize, usize)> {
    let mut classes = Vec::new();
    let mut start = 0;
    for i in 1..=items.len() {
        if i == items.len() || key(&items[i]) != key(&items[start]) {
            classes.push((start, i));
            start = i;
        }
    }
    classes
}

fn class_permutations<'a, T: Clone>(items: &'a [T], classes: &[(usize, usize)]) -> Vec<Vec<&'a T>> {
    fn perms<T>(items: &[T]) -> Vec<Vec<&T>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let rest: Vec<&T> = items
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, x)| x)
                .collect();
            for mut p in perms_refs(&rest) {
                p.insert(0, &items[i]);
                out.push(p);
            }
        }
        out
    }
    fn perms_refs<'b, T>(items: &[&'b T]) -> Vec<Vec<&'b T>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let rest: Vec<&T> = items
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, x)| *x)
                .collect();
            for mut p in perms_refs(&rest) {
                p.insert(0, items[i]);
                out.push(p);
            }
        }
        out
    }
    let mut result: Vec<Vec<&T>> = vec![vec![]];
    for &(start, end) in classes {
        let class_perms = perms(&items[start..end]);
        let mut next = Vec::new();
        for prefix in &result {
            for perm in &class_perms {
                let mut combined = prefix.clone();
                combined.extend(perm.iter().copied());
                next.push(combined);
            }
        }
        result = next;
    }
    result
}

impl fmt::Debug for CombinatorialType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_text())
    }
}

/// Serialized form mirrors the field list.
#[derive(Serialize, Deserialize)]
struct TypeWire {
    n: usize,
    components: Vec<Component>,
    singularities: Vec<Singularity>,
    incidence: Vec<IncidenceWire>,
}

#[derive(Serialize, Deserialize)]
struct IncidenceWire {
    component: usize,
    singularity: usize,
    multiplicity: u32,
}

impl Serialize for CombinatorialType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TypeWire {
            n: self.n,
            components: self.components.clone(),
            singularities: self.singularities.clone(),
            incidence: self
                .incidence
                .iter()
                .map(|(&(c, s), &m)| IncidenceWire {
                    component: c,
                    singularity: s,
                    multiplicity: m,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CombinatorialType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = TypeWire::deserialize(deserializer)?;
        let incidence = wire
            .incidence
            .into_iter()
            .map(|i| ((i.component, i.singularity), i.multiplicity))
            .collect();
        CombinatorialType::new(wire.n, wire.components, wire.singularities, incidence)
            .map_err(serde::de::Error::custom)
    }
}

/// Every combinatorial type arising as a contraction of a test curve: all
/// chains, all cores up to the attachment bound, all surjective attachment
/// assignments, contracted at every radius, deduplicated up to isomorphism.
pub fn enumerate_types(n: usize) -> Result<Vec<CombinatorialType>, TypeError> {
    if n > 4 {
        return Err(TypeError::TooLargeForEnumeration(n));
    }
    let curves =
        crate::tropical::enumerate_test_curves(n).expect("test-curve enumeration in range");
    let mut canonical: BTreeSet<CombinatorialType> = BTreeSet::new();
    for curve in &curves {
        let radial = curve.radial_structure().expect("test curves are aligned");
        let mut radii = vec![crate::monoid::MonoidElement::zero()];
        radii.extend(radial.radii.clone());
        for rho in &radii {
            let t = crate::contraction::contract_at_radius(curve, rho)
                .expect("test curves contract at their radii");
            canonical.insert(t.canonical_form());
        }
    }
    Ok(canonical.into_iter().collect())
}
