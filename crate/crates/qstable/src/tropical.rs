//! Tropical curves of genus one: marked weighted multigraphs with edge
//! lengths in a free sharp monoid, together with the radial machinery
//! (distance from the core, radii, partition types), weighted edge
//! contraction, stabilization, and the layered test-curve construction.

use crate::monoid::{MonoidElement, MonoidError, MonoidHom};
use crate::partitions::{PartitionError, SetPartition};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

pub type VertexId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TropicalError {
    #[error("curve is not connected")]
    NotConnected,
    #[error("curve has genus {0}, expected genus one")]
    WrongGenus(u32),
    #[error("curve is not stable")]
    NotStable,
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),
    #[error("edge {0} has length zero")]
    ZeroEdgeLength(usize),
    #[error("length uses generator '{0}' missing from the generator list")]
    UnknownGenerator(String),
    #[error("duplicate generator '{0}'")]
    DuplicateGenerator(String),
    #[error("markings are not a bijection with 1..={n}: marking {marking}")]
    BadMarkings { n: usize, marking: usize },
    #[error("not radially aligned: lambda({v}) = {dv} incomparable to lambda({w}) = {dw}")]
    NotAligned {
        v: VertexId,
        w: VertexId,
        dv: MonoidElement,
        dw: MonoidElement,
    },
    #[error("radius {rho} incomparable to lambda({v}) = {dv}")]
    IncomparableRadius {
        rho: MonoidElement,
        v: VertexId,
        dv: MonoidElement,
    },
    #[error("{0} is not a radius of the curve")]
    NotARadius(MonoidElement),
    #[error("curve cannot be stabilized")]
    Unstabilizable,
    #[error("curve is not basic radially aligned")]
    NotBasic,
    #[error("cycle core of length {j} exceeds the {slots} available attachments")]
    CycleTooLong { j: usize, slots: usize },
    #[error("cycle core must have at least one vertex")]
    EmptyCycle,
    #[error("attachment assignment does not reach every core vertex")]
    AssignmentNotSurjective,
    #[error("attachment assignment has wrong length or targets")]
    BadAssignment,
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain is not strictly increasing at position {0}")]
    NotStrict(usize),
    #[error("chain entry {0} is the discrete partition")]
    ContainsDiscrete(usize),
    #[error("chain entry {0} has the wrong ground set")]
    WrongGroundSet(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub genus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub ends: (VertexId, VertexId),
    pub length: MonoidElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub marking: usize,
    pub root: VertexId,
}

/// An n-marked tropical curve. Flags, root map and involution are encoded as
/// endpoint pairs; loops and parallel edges are fully supported.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct TropicalCurve {
    generators: Vec<String>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
}

#[derive(Deserialize)]
struct TropicalCurveWire {
    generators: Vec<String>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
}

impl<'de> Deserialize<'de> for TropicalCurve {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = TropicalCurveWire::deserialize(deserializer)?;
        TropicalCurve::new(wire.generators, wire.vertices, wire.edges, wire.legs)
            .map_err(serde::de::Error::custom)
    }
}

/// The distinct nonzero distances from the core in increasing order, plus the
/// lengths of the edges internal to the core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadialData {
    pub radii: Vec<MonoidElement>,
    pub core_edge_lengths: Vec<MonoidElement>,
    /// Whether the monoid is freely generated by the radius differences
    /// together with the core edge lengths.
    pub basic: bool,
}

/// A strictly increasing chain of non-discrete partitions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionChain {
    n: usize,
    chain: Vec<SetPartition>,
}

impl PartitionChain {
    pub fn new(n: usize, chain: Vec<SetPartition>) -> Result<Self, ChainError> {
        for (i, p) in chain.iter().enumerate() {
            if p.n() != n {
                return Err(ChainError::WrongGroundSet(i));
            }
            if p.is_discrete() {
                return Err(ChainError::ContainsDiscrete(i));
            }
        }
        for i in 1..chain.len() {
            if !chain[i - 1].strictly_refined_by(&chain[i]) {
                return Err(ChainError::NotStrict(i));
            }
        }
        Ok(PartitionChain { n, chain })
    }

    pub fn empty(n: usize) -> Self {
        PartitionChain { n, chain: vec![] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn partitions(&self) -> &[SetPartition] {
        &self.chain
    }

    /// The chain with the entry at `index` removed.
    pub fn without(&self, index: usize) -> PartitionChain {
        let mut chain = self.chain.clone();
        chain.remove(index);
        PartitionChain { n: self.n, chain }
    }
}

impl fmt::Display for PartitionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.chain.iter().enumerate() {
            if i > 0 {
                write!(f, " < ")?;
            }
            let blocks: Vec<String> = p
                .blocks()
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            write!(f, "{}", blocks.join("|"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PartitionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// The shape of the core of a test curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CoreKind {
    /// A single vertex of genus one.
    SmoothVertex,
    /// A cycle of `j >= 1` rational vertices; `Cycle(1)` is a vertex with a
    /// self-loop, `Cycle(2)` a pair of vertices with two parallel edges.
    Cycle(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreSymmetry {
    LoopReversal,
    CoreEdgeSwap,
}

/// Automorphism group of a basic radially aligned curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AutomorphismGroup {
    pub order: u32,
    pub generator: Option<CoreSymmetry>,
}

impl TropicalCurve {
    pub fn new(
        generators: Vec<String>,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        legs: Vec<Leg>,
    ) -> Result<Self, TropicalError> {
        let mut gen_set = BTreeSet::new();
        for g in &generators {
            if !gen_set.insert(g.clone()) {
                return Err(TropicalError::DuplicateGenerator(g.clone()));
            }
        }
        let mut ids = BTreeSet::new();
        for v in &vertices {
            if !ids.insert(v.id) {
                return Err(TropicalError::DuplicateVertex(v.id));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            for end in [e.ends.0, e.ends.1] {
                if !ids.contains(&end) {
                    return Err(TropicalError::UnknownVertex(end));
                }
            }
            if e.length.is_zero() {
                return Err(TropicalError::ZeroEdgeLength(i));
            }
            for g in e.length.support() {
                if !gen_set.contains(g) {
                    return Err(TropicalError::UnknownGenerator(g.to_string()));
                }
            }
        }
        let n = legs.len();
        let mut seen = vec![false; n + 1];
        for l in &legs {
            if !ids.contains(&l.root) {
                return Err(TropicalError::UnknownVertex(l.root));
            }
            if l.marking == 0 || l.marking > n || seen[l.marking] {
                return Err(TropicalError::BadMarkings {
                    n,
                    marking: l.marking,
                });
            }
            seen[l.marking] = true;
        }
        Ok(TropicalCurve {
            generators,
            vertices,
            edges,
            legs,
        })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    /// Number of markings.
    pub fn n(&self) -> usize {
        self.legs.len()
    }

    fn vertex(&self, id: VertexId) -> &Vertex {
        self.vertices
            .iter()
            .find(|v| v.id == id)
            .expect("validated vertex id")
    }

    fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut repr: BTreeMap<VertexId, VertexId> =
            self.vertices.iter().map(|v| (v.id, v.id)).collect();
        fn find(repr: &mut BTreeMap<VertexId, VertexId>, x: VertexId) -> VertexId {
            let parent = repr[&x];
            if parent == x {
                return x;
            }
            let root = find(repr, parent);
            repr.insert(x, root);
            root
        }
        for e in &self.edges {
            let (a, b) = (find(&mut repr, e.ends.0), find(&mut repr, e.ends.1));
            if a != b {
                repr.insert(a, b);
            }
        }
        let mut groups: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
        for v in &self.vertices {
            let r = find(&mut repr, v.id);
            groups.entry(r).or_default().insert(v.id);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// First Betti number plus the sum of vertex genera.
    pub fn genus(&self) -> u32 {
        let b1 =
            self.edges.len() as i64 - self.vertices.len() as i64 + self.components().len() as i64;
        (b1 + self.vertices.iter().map(|v| v.genus as i64).sum::<i64>()) as u32
    }

    /// Edge endpoints at `v` (a loop counts twice) plus legs at `v`.
    pub fn valence(&self, v: VertexId) -> usize {
        let from_edges: usize = self
            .edges
            .iter()
            .map(|e| usize::from(e.ends.0 == v) + usize::from(e.ends.1 == v))
            .sum();
        from_edges + self.legs.iter().filter(|l| l.root == v).count()
    }

    /// Connected, not an isolated genus-one vertex, and every genus-zero
    /// vertex has valence at least three.
    pub fn is_stable(&self) -> bool {
        if !self.is_connected() {
            return false;
        }
        if self.vertices.len() == 1
            && self.edges.is_empty()
            && self.legs.is_empty()
            && self.vertices[0].genus == 1
        {
            return false;
        }
        self.vertices
            .iter()
            .all(|v| v.genus > 0 || self.valence(v.id) >= 3)
    }

    /// The minimal connected vertex-induced subgraph of full genus: either
    /// the unique genus-one vertex or the unique cycle.
    pub fn core(&self) -> Result<BTreeSet<VertexId>, TropicalError> {
        if !self.is_connected() {
            return Err(TropicalError::NotConnected);
        }
        if self.genus() != 1 {
            return Err(TropicalError::WrongGenus(self.genus()));
        }
        let mut alive: BTreeSet<VertexId> = self.vertices.iter().map(|v| v.id).collect();
        let mut edges: Vec<(VertexId, VertexId)> = self.edges.iter().map(|e| e.ends).collect();
        loop {
            let leaf = alive.iter().copied().find(|&v| {
                self.vertex(v).genus == 0
                    && edges
                        .iter()
                        .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
                        .sum::<usize>()
                        <= 1
            });
            match leaf {
                Some(v) => {
                    alive.remove(&v);
                    edges.retain(|&(a, b)| a != v && b != v);
                }
                None => break,
            }
        }
        Ok(alive)
    }

    /// Distance from the core for every vertex: zero on the core, the sum of
    /// edge lengths along the unique path otherwise. Leg slopes are one
    /// everywhere.
    pub fn core_distances(&self) -> Result<BTreeMap<VertexId, MonoidElement>, TropicalError> {
        let core = self.core()?;
        let mut dist: BTreeMap<VertexId, MonoidElement> =
            core.iter().map(|&v| (v, MonoidElement::zero())).collect();
        let mut frontier: Vec<VertexId> = core.iter().copied().collect();
        while let Some(v) = frontier.pop() {
            for e in &self.edges {
                let other = if e.ends.0 == v {
                    e.ends.1
                } else if e.ends.1 == v {
                    e.ends.0
                } else {
                    continue;
                };
                if !dist.contains_key(&other) {
                    let d = dist[&v].add(&e.length);
                    dist.insert(other, d);
                    frontier.push(other);
                }
            }
        }
        Ok(dist)
    }

    /// The ordered radii, the core edge lengths, and whether the curve is
    /// basic. Fails with a witness pair when two distances are incomparable.
    pub fn radial_structure(&self) -> Result<RadialData, TropicalError> {
        if !self.is_stable() {
            return Err(TropicalError::NotStable);
        }
        let dist = self.core_distances()?;
        let entries: Vec<(&VertexId, &MonoidElement)> = dist.iter().collect();
        for (i, (v, dv)) in entries.iter().enumerate() {
            for (w, dw) in entries.iter().skip(i + 1) {
                if !dv.comparable(dw) {
                    return Err(TropicalError::NotAligned {
                        v: **v,
                        w: **w,
                        dv: (*dv).clone(),
                        dw: (*dw).clone(),
                    });
                }
            }
        }
        let mut radii: Vec<MonoidElement> =
            dist.values().filter(|d| !d.is_zero()).cloned().collect();
        radii.sort_by(|a, b| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if a.divides(b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        radii.dedup();

        let core = self.core()?;
        let mut core_edge_lengths: Vec<MonoidElement> = self
            .edges
            .iter()
            .filter(|e| core.contains(&e.ends.0) && core.contains(&e.ends.1))
            .map(|e| e.length.clone())
            .collect();
        core_edge_lengths.sort();

        // Basic: the radius differences and the core edge lengths are,
        // together, exactly the standard basis of the monoid.
        let mut basis_names: Vec<String> = Vec::new();
        let mut basic = true;
        let mut prev = MonoidElement::zero();
        for r in &radii {
            match prev
                .difference_to(r)
                .as_ref()
                .and_then(|d| d.is_unit_generator().map(str::to_string))
            {
                Some(name) => basis_names.push(name),
                None => basic = false,
            }
            prev = r.clone();
        }
        for d in &core_edge_lengths {
            match d.is_unit_generator() {
                Some(name) => basis_names.push(name.to_string()),
                None => basic = false,
            }
        }
        if basic {
            let mut sorted = basis_names.clone();
            sorted.sort_unstable();
            sorted.dedup();
            let mut gens = self.generators.clone();
            gens.sort_unstable();
            basic = sorted.len() == basis_names.len() && sorted == gens;
        }
        Ok(RadialData {
            radii,
            core_edge_lengths,
            basic,
        })
    }

    /// The partition of the markings given by subdividing at distance `rho`
    /// from the core and deleting everything strictly closer: two markings
    /// share a block iff their legs land in the same surviving component; a
    /// leg rooted strictly below `rho` is cut and becomes a singleton.
    pub fn partition_at_radius(&self, rho: &MonoidElement) -> Result<SetPartition, TropicalError> {
        let dist = self.core_distances()?;
        let radial = self.radial_structure()?;
        if !rho.is_zero() {
            if let Some(max) = radial.radii.last() {
                if !rho.divides(max) {
                    return Err(TropicalError::NotARadius(rho.clone()));
                }
            } else {
                return Err(TropicalError::NotARadius(rho.clone()));
            }
        }
        for (v, dv) in &dist {
            if !rho.comparable(dv) {
                return Err(TropicalError::IncomparableRadius {
                    rho: rho.clone(),
                    v: *v,
                    dv: dv.clone(),
                });
            }
        }
        let survives = |v: VertexId| rho.divides(&dist[&v]);
        // union-find over surviving vertices
        let mut repr: BTreeMap<VertexId, VertexId> = self
            .vertices
            .iter()
            .filter(|v| survives(v.id))
            .map(|v| (v.id, v.id))
            .collect();
        fn find(repr: &mut BTreeMap<VertexId, VertexId>, x: VertexId) -> VertexId {
            let parent = repr[&x];
            if parent == x {
                return x;
            }
            let root = find(repr, parent);
            repr.insert(x, root);
            root
        }
        for e in &self.edges {
            if survives(e.ends.0) && survives(e.ends.1) {
                let (a, b) = (find(&mut repr, e.ends.0), find(&mut repr, e.ends.1));
                if a != b {
                    repr.insert(a, b);
                }
            }
        }
        let mut blocks: BTreeMap<Option<VertexId>, Vec<usize>> = BTreeMap::new();
        let mut singles: Vec<Vec<usize>> = Vec::new();
        for l in &self.legs {
            if survives(l.root) {
                let r = find(&mut repr, l.root);
                blocks.entry(Some(r)).or_default().push(l.marking);
            } else {
                singles.push(vec![l.marking]);
            }
        }
        let mut all: Vec<Vec<usize>> = blocks.into_values().collect();
        all.extend(singles);
        Ok(SetPartition::new(self.n(), all)?)
    }

    /// The strict chain `part(rho_1) < ... < part(rho_k)`.
    pub fn partition_type(&self) -> Result<PartitionChain, TropicalError> {
        let radial = self.radial_structure()?;
        let parts = radial
            .radii
            .iter()
            .map(|rho| self.partition_at_radius(rho))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PartitionChain::new(self.n(), parts)?)
    }

    /// Weighted edge contraction along a monoid homomorphism: edges whose
    /// length maps to zero are contracted, merging their endpoints into a
    /// vertex carrying the genus of the contracted subgraph; surviving edges
    /// keep their mapped lengths and legs keep their markings.
    pub fn contract(&self, hom: &MonoidHom) -> Result<TropicalCurve, TropicalError> {
        let images: Vec<MonoidElement> = self
            .edges
            .iter()
            .map(|e| hom.apply(&e.length))
            .collect::<Result<_, _>>()?;
        let mut repr: BTreeMap<VertexId, VertexId> =
            self.vertices.iter().map(|v| (v.id, v.id)).collect();
        fn find(repr: &mut BTreeMap<VertexId, VertexId>, x: VertexId) -> VertexId {
            let parent = repr[&x];
            if parent == x {
                return x;
            }
            let root = find(repr, parent);
            repr.insert(x, root);
            root
        }
        for (e, image) in self.edges.iter().zip(&images) {
            if image.is_zero() {
                let (a, b) = (find(&mut repr, e.ends.0), find(&mut repr, e.ends.1));
                if a != b {
                    repr.insert(a, b);
                }
            }
        }
        // classes keyed by minimal member id
        let mut classes: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for v in &self.vertices {
            let r = find(&mut repr, v.id);
            classes.entry(r).or_default().push(v.id);
        }
        let class_key: BTreeMap<VertexId, VertexId> = classes
            .values()
            .flat_map(|members| {
                let key = *members.iter().min().unwrap();
                members.iter().map(move |&m| (m, key))
            })
            .collect();
        let mut new_vertices = Vec::new();
        for members in classes.values() {
            let key = *members.iter().min().unwrap();
            let contracted_edges = self
                .edges
                .iter()
                .zip(&images)
                .filter(|(e, image)| image.is_zero() && class_key[&e.ends.0] == key)
                .count();
            let b1 = contracted_edges as i64 - members.len() as i64 + 1;
            let genus: i64 = members
                .iter()
                .map(|&m| self.vertex(m).genus as i64)
                .sum::<i64>()
                + b1;
            new_vertices.push(Vertex {
                id: key,
                genus: genus as u32,
            });
        }
        let new_edges = self
            .edges
            .iter()
            .zip(&images)
            .filter(|(_, image)| !image.is_zero())
            .map(|(e, image)| Edge {
                ends: (class_key[&e.ends.0], class_key[&e.ends.1]),
                length: image.clone(),
            })
            .collect();
        let new_legs = self
            .legs
            .iter()
            .map(|l| Leg {
                marking: l.marking,
                root: class_key[&l.root],
            })
            .collect();
        TropicalCurve::new(
            hom.target_generators().to_vec(),
            new_vertices,
            new_edges,
            new_legs,
        )
    }

    /// The face contraction sending the listed generators to zero.
    pub fn contract_killing(&self, killed: &[&str]) -> Result<TropicalCurve, TropicalError> {
        self.contract(&MonoidHom::killing(&self.generators, killed))
    }

    /// Repeatedly removes bare genus-zero valence-one vertices and merges
    /// through bare genus-zero valence-two vertices, summing the spliced edge
    /// lengths. Distances from the core of surviving vertices are unchanged.
    pub fn stabilize(&self) -> Result<TropicalCurve, TropicalError> {
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        let mut legs = self.legs.clone();
        // vertices processed in id order for determinism; the result is
        // order-independent (confluence is tested)
        vertices.sort_by_key(|v| v.id);
        loop {
            enum Rule {
                DropLeaf(VertexId),
                MoveLegDown(VertexId),
                Splice(VertexId),
            }
            let rule = vertices.iter().find_map(|v| {
                if v.genus != 0 {
                    return None;
                }
                let incident: Vec<&Edge> = edges
                    .iter()
                    .filter(|e| e.ends.0 == v.id || e.ends.1 == v.id)
                    .collect();
                let edge_ends: usize = incident
                    .iter()
                    .map(|e| usize::from(e.ends.0 == v.id) + usize::from(e.ends.1 == v.id))
                    .sum();
                let leg_count = legs.iter().filter(|l| l.root == v.id).count();
                match (edge_ends, leg_count) {
                    (1, 0) => Some(Rule::DropLeaf(v.id)),
                    (1, 1) => Some(Rule::MoveLegDown(v.id)),
                    (2, 0) if incident.len() == 2 => Some(Rule::Splice(v.id)),
                    _ => None,
                }
            });
            match rule {
                Some(Rule::DropLeaf(v)) => {
                    edges.retain(|e| e.ends.0 != v && e.ends.1 != v);
                    vertices.retain(|w| w.id != v);
                }
                Some(Rule::MoveLegDown(v)) => {
                    let e = edges
                        .iter()
                        .position(|e| e.ends.0 == v || e.ends.1 == v)
                        .expect("incident edge");
                    let other = if edges[e].ends.0 == v {
                        edges[e].ends.1
                    } else {
                        edges[e].ends.0
                    };
                    for l in legs.iter_mut().filter(|l| l.root == v) {
                        l.root = other;
                    }
                    edges.remove(e);
                    vertices.retain(|w| w.id != v);
                }
                Some(Rule::Splice(v)) => {
                    let incident: Vec<usize> = edges
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| e.ends.0 == v || e.ends.1 == v)
                        .map(|(i, _)| i)
                        .collect();
                    let (i, j) = (incident[0], incident[1]);
                    let other = |e: &Edge| if e.ends.0 == v { e.ends.1 } else { e.ends.0 };
                    let a = other(&edges[i]);
                    let b = other(&edges[j]);
                    let length = edges[i].length.add(&edges[j].length);
                    edges.remove(j);
                    edges.remove(i);
                    edges.push(Edge {
                        ends: (a.min(b), a.max(b)),
                        length,
                    });
                    vertices.retain(|w| w.id != v);
                }
                None => break,
            }
        }
        let out = TropicalCurve::new(self.generators.clone(), vertices, edges, legs)?;
        if !out.is_stable() {
            return Err(TropicalError::Unstabilizable);
        }
        Ok(out)
    }

    /// Automorphism group of a basic radially aligned curve: order two when
    /// the core is a self-loop (loop reversal) or a two-vertex two-edge cycle
    /// (edge exchange), trivial otherwise.
    pub fn automorphisms(&self) -> Result<AutomorphismGroup, TropicalError> {
        let radial = self.radial_structure()?;
        if !radial.basic {
            return Err(TropicalError::NotBasic);
        }
        let core = self.core()?;
        let core_edges: Vec<&Edge> = self
            .edges
            .iter()
            .filter(|e| core.contains(&e.ends.0) && core.contains(&e.ends.1))
            .collect();
        if core.len() == 1 && core_edges.len() == 1 {
            return Ok(AutomorphismGroup {
                order: 2,
                generator: Some(CoreSymmetry::LoopReversal),
            });
        }
        if core.len() == 2 && core_edges.len() == 2 {
            return Ok(AutomorphismGroup {
                order: 2,
                generator: Some(CoreSymmetry::CoreEdgeSwap),
            });
        }
        Ok(AutomorphismGroup {
            order: 1,
            generator: None,
        })
    }

    /// Structural isomorphism test for stable basic radially aligned curves.
    ///
    /// Vertices of such curves are uniquely identified by their radius level
    /// and outward marking set, tree edge lengths are radius differences, and
    /// core edge lengths are freely interchangeable generators, so comparing
    /// canonical signatures decides isomorphism.
    pub fn basic_aligned_isomorphic(&self, other: &TropicalCurve) -> Result<bool, TropicalError> {
        Ok(self.aligned_signature()? == other.aligned_signature()?)
    }

    fn aligned_signature(&self) -> Result<AlignedSignature, TropicalError> {
        let radial = self.radial_structure()?;
        if !radial.basic {
            return Err(TropicalError::NotBasic);
        }
        let dist = self.core_distances()?;
        let core = self.core()?;
        let level = |v: VertexId| -> usize {
            let d = &dist[&v];
            if d.is_zero() {
                0
            } else {
                radial.radii.iter().position(|r| r == d).unwrap() + 1
            }
        };
        // outward markings: markings reachable without entering core edges
        // and without stepping toward the core
        let mut outward: BTreeMap<VertexId, BTreeSet<usize>> = BTreeMap::new();
        let mut order: Vec<VertexId> = self.vertices.iter().map(|v| v.id).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(level(v)));
        for &v in &order {
            let mut set: BTreeSet<usize> = self
                .legs
                .iter()
                .filter(|l| l.root == v)
                .map(|l| l.marking)
                .collect();
            for e in &self.edges {
                for (a, b) in [(e.ends.0, e.ends.1), (e.ends.1, e.ends.0)] {
                    if a == v && level(b) > level(v) {
                        set.extend(outward.get(&b).into_iter().flatten().copied());
                    }
                }
            }
            outward.insert(v, set);
        }
        let key = |v: VertexId| {
            (
                level(v),
                self.vertex(v).genus,
                outward[&v].clone(),
                self.legs
                    .iter()
                    .filter(|l| l.root == v)
                    .map(|l| l.marking)
                    .collect::<BTreeSet<_>>(),
            )
        };
        let mut vertex_keys: Vec<_> = self.vertices.iter().map(|v| key(v.id)).collect();
        vertex_keys.sort();
        let mut tree_edges = Vec::new();
        let mut core_edges = Vec::new();
        for e in &self.edges {
            let (mut a, mut b) = (key(e.ends.0), key(e.ends.1));
            if b < a {
                std::mem::swap(&mut a, &mut b);
            }
            if core.contains(&e.ends.0) && core.contains(&e.ends.1) {
                core_edges.push((a, b));
            } else {
                tree_edges.push((a, b));
            }
        }
        tree_edges.sort();
        core_edges.sort();
        let mut leg_keys: Vec<_> = self.legs.iter().map(|l| (l.marking, key(l.root))).collect();
        leg_keys.sort();
        Ok(AlignedSignature {
            n: self.n(),
            levels: radial.radii.len(),
            vertex_keys,
            tree_edges,
            core_edges,
            leg_keys,
        })
    }
}

type VKey = (usize, u32, BTreeSet<usize>, BTreeSet<usize>);

#[derive(PartialEq, Eq)]
struct AlignedSignature {
    n: usize,
    levels: usize,
    vertex_keys: Vec<VKey>,
    tree_edges: Vec<(VKey, VKey)>,
    core_edges: Vec<(VKey, VKey)>,
    leg_keys: Vec<(usize, VKey)>,
}

impl fmt::Debug for TropicalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TropicalCurve(")?;
        for v in &self.vertices {
            write!(f, "v{}:g{} ", v.id, v.genus)?;
        }
        for e in &self.edges {
            write!(f, "e({}-{}:{}) ", e.ends.0, e.ends.1, e.length)?;
        }
        for l in &self.legs {
            write!(f, "l{}@{} ", l.marking, l.root)?;
        }
        write!(f, ")")
    }
}

/// Builds the layered nodal model of a strict chain: one rational vertex per
/// block per layer, consecutive layers joined by edges of length `e_i`, legs
/// at the top layer, then stabilizes. Attachments to cycle cores are
/// distributed round-robin.
pub fn build_test_curve(
    chain: &PartitionChain,
    core: CoreKind,
) -> Result<TropicalCurve, TropicalError> {
    let slots = attachment_slots(chain);
    let j = core_size(core)?;
    if j > slots {
        return Err(TropicalError::CycleTooLong { j, slots });
    }
    let assignment: Vec<usize> = (0..slots).map(|t| t % j).collect();
    build_test_curve_distributed(chain, core, &assignment)
}

/// Number of independent attachments the chain offers: the blocks of the
/// first partition, or the markings themselves for the empty chain.
pub fn attachment_slots(chain: &PartitionChain) -> usize {
    chain
        .partitions()
        .first()
        .map(|p| p.num_blocks())
        .unwrap_or(chain.n())
}

fn core_size(core: CoreKind) -> Result<usize, TropicalError> {
    match core {
        CoreKind::SmoothVertex => Ok(1),
        CoreKind::Cycle(0) => Err(TropicalError::EmptyCycle),
        CoreKind::Cycle(j) => Ok(j),
    }
}

/// As [`build_test_curve`] but with an explicit assignment of attachment
/// slots to core vertices; the assignment must reach every core vertex.
pub fn build_test_curve_distributed(
    chain: &PartitionChain,
    core: CoreKind,
    assignment: &[usize],
) -> Result<TropicalCurve, TropicalError> {
    build_raw_test_curve(chain, core, assignment)?.stabilize()
}

/// The unstabilized layered model, exposed so tests can compare against the
/// stabilization pipeline.
pub fn build_raw_test_curve(
    chain: &PartitionChain,
    core: CoreKind,
    assignment: &[usize],
) -> Result<TropicalCurve, TropicalError> {
    let n = chain.n();
    let k = chain.len();
    let slots = attachment_slots(chain);
    let core_vertices = match core {
        CoreKind::SmoothVertex => 1,
        CoreKind::Cycle(j) => {
            if j == 0 {
                return Err(TropicalError::EmptyCycle);
            }
            j
        }
    };
    if assignment.len() != slots || assignment.iter().any(|&a| a >= core_vertices) {
        return Err(TropicalError::BadAssignment);
    }
    if matches!(core, CoreKind::Cycle(_)) {
        let covered: BTreeSet<usize> = assignment.iter().copied().collect();
        if covered.len() != core_vertices {
            return Err(TropicalError::AssignmentNotSurjective);
        }
    }

    let mut generators: Vec<String> = (1..=k).map(|i| format!("e{i}")).collect();
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    match core {
        CoreKind::SmoothVertex => vertices.push(Vertex { id: 0, genus: 1 }),
        CoreKind::Cycle(j) => {
            for v in 0..j {
                vertices.push(Vertex { id: v, genus: 0 });
            }
            if j == 1 {
                generators.push("d1".into());
                edges.push(Edge {
                    ends: (0, 0),
                    length: MonoidElement::generator("d1"),
                });
            } else {
                for i in 0..j {
                    let name = format!("d{}", i + 1);
                    generators.push(name.clone());
                    edges.push(Edge {
                        ends: (i, (i + 1) % j),
                        length: MonoidElement::generator(name),
                    });
                }
            }
        }
    }

    let mut next_id = vertices.len();
    // vid[i][b] = vertex of block b of chain[i]
    let mut vid: Vec<Vec<VertexId>> = Vec::new();
    for (i, p) in chain.partitions().iter().enumerate() {
        let length = MonoidElement::generator(format!("e{}", i + 1));
        let mut layer = Vec::new();
        for (b, block) in p.blocks().iter().enumerate() {
            let v = next_id;
            next_id += 1;
            vertices.push(Vertex { id: v, genus: 0 });
            let parent = if i == 0 {
                assignment[b]
            } else {
                let prev = &chain.partitions()[i - 1];
                let t = prev
                    .blocks()
                    .iter()
                    .position(|tb| tb.contains(&block[0]))
                    .expect("chain refines");
                vid[i - 1][t]
            };
            edges.push(Edge {
                ends: (parent, v),
                length: length.clone(),
            });
            layer.push(v);
        }
        vid.push(layer);
    }

    let legs = if k == 0 {
        (1..=n)
            .map(|marking| Leg {
                marking,
                root: assignment[marking - 1],
            })
            .collect()
    } else {
        let top = &chain.partitions()[k - 1];
        (1..=n)
            .map(|marking| {
                let b = top
                    .blocks()
                    .iter()
                    .position(|bb| bb.contains(&marking))
                    .expect("top partition covers");
                Leg {
                    marking,
                    root: vid[k - 1][b],
                }
            })
            .collect()
    };
    TropicalCurve::new(generators, vertices, edges, legs)
}

/// All strict chains of non-discrete partitions of `{1..n}`, optionally
/// including the empty chain, in a deterministic order.
pub fn enumerate_chains(
    n: usize,
    include_empty: bool,
) -> Result<Vec<PartitionChain>, TropicalError> {
    let parts: Vec<SetPartition> = crate::partitions::enumerate_partitions(n)?
        .into_iter()
        .filter(|p| !p.is_discrete())
        .collect();
    let mut out = Vec::new();
    if include_empty {
        out.push(PartitionChain::empty(n));
    }
    fn rec(
        parts: &[SetPartition],
        stack: &mut Vec<SetPartition>,
        n: usize,
        out: &mut Vec<PartitionChain>,
    ) {
        for p in parts {
            if stack
                .last()
                .map(|last| last.strictly_refined_by(p))
                .unwrap_or(true)
            {
                stack.push(p.clone());
                out.push(PartitionChain::new(n, stack.clone()).expect("built strictly"));
                rec(parts, stack, n, out);
                stack.pop();
            }
        }
    }
    rec(&parts, &mut Vec::new(), n, &mut out);
    out.sort();
    Ok(out)
}

/// Every stabilized test curve for `n`: all chains (including the empty
/// chain), all core kinds up to the attachment bound, and all surjective
/// attachment assignments. Covers every stable basic radially aligned curve
/// up to isomorphism.
pub fn enumerate_test_curves(n: usize) -> Result<Vec<TropicalCurve>, TropicalError> {
    let mut out = Vec::new();
    for chain in enumerate_chains(n, true)? {
        let slots = attachment_slots(&chain);
        out.push(build_test_curve(&chain, CoreKind::SmoothVertex)?);
        for j in 1..=slots {
            for assignment in surjections(slots, j) {
                out.push(build_test_curve_distributed(
                    &chain,
                    CoreKind::Cycle(j),
                    &assignment,
                )?);
            }
        }
    }
    Ok(out)
}

/// All surjective assignments of `slots` items onto `j` targets.
pub fn surjections(slots: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut acc = vec![0usize; slots];
    fn rec(pos: usize, j: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == acc.len() {
            let covered: BTreeSet<usize> = acc.iter().copied().collect();
            if covered.len() == j {
                out.push(acc.clone());
            }
            return;
        }
        for t in 0..j {
            acc[pos] = t;
            rec(pos + 1, j, acc, out);
        }
    }
    rec(0, j, &mut acc, &mut out);
    out
}
