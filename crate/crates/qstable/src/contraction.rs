//! Contraction of radially aligned curves to combinatorial types: subdivide
//! at a radius, contract everything strictly closer to the core into an
//! elliptic singularity whose level is the partition at that radius, and
//! drive the whole pipeline from a stability condition. The
//! exactly-one-contraction property is exposed as a runtime-checked theorem.

use crate::curvetype::{CombinatorialType, Component, Singularity, StabilityFailure, TypeError};
use crate::monoid::MonoidElement;
use crate::qcond::QCondition;
use crate::tropical::{
    build_test_curve, CoreKind, PartitionChain, TropicalCurve, TropicalError, VertexId,
};
use crate::uradius::{RadiusError, UniversalRadius};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContractionError {
    #[error(transparent)]
    Tropical(#[from] TropicalError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Radius(#[from] RadiusError),
    #[error("contraction output is not stable for the driving condition: {failure:?}")]
    StabilityViolated { failure: StabilityFailure },
    #[error("exactly-one-contraction violated: stable indices {stable:?} out of {total}")]
    ExactlyOneViolated { stable: Vec<usize>, total: usize },
}

/// Where a node of the contracted type came from: a surviving edge, or the
/// upper part of an edge that was cut at the contraction radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeSource {
    Edge(usize),
    UpperPart(usize),
}

/// The combinatorial type of the contraction at `rho` together with the
/// provenance of each node.
pub fn contract_at_radius_traced(
    curve: &TropicalCurve,
    rho: &MonoidElement,
) -> Result<(CombinatorialType, BTreeMap<usize, NodeSource>), ContractionError> {
    let radial = curve.radial_structure()?;
    if !rho.is_zero() && !radial.radii.contains(rho) {
        return Err(TropicalError::NotARadius(rho.clone()).into());
    }
    let dist = curve.core_distances()?;
    let n = curve.n();

    let mut components: Vec<Component> = Vec::new();
    let mut singularities: Vec<Singularity> = Vec::new();
    let mut incidence: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut sources: BTreeMap<usize, NodeSource> = BTreeMap::new();

    if rho.is_zero() {
        // the nodal type of the curve itself
        let mut comp_of: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut vertex_ids: Vec<VertexId> = curve.vertices().iter().map(|v| v.id).collect();
        vertex_ids.sort_unstable();
        for (i, &v) in vertex_ids.iter().enumerate() {
            comp_of.insert(v, i);
            let genus = curve.vertices().iter().find(|w| w.id == v).unwrap().genus;
            components.push(Component {
                id: i,
                genus,
                markings: curve
                    .legs()
                    .iter()
                    .filter(|l| l.root == v)
                    .map(|l| l.marking)
                    .collect(),
            });
        }
        for (i, e) in curve.edges().iter().enumerate() {
            let sing = singularities.len();
            singularities.push(Singularity {
                id: sing,
                sgenus: 0,
            });
            sources.insert(sing, NodeSource::Edge(i));
            *incidence.entry((comp_of[&e.ends.0], sing)).or_insert(0) += 1;
            *incidence.entry((comp_of[&e.ends.1], sing)).or_insert(0) += 1;
        }
        let t = CombinatorialType::new(n, components, singularities, incidence)?;
        return Ok((t, sources));
    }

    let survives = |v: VertexId| rho.divides(&dist[&v]);
    let mut comp_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut survivor_ids: Vec<VertexId> = curve
        .vertices()
        .iter()
        .filter(|v| survives(v.id))
        .map(|v| v.id)
        .collect();
    survivor_ids.sort_unstable();
    for &v in &survivor_ids {
        let id = components.len();
        comp_of.insert(v, id);
        let genus = curve.vertices().iter().find(|w| w.id == v).unwrap().genus;
        components.push(Component {
            id,
            genus,
            markings: curve
                .legs()
                .iter()
                .filter(|l| l.root == v && survives(l.root))
                .map(|l| l.marking)
                .collect(),
        });
    }

    // the elliptic singularity collects one branch per boundary touch
    let elliptic = usize::MAX; // patched to a real id at the end
    let mut elliptic_touches: Vec<usize> = Vec::new();

    for (i, e) in curve.edges().iter().enumerate() {
        let (a, b) = e.ends;
        match (survives(a), survives(b)) {
            (true, true) => {
                let sing = singularities.len();
                singularities.push(Singularity {
                    id: sing,
                    sgenus: 0,
                });
                sources.insert(sing, NodeSource::Edge(i));
                *incidence.entry((comp_of[&a], sing)).or_insert(0) += 1;
                *incidence.entry((comp_of[&b], sing)).or_insert(0) += 1;
            }
            (true, false) | (false, true) => {
                let upper = if survives(a) { a } else { b };
                if dist[&upper] == *rho {
                    // the cut lands on the vertex itself: it bounds the
                    // contracted region
                    elliptic_touches.push(comp_of[&upper]);
                } else {
                    // strict crossing: a synthetic rational component carries
                    // the singular point and a node to the upper vertex
                    let stub = components.len();
                    components.push(Component {
                        id: stub,
                        genus: 0,
                        markings: Default::default(),
                    });
                    let sing = singularities.len();
                    singularities.push(Singularity {
                        id: sing,
                        sgenus: 0,
                    });
                    sources.insert(sing, NodeSource::UpperPart(i));
                    *incidence.entry((stub, sing)).or_insert(0) += 1;
                    *incidence.entry((comp_of[&upper], sing)).or_insert(0) += 1;
                    elliptic_touches.push(stub);
                }
            }
            (false, false) => {}
        }
    }

    for l in curve.legs() {
        if !survives(l.root) {
            // the leg crosses the radius: its tail is a synthetic component
            // carrying the marking and the singular point
            let stub = components.len();
            components.push(Component {
                id: stub,
                genus: 0,
                markings: [l.marking].into(),
            });
            elliptic_touches.push(stub);
        }
    }

    let sing = singularities.len();
    singularities.push(Singularity {
        id: sing,
        sgenus: 1,
    });
    elliptic_touches.sort_unstable();
    elliptic_touches.dedup();
    for comp in elliptic_touches {
        *incidence.entry((comp, sing)).or_insert(0) += 1;
    }
    let _ = elliptic;
    let t = CombinatorialType::new(n, components, singularities, incidence)?;
    Ok((t, sources))
}

/// The combinatorial type of the contraction at `rho`: at radius zero the
/// nodal type of the curve; at a positive radius the locus strictly inside
/// the radius becomes an elliptic singularity whose level is the partition at
/// that radius.
pub fn contract_at_radius(
    curve: &TropicalCurve,
    rho: &MonoidElement,
) -> Result<CombinatorialType, ContractionError> {
    contract_at_radius_traced(curve, rho).map(|(t, _)| t)
}

/// Contracts at the radius a condition assigns to the curve, asserting the
/// output is stable for that condition.
pub fn contract_for_condition(
    curve: &TropicalCurve,
    q: &QCondition,
) -> Result<CombinatorialType, ContractionError> {
    let rho = UniversalRadius::from_condition(q.clone()).radius_on(curve)?;
    let t = contract_at_radius(curve, &rho)?;
    let verdict = t.is_stable_for(q);
    if !verdict.stable {
        return Err(ContractionError::StabilityViolated {
            failure: verdict.failure.expect("unstable verdict carries a reason"),
        });
    }
    Ok(t)
}

/// The contractions of a chain's test curve at each of its radii, from the
/// nodal type at radius zero up the chain.
pub fn contraction_family(
    chain: &PartitionChain,
    core: CoreKind,
) -> Result<Vec<CombinatorialType>, ContractionError> {
    let curve = build_test_curve(chain, core)?;
    family_of_curve(&curve)
}

/// The contractions of an explicit radially aligned curve at each radius.
pub fn family_of_curve(curve: &TropicalCurve) -> Result<Vec<CombinatorialType>, ContractionError> {
    let radial = curve.radial_structure()?;
    let mut radii = vec![MonoidElement::zero()];
    radii.extend(radial.radii);
    radii
        .iter()
        .map(|rho| contract_at_radius(curve, rho))
        .collect()
}

/// The index of the unique member of the chain's contraction family that is
/// stable for the condition; an error listing the stable indices when
/// uniqueness fails, which would contradict the exactly-one theorem.
pub fn verify_exactly_one(
    chain: &PartitionChain,
    core: CoreKind,
    q: &QCondition,
) -> Result<usize, ContractionError> {
    let family = contraction_family(chain, core)?;
    let stable: Vec<usize> = family
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_stable_for(q).stable)
        .map(|(i, _)| i)
        .collect();
    match stable.as_slice() {
        [unique] => Ok(*unique),
        _ => Err(ContractionError::ExactlyOneViolated {
            stable,
            total: family.len(),
        }),
    }
}
