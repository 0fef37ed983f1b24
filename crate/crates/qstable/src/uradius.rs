//! Universal radii: compatible choices of a radius on every basic radially
//! aligned curve, equivalent data to a stability condition. A universal
//! radius is stored as its condition; the radius it assigns to any given
//! curve is recovered lazily, and compatibility under face contractions is a
//! checkable property rather than stored data.

use crate::monoid::MonoidElement;
use crate::partitions::SetPartition;
use crate::qcond::{QCondError, QCondition};
use crate::tropical::{build_test_curve, CoreKind, PartitionChain, TropicalCurve, TropicalError};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RadiusError {
    #[error("the discrete partition has no 1-layer tree")]
    DiscretePartition,
    #[error(
        "assignment is not downward closed: {member} has nonzero radius but its \
         coarsening {missing} does not; the 2-layer witness curve contracts to both"
    )]
    NotDownwardClosed {
        member: SetPartition,
        missing: SetPartition,
        /// Test curve of the chain `missing < member`; contracting its outer
        /// edge forces a nonzero radius on the missing partition's tree.
        witness: Box<TropicalCurve>,
    },
    #[error(transparent)]
    Condition(QCondError),
    #[error(transparent)]
    Tropical(#[from] TropicalError),
}

/// The 1-layer tree of a non-discrete partition: a genus-one vertex with one
/// rational vertex per block at a common radius, stabilized. These trees are
/// in bijection with the non-discrete partitions.
pub fn one_layer_tree(p: &SetPartition) -> Result<TropicalCurve, RadiusError> {
    if p.is_discrete() {
        return Err(RadiusError::DiscretePartition);
    }
    let chain = PartitionChain::new(p.n(), vec![p.clone()]).expect("single non-discrete entry");
    Ok(build_test_curve(&chain, CoreKind::SmoothVertex)?)
}

/// A universal radius, canonically represented by its stability condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalRadius {
    condition: QCondition,
}

impl UniversalRadius {
    /// The radius assignment determined by a condition: each curve gets the
    /// largest radius whose partition lies in the condition.
    pub fn from_condition(condition: QCondition) -> Self {
        UniversalRadius { condition }
    }

    pub fn condition(&self) -> &QCondition {
        &self.condition
    }

    pub fn n(&self) -> usize {
        self.condition.n()
    }

    /// Builds a universal radius from a choice of zero/nonzero radius per
    /// 1-layer tree, keyed by the tree's partition. Fails with the two-layer
    /// witness curve when the nonzero set is not downward closed.
    pub fn from_assignment(
        n: usize,
        nonzero: &BTreeSet<SetPartition>,
    ) -> Result<Self, RadiusError> {
        match QCondition::validate(n, nonzero.iter().cloned()) {
            Ok(condition) => Ok(UniversalRadius { condition }),
            Err(QCondError::NotDownwardClosed { member, missing }) => {
                let chain = PartitionChain::new(n, vec![missing.clone(), member.clone()])
                    .expect("cover pair is a strict chain");
                let witness = build_test_curve(&chain, CoreKind::SmoothVertex)?;
                Err(RadiusError::NotDownwardClosed {
                    member,
                    missing,
                    witness: Box::new(witness),
                })
            }
            Err(other) => Err(RadiusError::Condition(other)),
        }
    }

    /// The nonzero-radius partitions, i.e. the assignment on 1-layer trees.
    pub fn to_assignment(&self) -> BTreeSet<SetPartition> {
        self.condition.members().clone()
    }

    /// The radius assigned to a radially aligned curve: the largest radius
    /// whose partition lies in the condition, or zero when none does.
    pub fn radius_on(&self, curve: &TropicalCurve) -> Result<MonoidElement, RadiusError> {
        let radial = curve.radial_structure()?;
        let mut chosen = MonoidElement::zero();
        for rho in &radial.radii {
            if self.condition.contains(&curve.partition_at_radius(rho)?) {
                chosen = rho.clone();
            }
        }
        Ok(chosen)
    }

    /// Checks the face-contraction compatibility axiom on one curve: for
    /// every single-generator contraction, the image of the assigned radius
    /// equals the radius assigned to the contracted curve.
    pub fn compatible_on(&self, curve: &TropicalCurve) -> Result<bool, RadiusError> {
        let rho = self.radius_on(curve)?;
        for g in curve.generators() {
            let hom = crate::monoid::MonoidHom::killing(curve.generators(), &[g.as_str()]);
            let contracted = curve.contract(&hom)?;
            let image = hom.apply(&rho).map_err(TropicalError::from)?;
            if image != self.radius_on(&contracted)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{MonoidElement as M, MonoidHom};
    use crate::partitions::enumerate_partitions;
    use crate::qcond::enumerate_conditions;
    use crate::tropical::{enumerate_test_curves, surjections};

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    #[test]
    fn one_layer_tree_one_block() {
        let c = one_layer_tree(&SetPartition::one_block(4)).unwrap();
        assert_eq!(c.vertices().len(), 2);
        assert_eq!(c.legs().len(), 4);
        let dist = c.core_distances().unwrap();
        for l in c.legs() {
            assert_eq!(dist[&l.root], M::generator("e1"));
        }
    }

    #[test]
    fn one_layer_tree_singleton_block_sits_on_core() {
        let c = one_layer_tree(&p("{1,2}{3}")).unwrap();
        let dist = c.core_distances().unwrap();
        let leg3 = c.legs().iter().find(|l| l.marking == 3).unwrap();
        assert!(dist[&leg3.root].is_zero());
        // the partition is still recovered through the cut-leg rule
        assert_eq!(
            c.partition_at_radius(&M::generator("e1")).unwrap(),
            p("{1,2}{3}")
        );
    }

    #[test]
    fn one_layer_tree_partition_round_trip() {
        for n in 2..=5 {
            for q in enumerate_partitions(n).unwrap() {
                if q.is_discrete() {
                    assert!(one_layer_tree(&q).is_err());
                    continue;
                }
                let c = one_layer_tree(&q).unwrap();
                let radial = c.radial_structure().unwrap();
                assert_eq!(radial.radii.len(), 1);
                assert!(radial.basic);
                assert_eq!(c.partition_at_radius(&radial.radii[0]).unwrap(), q);
            }
        }
    }

    /// 1-layer trees with a smooth core are pairwise non-isomorphic and
    /// number Bell(n) - 1.
    #[test]
    fn one_layer_trees_exhaust_and_separate() {
        for n in 2..=5 {
            let parts: Vec<SetPartition> = enumerate_partitions(n)
                .unwrap()
                .into_iter()
                .filter(|q| !q.is_discrete())
                .collect();
            let bell = enumerate_partitions(n).unwrap().len();
            assert_eq!(parts.len(), bell - 1, "one tree per non-discrete partition");
            let trees: Vec<TropicalCurve> =
                parts.iter().map(|q| one_layer_tree(q).unwrap()).collect();
            for (i, a) in trees.iter().enumerate() {
                for (j, b) in trees.iter().enumerate() {
                    assert_eq!(
                        a.basic_aligned_isomorphic(b).unwrap(),
                        i == j,
                        "{} vs {}",
                        parts[i],
                        parts[j]
                    );
                }
            }
        }
    }

    #[test]
    fn assignment_all_zero_gives_empty_condition() {
        let u = UniversalRadius::from_assignment(3, &BTreeSet::new()).unwrap();
        assert!(u.condition().is_empty());
    }

    #[test]
    fn assignment_by_block_count_gives_m_stable() {
        for m in 0..3 {
            let nonzero: BTreeSet<SetPartition> = enumerate_partitions(3)
                .unwrap()
                .into_iter()
                .filter(|q| q.num_blocks() <= m)
                .collect();
            let u = UniversalRadius::from_assignment(3, &nonzero).unwrap();
            assert_eq!(u.condition(), &QCondition::m_stable(3, m).unwrap());
        }
    }

    #[test]
    fn bad_assignment_carries_two_layer_witness() {
        let nonzero = BTreeSet::from([p("{1,2}{3}")]);
        match UniversalRadius::from_assignment(3, &nonzero) {
            Err(RadiusError::NotDownwardClosed {
                member,
                missing,
                witness,
            }) => {
                assert_eq!(member, p("{1,2}{3}"));
                assert_eq!(missing, p("{1,2,3}"));
                let radial = witness.radial_structure().unwrap();
                assert_eq!(radial.radii.len(), 2, "two layers");
                // the witness demonstrates the incompatibility: evaluating
                // "largest radius whose partition is in the set" on the
                // witness gives the outer radius, whose image under killing
                // the outer generator is nonzero, while the contracted
                // 1-layer tree of the missing partition is assigned zero.
                let eval = |c: &TropicalCurve| -> M {
                    let radial = c.radial_structure().unwrap();
                    let mut chosen = M::zero();
                    for rho in &radial.radii {
                        if nonzero.contains(&c.partition_at_radius(rho).unwrap()) {
                            chosen = rho.clone();
                        }
                    }
                    chosen
                };
                let rho = eval(&witness);
                assert_eq!(rho, M::generator("e1").add(&M::generator("e2")));
                let hom = MonoidHom::killing(witness.generators(), &["e2"]);
                let contracted = witness.contract(&hom).unwrap();
                assert_eq!(
                    contracted.partition_type().unwrap().partitions(),
                    &[p("{1,2,3}")]
                );
                let image = hom.apply(&rho).unwrap();
                assert!(!image.is_zero());
                assert!(eval(&contracted).is_zero(), "missing partition gets zero");
            }
            other => panic!("expected witness error, got {other:?}"),
        }
    }

    #[test]
    fn radius_on_examples() {
        // empty condition assigns zero everywhere
        let zero = UniversalRadius::from_condition(QCondition::empty(3));
        for c in enumerate_test_curves(3).unwrap() {
            assert!(zero.radius_on(&c).unwrap().is_zero());
        }

        // on a 1-layer tree the radius is rho_1 exactly when the partition is
        // in the condition
        for n in 2..=4 {
            let conditions = enumerate_conditions(n.min(4)).unwrap();
            for q in enumerate_partitions(n).unwrap() {
                if q.is_discrete() {
                    continue;
                }
                let tree = one_layer_tree(&q).unwrap();
                let rho1 = tree.radial_structure().unwrap().radii[0].clone();
                for cond in &conditions {
                    let u = UniversalRadius::from_condition(cond.clone());
                    let got = u.radius_on(&tree).unwrap();
                    if cond.contains(&q) {
                        assert_eq!(got, rho1);
                    } else {
                        assert!(got.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn radius_on_layered_curve_with_block_bound() {
        // three-layer curve, condition of partitions with at most two blocks:
        // the middle radius wins
        let chain = PartitionChain::new(4, vec![p("{1,2,3,4}"), p("{1,2}{3,4}"), p("{1,2}{3}{4}")])
            .unwrap();
        let c = build_test_curve(&chain, CoreKind::SmoothVertex).unwrap();
        let u = UniversalRadius::from_condition(QCondition::m_stable(4, 2).unwrap());
        assert_eq!(
            u.radius_on(&c).unwrap(),
            M::generator("e1").add(&M::generator("e2"))
        );
    }

    #[test]
    fn radius_is_always_a_radius_and_lands_in_condition() {
        for cond in enumerate_conditions(3).unwrap() {
            let u = UniversalRadius::from_condition(cond.clone());
            for c in enumerate_test_curves(3).unwrap() {
                let rho = u.radius_on(&c).unwrap();
                let radial = c.radial_structure().unwrap();
                if rho.is_zero() {
                    if let Some(first) = radial.radii.first() {
                        let part = c.partition_at_radius(first).unwrap();
                        assert!(!cond.contains(&part));
                    }
                } else {
                    assert!(radial.radii.contains(&rho));
                    let part = c.partition_at_radius(&rho).unwrap();
                    assert!(cond.contains(&part));
                }
            }
        }
    }

    #[test]
    fn compatibility_holds_for_every_condition_on_every_basic_curve() {
        let curves = enumerate_test_curves(3).unwrap();
        for cond in enumerate_conditions(3).unwrap() {
            let u = UniversalRadius::from_condition(cond);
            for c in &curves {
                assert!(u.compatible_on(c).unwrap(), "{:?} on {c:?}", u.condition());
            }
        }
    }

    #[test]
    fn contraction_onto_single_generator_gives_one_layer_tree() {
        // killing all generators but e_i turns a layered curve into the
        // 1-layer tree of part(rho_i)
        let chain = PartitionChain::new(4, vec![p("{1,2,3,4}"), p("{1,2}{3,4}"), p("{1,2}{3}{4}")])
            .unwrap();
        let c = build_test_curve(&chain, CoreKind::SmoothVertex).unwrap();
        let radial = c.radial_structure().unwrap();
        for (i, rho_i) in radial.radii.iter().enumerate() {
            let kept = format!("e{}", i + 1);
            let hom = MonoidHom::onto_generator(c.generators(), &kept);
            let contracted = c.contract(&hom).unwrap();
            let expect = one_layer_tree(&c.partition_at_radius(rho_i).unwrap()).unwrap();
            assert_eq!(
                contracted.partition_type().unwrap(),
                expect.partition_type().unwrap()
            );
            // the radius image: rho_j maps to e_i iff j >= i
            for (j, rho_j) in radial.radii.iter().enumerate() {
                let image = hom.apply(rho_j).unwrap();
                if j >= i {
                    assert_eq!(image, M::generator(kept.clone()));
                } else {
                    assert!(image.is_zero());
                }
            }
        }
    }

    #[test]
    fn alpha_beta_are_mutually_inverse_n3() {
        let curves = enumerate_test_curves(3).unwrap();
        for cond in enumerate_conditions(3).unwrap() {
            // beta: condition -> assignment on 1-layer trees; alpha: back
            let u = UniversalRadius::from_condition(cond.clone());
            let mut nonzero = BTreeSet::new();
            for q in enumerate_partitions(3).unwrap() {
                if q.is_discrete() {
                    continue;
                }
                let tree = one_layer_tree(&q).unwrap();
                if !u.radius_on(&tree).unwrap().is_zero() {
                    nonzero.insert(q);
                }
            }
            let back = UniversalRadius::from_assignment(3, &nonzero).unwrap();
            assert_eq!(back.condition(), &cond);
            // the reconstructed radius agrees with the original on every
            // basic curve, so the assignment really is universal
            for c in &curves {
                assert_eq!(back.radius_on(c).unwrap(), u.radius_on(c).unwrap());
            }
        }
    }

    #[test]
    fn alpha_is_injective_n3() {
        let conditions = enumerate_conditions(3).unwrap();
        for a in &conditions {
            for b in &conditions {
                if a == b {
                    continue;
                }
                let ua = UniversalRadius::from_condition(a.clone());
                let ub = UniversalRadius::from_condition(b.clone());
                let differs = enumerate_partitions(3).unwrap().into_iter().any(|q| {
                    if q.is_discrete() {
                        return false;
                    }
                    let tree = one_layer_tree(&q).unwrap();
                    ua.radius_on(&tree).unwrap() != ub.radius_on(&tree).unwrap()
                });
                assert!(differs);
            }
        }
    }

    #[test]
    fn delta_contractions_carry_zero_radius() {
        // a nodal-core curve contracted onto a core generator has no radii,
        // so every condition assigns zero there; compatibility covers this
        let chain = PartitionChain::new(3, vec![p("{1,2}{3}")]).unwrap();
        for j in 1..=2 {
            for assignment in surjections(2, j) {
                let c = crate::tropical::build_test_curve_distributed(
                    &chain,
                    CoreKind::Cycle(j),
                    &assignment,
                )
                .unwrap();
                let d_gens: Vec<String> = c
                    .generators()
                    .iter()
                    .filter(|g| g.starts_with('d'))
                    .cloned()
                    .collect();
                for d in &d_gens {
                    let hom = MonoidHom::onto_generator(c.generators(), d);
                    let contracted = c.contract(&hom).unwrap();
                    assert!(contracted.radial_structure().unwrap().radii.is_empty());
                    let u = UniversalRadius::from_condition(QCondition::m_stable(3, 2).unwrap());
                    assert!(u.radius_on(&contracted).unwrap().is_zero());
                }
            }
        }
    }
}
