//! Combinatorial machinery for the stability-condition compactifications of
//! the moduli of n-pointed genus-one curves: set-partition lattices and their
//! antichains, tropical curves with monoid edge lengths, universal radii,
//! combinatorial curve types with elliptic m-fold points, the radius
//! contraction pipeline, and the interpolating cube complex.

pub mod contraction;
pub mod cubecomplex;
pub mod curvetype;
pub mod monoid;
pub mod partitions;
pub mod qcond;
pub mod tropical;
pub mod uradius;

pub use monoid::{MonoidElement, MonoidHom};
pub use partitions::{enumerate_partitions, refines, IntegerPartition, SetPartition};
pub use qcond::{count_conditions, symmetric_conditions, Antichain, QCondition};
pub use tropical::{build_test_curve, enumerate_chains, CoreKind, PartitionChain, TropicalCurve};

pub use contraction::{
    contract_at_radius, contract_for_condition, contraction_family, verify_exactly_one,
};
pub use cubecomplex::{enumerate_cells, Cell, CubePoint, Rational};
pub use curvetype::{enumerate_types, CombinatorialType, StabilityVerdict};
pub use uradius::{one_layer_tree, UniversalRadius};
