//! The interpolation cube complex: points of `[0,1]^Part(n)` where a
//! positive coordinate forces every coarser coordinate to one, its cells,
//! the vertex bijection with stability conditions, and the two level sets a
//! point induces. Coordinates are exact rationals throughout; the stability
//! predicates branch on equality with 0 and 1.

use crate::partitions::{enumerate_partitions, SetPartition};
use crate::qcond::{QCondError, QCondition};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CubeError {
    #[error("coordinate at the discrete partition must be zero, found {0}")]
    DiscreteNonzero(Rational),
    #[error("coordinate {value} at {upper} is positive but {lower} is not pinned to one")]
    ForcingViolated {
        lower: SetPartition,
        upper: SetPartition,
        value: Rational,
    },
    #[error("coordinate {value} at {partition} outside [0,1]")]
    OutOfRange {
        partition: SetPartition,
        value: Rational,
    },
    #[error("coordinate indexed by a partition of the wrong ground set: {0}")]
    WrongGroundSet(SetPartition),
    #[error("point is not a 0/1 vertex: coordinate {value} at {partition}")]
    NotAVertex {
        partition: SetPartition,
        value: Rational,
    },
    #[error("n = {0} too large for cell enumeration")]
    TooLarge(usize),
    #[error("bad rational literal '{0}'")]
    BadRational(String),
    #[error(transparent)]
    Condition(#[from] QCondError),
}

/// An exact nonnegative rational, normalized. Only values in `[0,1]` appear
/// in cube points; the type itself carries any ratio.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den);
        Rational {
            num: num / g,
            den: den / g,
        }
    }

    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };
    pub const HALF: Rational = Rational { num: 1, den: 2 };

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = CubeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CubeError::BadRational(s.to_string());
        match s.split_once('/') {
            Some((a, b)) => {
                let num = a.trim().parse().map_err(|_| bad())?;
                let den: u64 = b.trim().parse().map_err(|_| bad())?;
                if den == 0 {
                    return Err(bad());
                }
                Ok(Rational::new(num, den))
            }
            None => {
                let num = s.trim().parse().map_err(|_| bad())?;
                Ok(Rational::new(num, 1))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point of the cube complex: one coordinate per partition of `{1..n}`,
/// stored sparsely (absent means zero).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CubePoint {
    n: usize,
    coords: BTreeMap<SetPartition, Rational>,
}

impl CubePoint {
    /// Validates the two point axioms, reporting the first violated clause
    /// with a witness pair. Missing coordinates default to zero.
    pub fn validate(
        n: usize,
        coords: impl IntoIterator<Item = (SetPartition, Rational)>,
    ) -> Result<Self, CubeError> {
        let mut map: BTreeMap<SetPartition, Rational> = BTreeMap::new();
        for (partition, value) in coords {
            if partition.n() != n {
                return Err(CubeError::WrongGroundSet(partition));
            }
            if value > Rational::ONE {
                return Err(CubeError::OutOfRange { partition, value });
            }
            if !value.is_zero() {
                map.insert(partition, value);
            }
        }
        let discrete = SetPartition::discrete(n);
        if let Some(&value) = map.get(&discrete) {
            return Err(CubeError::DiscreteNonzero(value));
        }
        let all = enumerate_partitions(n).expect("cube ground set in range");
        for (upper, &value) in &map {
            for lower in &all {
                if lower.strictly_refined_by(upper)
                    && !map.get(lower).map(Rational::is_one).unwrap_or(false)
                {
                    return Err(CubeError::ForcingViolated {
                        lower: lower.clone(),
                        upper: upper.clone(),
                        value,
                    });
                }
            }
        }
        Ok(CubePoint { n, coords: map })
    }

    pub fn zero(n: usize) -> Self {
        CubePoint {
            n,
            coords: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coordinate(&self, p: &SetPartition) -> Rational {
        self.coords.get(p).copied().unwrap_or(Rational::ZERO)
    }

    /// The nonzero coordinates.
    pub fn support(&self) -> &BTreeMap<SetPartition, Rational> {
        &self.coords
    }

    pub fn is_vertex(&self) -> bool {
        self.coords.values().all(Rational::is_one)
    }

    /// The partitions with positive coordinate: levels an elliptic
    /// singularity may take. Downward closed by the point axioms.
    pub fn q_sing(&self) -> QCondition {
        QCondition::validate(self.n, self.coords.keys().cloned())
            .expect("point axioms make the support downward closed")
    }

    /// The partitions with coordinate below one: levels a genus-one subcurve
    /// may take. Upward closed, and always contains the discrete partition.
    pub fn q_curve(&self) -> BTreeSet<SetPartition> {
        enumerate_partitions(self.n)
            .expect("cube ground set in range")
            .into_iter()
            .filter(|p| !self.coordinate(p).is_one())
            .collect()
    }

    /// The condition a 0/1 vertex encodes.
    pub fn to_condition(&self) -> Result<QCondition, CubeError> {
        if let Some((partition, &value)) = self.coords.iter().find(|(_, v)| !v.is_one()) {
            return Err(CubeError::NotAVertex {
                partition: partition.clone(),
                value,
            });
        }
        Ok(self.q_sing())
    }

    /// The vertex encoding a condition: its indicator function.
    pub fn from_condition(q: &QCondition) -> CubePoint {
        CubePoint {
            n: q.n(),
            coords: q
                .members()
                .iter()
                .map(|p| (p.clone(), Rational::ONE))
                .collect(),
        }
    }

    /// Whether `other` lies in a face of the closed cube containing `self`:
    /// every pinned coordinate of `self` is matched exactly.
    pub fn face_contains(&self, other: &CubePoint) -> bool {
        if self.n != other.n {
            return false;
        }
        enumerate_partitions(self.n)
            .expect("cube ground set in range")
            .iter()
            .all(|p| {
                let c = self.coordinate(p);
                if c.is_zero() || c.is_one() {
                    other.coordinate(p) == c
                } else {
                    true
                }
            })
    }
}

impl fmt::Debug for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CubePoint(")?;
        for (i, (p, v)) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}={v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct CoordWire {
    partition: SetPartition,
    value: Rational,
}

#[derive(Serialize, Deserialize)]
struct CubePointWire {
    n: usize,
    coords: Vec<CoordWire>,
}

impl Serialize for CubePoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CubePointWire {
            n: self.n,
            coords: self
                .coords
                .iter()
                .map(|(p, &v)| CoordWire {
                    partition: p.clone(),
                    value: v,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CubePoint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = CubePointWire::deserialize(deserializer)?;
        CubePoint::validate(
            wire.n,
            wire.coords.into_iter().map(|c| (c.partition, c.value)),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// An open cell: coordinates frozen at 0 or 1, the rest free in `(0,1)`.
/// Dimension is the number of free coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    n: usize,
    /// frozen at one
    ones: BTreeSet<SetPartition>,
    /// free in (0,1); everything else is frozen at zero
    free: BTreeSet<SetPartition>,
}

impl Cell {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    pub fn ones(&self) -> &BTreeSet<SetPartition> {
        &self.ones
    }

    pub fn free(&self) -> &BTreeSet<SetPartition> {
        &self.free
    }

    /// The frozen coordinates as a partition -> 0/1 map.
    pub fn fixed(&self) -> BTreeMap<SetPartition, Rational> {
        enumerate_partitions(self.n)
            .expect("cube ground set in range")
            .into_iter()
            .filter(|p| !self.free.contains(p))
            .map(|p| {
                let v = if self.ones.contains(&p) {
                    Rational::ONE
                } else {
                    Rational::ZERO
                };
                (p, v)
            })
            .collect()
    }

    /// The interior sample point with every free coordinate at one half.
    pub fn sample_point(&self) -> CubePoint {
        let coords = self
            .ones
            .iter()
            .map(|p| (p.clone(), Rational::ONE))
            .chain(self.free.iter().map(|p| (p.clone(), Rational::HALF)));
        CubePoint::validate(self.n, coords).expect("cells contain only valid points")
    }

    /// All 0/1 corners of the closed cell.
    pub fn vertices(&self) -> Vec<CubePoint> {
        let free: Vec<&SetPartition> = self.free.iter().collect();
        let mut out = Vec::new();
        for bits in 0u64..(1 << free.len()) {
            let coords = self
                .ones
                .iter()
                .cloned()
                .chain(
                    free.iter()
                        .enumerate()
                        .filter(|(i, _)| bits >> i & 1 == 1)
                        .map(|(_, p)| (*p).clone()),
                )
                .map(|p| (p, Rational::ONE));
            out.push(CubePoint::validate(self.n, coords).expect("corners are valid"));
        }
        out
    }

    /// Whether `other` is a face of `self`: it freezes some free coordinates
    /// of `self` at 0/1 and keeps everything else. Reflexive.
    pub fn face_relation(&self, other: &Cell) -> bool {
        self.n == other.n
            && other.free.is_subset(&self.free)
            && other.ones.is_superset(&self.ones)
            && other
                .ones
                .difference(&self.ones)
                .all(|p| self.free.contains(p))
    }
}

/// All cells of the cube complex, vertices first, in a deterministic order.
///
/// Cells correspond to pairs of a downward-closed support `S` (a condition)
/// with a subset `B` of its maximal elements marked free: a coordinate can
/// sit in the open interval only where nothing above it in the support pins
/// it, and everything below any supported coordinate is forced to one.
pub fn enumerate_cells(n: usize) -> Result<Vec<Cell>, CubeError> {
    if n > 4 {
        return Err(CubeError::TooLarge(n));
    }
    let mut supports = crate::qcond::enumerate_conditions(n)?;
    supports.insert(0, QCondition::empty(n));
    supports.sort();
    supports.dedup();
    let mut out = Vec::new();
    for support in &supports {
        let members = support.members();
        let maximal: Vec<&SetPartition> = members
            .iter()
            .filter(|p| !members.iter().any(|q| p.strictly_refined_by(q)))
            .collect();
        for bits in 0u64..(1 << maximal.len()) {
            let free: BTreeSet<SetPartition> = maximal
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, p)| (*p).clone())
                .collect();
            let ones: BTreeSet<SetPartition> = members
                .iter()
                .filter(|p| !free.contains(p))
                .cloned()
                .collect();
            out.push(Cell { n, ones, free });
        }
    }
    out.sort_by_key(|c| (c.dimension(), c.ones.clone(), c.free.clone()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvetype::enumerate_types;
    use crate::qcond::enumerate_conditions;

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn rational_basics() {
        assert_eq!(r("2/4"), Rational::HALF);
        assert_eq!(r("1"), Rational::ONE);
        assert!(r("1/3") < r("1/2"));
        assert_eq!(r("3/3"), Rational::ONE);
        assert!("1/0".parse::<Rational>().is_err());
        assert_eq!(Rational::new(6, 8).to_string(), "3/4");
    }

    #[test]
    fn validate_examples() {
        // the all-zero point is the vertex of the empty condition
        let zero = CubePoint::validate(3, []).unwrap();
        assert!(zero.is_vertex());
        assert!(zero.to_condition().unwrap().is_empty());

        // interior edge point of the solid cube
        let edge = CubePoint::validate(
            3,
            [
                (p("{1,2,3}"), Rational::ONE),
                (p("{1}{2,3}"), Rational::HALF),
            ],
        )
        .unwrap();
        assert!(!edge.is_vertex());

        // positive middle coordinate without pinning the bottom
        let err = CubePoint::validate(3, [(p("{1}{2,3}"), Rational::HALF)]).unwrap_err();
        assert_eq!(
            err,
            CubeError::ForcingViolated {
                lower: p("{1,2,3}"),
                upper: p("{1}{2,3}"),
                value: Rational::HALF,
            }
        );

        // nonzero discrete coordinate
        let err = CubePoint::validate(3, [(SetPartition::discrete(3), Rational::ONE)]).unwrap_err();
        assert!(matches!(err, CubeError::DiscreteNonzero(_)));
    }

    #[test]
    fn q_sing_q_curve_examples() {
        let edge = CubePoint::validate(
            3,
            [
                (p("{1,2,3}"), Rational::ONE),
                (p("{1}{2,3}"), Rational::HALF),
            ],
        )
        .unwrap();
        let sing = edge.q_sing();
        assert_eq!(sing.len(), 2);
        let curve = edge.q_curve();
        assert_eq!(curve.len(), 4, "all but the one-block partition");
        let overlap: Vec<&SetPartition> = curve.iter().filter(|p| sing.contains(p)).collect();
        assert_eq!(overlap, vec![&p("{1}{2,3}")]);

        // at a vertex the two sets partition the non-discrete partitions
        for q in enumerate_conditions(3).unwrap() {
            let v = CubePoint::from_condition(&q);
            let sing = v.q_sing();
            let curve = v.q_curve();
            assert_eq!(&sing, &q);
            for part in crate::partitions::enumerate_partitions(3).unwrap() {
                assert_eq!(sing.contains(&part), !curve.contains(&part));
            }
        }
    }

    #[test]
    fn q_sing_downward_q_curve_upward_closed_randomized() {
        // a light deterministic pseudo-random sweep over valid points of the
        // 4-cube complex
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        let cells = enumerate_cells(4).unwrap();
        let all = crate::partitions::enumerate_partitions(4).unwrap();
        for _ in 0..10_000 {
            let cell = &cells[(next() % cells.len() as u64) as usize];
            let coords = cell
                .ones()
                .iter()
                .map(|p| (p.clone(), Rational::ONE))
                .chain(
                    cell.free()
                        .iter()
                        .map(|p| (p.clone(), Rational::new(1 + next() % 9, 10))),
                );
            let point = CubePoint::validate(4, coords).unwrap();
            let sing = point.q_sing();
            let curve = point.q_curve();
            for part in &all {
                if sing.contains(part) {
                    for below in part.covers_below() {
                        assert!(sing.contains(&below));
                    }
                }
                if curve.contains(part) {
                    for above in all.iter().filter(|q| part.strictly_refined_by(q)) {
                        assert!(curve.contains(above));
                    }
                }
                // every non-discrete partition lands in at least one side
                assert!(sing.contains(part) || curve.contains(part));
            }
            assert!(curve.contains(&SetPartition::discrete(4)));
            assert!(!sing.contains(&SetPartition::discrete(4)));
        }
    }

    #[test]
    fn vertex_condition_bijection() {
        for n in 2..=4 {
            let conditions = enumerate_conditions(n).unwrap();
            for q in &conditions {
                let v = CubePoint::from_condition(q);
                assert!(v.is_vertex());
                assert_eq!(&v.to_condition().unwrap(), q);
            }
            // vertex count equals the condition count
            let vertices: Vec<&Cell> = Vec::new();
            drop(vertices);
            if n <= 4 {
                let cells = enumerate_cells(n).unwrap();
                let vertex_count = cells.iter().filter(|c| c.dimension() == 0).count();
                assert_eq!(
                    vertex_count as u64,
                    crate::qcond::count_conditions(n).unwrap()
                );
            }
        }
        // a non-vertex rejects
        let edge = CubePoint::validate(
            3,
            [
                (p("{1,2,3}"), Rational::ONE),
                (p("{1}{2,3}"), Rational::HALF),
            ],
        )
        .unwrap();
        assert!(matches!(
            edge.to_condition(),
            Err(CubeError::NotAVertex { .. })
        ));
    }

    #[test]
    fn cell_census_n3() {
        let cells = enumerate_cells(3).unwrap();
        let by_dim = |d: usize| cells.iter().filter(|c| c.dimension() == d).count();
        assert_eq!(by_dim(0), 9, "vertices");
        assert_eq!(by_dim(1), 13, "edges: 12 on the cube plus the whisker");
        assert_eq!(by_dim(3), 1, "one solid cube");
        let top = cells.iter().find(|c| c.dimension() == 3).unwrap();
        let two_block: BTreeSet<SetPartition> =
            [p("{1}{2,3}"), p("{2}{1,3}"), p("{3}{1,2}")].into();
        assert_eq!(top.free(), &two_block);
        // the whisker edge: the one-block coordinate alone runs free
        assert!(cells.iter().any(|c| {
            c.dimension() == 1 && c.ones().is_empty() && c.free().contains(&p("{1,2,3}"))
        }));
    }

    #[test]
    fn cell_vertices_are_valid_points() {
        for cell in enumerate_cells(3).unwrap() {
            for v in cell.vertices() {
                assert!(v.is_vertex());
                // revalidate through the public constructor
                CubePoint::validate(3, v.support().iter().map(|(p, &r)| (p.clone(), r))).unwrap();
            }
            // the sample point is valid and face-contained in itself
            let s = cell.sample_point();
            assert!(s.face_contains(&s));
        }
    }

    #[test]
    fn face_relation_examples() {
        let cells = enumerate_cells(3).unwrap();
        for c in &cells {
            assert!(c.face_relation(c), "reflexive");
        }
        // every vertex of a cell spans a face-related vertex cell
        for c in &cells {
            for v in c.vertices() {
                let vertex_cell = cells
                    .iter()
                    .find(|d| d.dimension() == 0 && d.sample_point() == v)
                    .expect("vertex cell exists");
                assert!(c.face_relation(vertex_cell));
            }
        }
        // face-containment of sample points matches the cell relation
        for c in &cells {
            for d in &cells {
                if c.face_relation(d) {
                    assert!(c.sample_point().face_contains(&d.sample_point()));
                }
            }
        }
    }

    #[test]
    fn face_contains_point_examples() {
        let edge = CubePoint::validate(
            3,
            [
                (p("{1,2,3}"), Rational::ONE),
                (p("{1}{2,3}"), Rational::HALF),
            ],
        )
        .unwrap();
        let endpoint = CubePoint::validate(3, [(p("{1,2,3}"), Rational::ONE)]).unwrap();
        assert!(edge.face_contains(&endpoint));
        assert!(!endpoint.face_contains(&edge));
        // containment shrinks both level sets
        assert!(endpoint
            .q_sing()
            .members()
            .is_subset(edge.q_sing().members()));
        assert!(endpoint.q_curve().is_subset(&edge.q_curve()));
    }

    #[test]
    fn vertex_stability_matches_condition_stability() {
        // at 0/1 vertices the interpolated predicate is the condition
        // predicate, exhaustively over the enumerated types
        let types = enumerate_types(3).unwrap();
        for q in enumerate_conditions(3).unwrap() {
            let v = CubePoint::from_condition(&q);
            let (sing, curve) = (v.q_sing(), v.q_curve());
            for t in &types {
                assert_eq!(
                    t.is_stable_for(&q).stable,
                    t.is_stable_for_interpolated(&sing, &curve).stable,
                    "{t:?} at {q:?}"
                );
            }
        }
    }

    #[test]
    fn face_containment_shrinks_stable_sets() {
        // moving into a face can only lose stable types
        let types = enumerate_types(3).unwrap();
        let cells = enumerate_cells(3).unwrap();
        let points: Vec<CubePoint> = cells.iter().map(|c| c.sample_point()).collect();
        for c in &points {
            for d in &points {
                if !c.face_contains(d) {
                    continue;
                }
                assert!(d.q_sing().members().is_subset(c.q_sing().members()));
                assert!(d.q_curve().is_subset(&c.q_curve()));
                let (cs, cc) = (c.q_sing(), c.q_curve());
                let (ds, dc) = (d.q_sing(), d.q_curve());
                for t in &types {
                    if t.is_stable_for_interpolated(&ds, &dc).stable {
                        assert!(
                            t.is_stable_for_interpolated(&cs, &cc).stable,
                            "{t:?}: stable at face but not at ambient cell"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let edge = CubePoint::validate(
            3,
            [
                (p("{1,2,3}"), Rational::ONE),
                (p("{1}{2,3}"), Rational::HALF),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&edge).unwrap();
        assert!(json.contains("1/2"), "{json}");
        let back: CubePoint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, edge);
        // invalid points fail to deserialize
        let bad = r#"{"n":3,"coords":[{"partition":[[1],[2,3]],"value":"1/2"}]}"#;
        assert!(serde_json::from_str::<CubePoint>(bad).is_err());
    }
}
