//! Stability conditions: downward-closed sets of non-discrete partitions,
//! their antichain duals, lattice structure, fast counting, and the symmetric
//! (S_n-fixed) conditions.
//!
//! A note on the two counts in circulation. The conditions here are the
//! downward-closed subsets of `Part(n)` that exclude the discrete partition,
//! while nonempty antichains biject with *proper* downward-closed subsets.
//! These agree: the discrete partition is the maximum of `Part(n)`, so a
//! downward-closed set containing it is all of `Part(n)`; excluding the
//! discrete partition and being proper are the same constraint. The test
//! suite checks the three counts coincide for `n <= 4`.

use crate::partitions::{enumerate_partitions, SetPartition};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QCondError {
    #[error("condition contains the discrete partition")]
    ContainsDiscrete,
    #[error("not downward closed: contains {member} but not its coarsening {missing}")]
    NotDownwardClosed {
        member: SetPartition,
        missing: SetPartition,
    },
    #[error("member {member} is not a partition of {{1..{n}}}")]
    WrongGroundSet { n: usize, member: SetPartition },
    #[error("mismatched ground sets: {0} vs {1}")]
    MismatchedN(usize, usize),
    #[error("m = {m} out of range for n = {n} (need 0 <= m < n)")]
    BadLevelBound { n: usize, m: usize },
    #[error("n = {0} too large for {1} (pass the override to force)")]
    TooLarge(usize, &'static str),
    #[error("antichain is empty")]
    EmptyAntichain,
    #[error("elements {0} and {1} are comparable")]
    NotAnAntichain(SetPartition, SetPartition),
}

/// All of `Part(n)` with its comparability structure precomputed, used by the
/// counting kernel and the exhaustive sweeps. Indices follow the order of
/// [`enumerate_partitions`].
pub struct PartitionTable {
    n: usize,
    parts: Vec<SetPartition>,
    /// leq[i] = bitset of j with parts[i] <= parts[j]
    leq: Vec<Vec<u64>>,
    words: usize,
}

impl PartitionTable {
    pub fn new(n: usize) -> Result<Self, QCondError> {
        if n > 8 {
            // 8 keeps the bitmatrix at a few MB; nothing in the artifact
            // needs more.
            return Err(QCondError::TooLarge(n, "PartitionTable"));
        }
        let parts = enumerate_partitions(n).map_err(|_| QCondError::TooLarge(n, "Part(n)"))?;
        let size = parts.len();
        let words = size.div_ceil(64);
        let mut leq = vec![vec![0u64; words]; size];
        for i in 0..size {
            for j in 0..size {
                if parts[i].refined_by(&parts[j]) {
                    leq[i][j / 64] |= 1 << (j % 64);
                }
            }
        }
        Ok(PartitionTable {
            n,
            parts,
            leq,
            words,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn partitions(&self) -> &[SetPartition] {
        &self.parts
    }

    pub fn index_of(&self, p: &SetPartition) -> Option<usize> {
        self.parts.iter().position(|q| q == p)
    }

    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.leq[i][j / 64] >> (j % 64) & 1 == 1
    }

    fn comparable_idx(&self, i: usize, j: usize) -> bool {
        self.leq_idx(i, j) || self.leq_idx(j, i)
    }
}

/// A downward-closed set of partitions of `{1..n}` excluding the discrete
/// partition. Each condition selects one compactification of the moduli of
/// smooth n-pointed genus-one curves.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct QCondition {
    n: usize,
    members: BTreeSet<SetPartition>,
}

/// A nonempty set of pairwise incomparable partitions; the dual encoding of
/// a condition via the minimal excluded elements.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Antichain {
    n: usize,
    elements: BTreeSet<SetPartition>,
}

impl QCondition {
    /// Validates the two axioms, reporting the first violation with a witness.
    pub fn validate(
        n: usize,
        members: impl IntoIterator<Item = SetPartition>,
    ) -> Result<Self, QCondError> {
        let members: BTreeSet<SetPartition> = members.into_iter().collect();
        for m in &members {
            if m.n() != n {
                return Err(QCondError::WrongGroundSet {
                    n,
                    member: m.clone(),
                });
            }
            if m.is_discrete() {
                return Err(QCondError::ContainsDiscrete);
            }
        }
        // Downward closure is generated by single merges, so checking lower
        // covers suffices and yields a minimal witness pair.
        for m in &members {
            for below in m.covers_below() {
                if !members.contains(&below) {
                    return Err(QCondError::NotDownwardClosed {
                        member: m.clone(),
                        missing: below,
                    });
                }
            }
        }
        Ok(QCondition { n, members })
    }

    pub fn empty(n: usize) -> Self {
        QCondition {
            n,
            members: BTreeSet::new(),
        }
    }

    /// Smyth's level-m condition: all partitions with at most `m` blocks.
    pub fn m_stable(n: usize, m: usize) -> Result<Self, QCondError> {
        if m >= n {
            return Err(QCondError::BadLevelBound { n, m });
        }
        let members = enumerate_partitions(n)
            .map_err(|_| QCondError::TooLarge(n, "m_stable"))?
            .into_iter()
            .filter(|p| p.num_blocks() <= m)
            .collect();
        Ok(QCondition { n, members })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &BTreeSet<SetPartition> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &SetPartition) -> bool {
        self.members.contains(p)
    }

    /// Intersection; the lattice meet.
    pub fn meet(&self, other: &QCondition) -> Result<QCondition, QCondError> {
        if self.n != other.n {
            return Err(QCondError::MismatchedN(self.n, other.n));
        }
        Ok(QCondition {
            n: self.n,
            members: self.members.intersection(&other.members).cloned().collect(),
        })
    }

    /// Union; the lattice join.
    pub fn join(&self, other: &QCondition) -> Result<QCondition, QCondError> {
        if self.n != other.n {
            return Err(QCondError::MismatchedN(self.n, other.n));
        }
        Ok(QCondition {
            n: self.n,
            members: self.members.union(&other.members).cloned().collect(),
        })
    }

    /// The minimal elements of the complement of the condition.
    pub fn to_antichain(&self) -> Antichain {
        let all = enumerate_partitions(self.n).expect("condition ground set in range");
        let complement: Vec<&SetPartition> =
            all.iter().filter(|p| !self.members.contains(p)).collect();
        let elements = complement
            .iter()
            .filter(|p| !complement.iter().any(|q| q.strictly_refined_by(p)))
            .map(|p| (*p).clone())
            .collect();
        Antichain {
            n: self.n,
            elements,
        }
    }

    /// The complement of the upward closure of the antichain.
    pub fn from_antichain(a: &Antichain) -> QCondition {
        let all = enumerate_partitions(a.n).expect("antichain ground set in range");
        let members = all
            .into_iter()
            .filter(|p| !a.elements.iter().any(|m| m.refined_by(p)))
            .collect();
        QCondition { n: a.n, members }
    }
}

impl Antichain {
    pub fn new(
        n: usize,
        elements: impl IntoIterator<Item = SetPartition>,
    ) -> Result<Self, QCondError> {
        let elements: BTreeSet<SetPartition> = elements.into_iter().collect();
        if elements.is_empty() {
            return Err(QCondError::EmptyAntichain);
        }
        for a in &elements {
            if a.n() != n {
                return Err(QCondError::WrongGroundSet {
                    n,
                    member: a.clone(),
                });
            }
            for b in &elements {
                if a != b && a.comparable(b) {
                    return Err(QCondError::NotAnAntichain(a.clone(), b.clone()));
                }
            }
        }
        Ok(Antichain { n, elements })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &BTreeSet<SetPartition> {
        &self.elements
    }

    /// Text form: semicolon-separated partitions, e.g. `{1,2}{3};{1,3}{2}`.
    pub fn to_text(&self) -> String {
        self.elements
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse_text(s: &str) -> Result<Self, QCondError> {
        let mut elements = Vec::new();
        for chunk in s.split(';') {
            let p: SetPartition = chunk
                .trim()
                .parse()
                .map_err(|_| QCondError::EmptyAntichain)?;
            elements.push(p);
        }
        let n = elements.iter().map(|p| p.n()).max().unwrap_or(0);
        Antichain::new(n, elements)
    }
}

/// Counts the nonempty antichains of `Part(n)`, i.e. the number of stability
/// conditions, by depth-first search over a comparability bitmatrix. Refuses
/// `n > 5` unless forced; the count explodes combinatorially beyond that.
pub fn count_conditions(n: usize) -> Result<u64, QCondError> {
    if n > 5 {
        return Err(QCondError::TooLarge(n, "count_conditions"));
    }
    count_conditions_forced(n, None)
}

/// The unguarded counter. `threads = None` picks the available parallelism;
/// the search space is sharded by smallest antichain element and shard counts
/// are combined by addition.
pub fn count_conditions_forced(n: usize, threads: Option<usize>) -> Result<u64, QCondError> {
    let table = PartitionTable::new(n)?;
    let size = table.len();
    // candidates[i] = indices j > i incomparable to i
    let words = table.words;
    let mut candidates = vec![vec![0u64; words]; size];
    for (i, row) in candidates.iter_mut().enumerate() {
        for j in (i + 1)..size {
            if !table.comparable_idx(i, j) {
                row[j / 64] |= 1 << (j % 64);
            }
        }
    }

    fn dfs(mask: &[u64], candidates: &[Vec<u64>]) -> u64 {
        // one antichain per call: the chosen set itself
        let mut count = 1;
        for (w, &word) in mask.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let c = w * 64 + b;
                let next: Vec<u64> = mask
                    .iter()
                    .zip(&candidates[c])
                    .map(|(&m, &cc)| m & cc)
                    .collect();
                count += dfs(&next, candidates);
            }
        }
        count
    }

    let threads = threads
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
        .max(1);

    let total: u64 = if threads == 1 || size < 8 {
        let mut full = vec![0u64; words];
        for i in 0..size {
            full[i / 64] |= 1 << (i % 64);
        }
        dfs(&full, &candidates)
    } else {
        // Shard by first element: antichains whose smallest index is i.
        let next_first = std::sync::atomic::AtomicUsize::new(0);
        let counted = std::sync::Mutex::new(0u64);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| {
                    let mut local = 0u64;
                    loop {
                        let i = next_first.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if i >= size {
                            break;
                        }
                        local += dfs(&candidates[i], &candidates);
                    }
                    *counted.lock().unwrap() += local;
                });
            }
        });
        counted.into_inner().unwrap() + 1 // the empty antichain
    };
    Ok(total - 1) // drop the empty antichain
}

/// Materializes every condition for small `n` by walking all antichains and
/// taking complements of their upward closures. Deterministic order.
pub fn enumerate_conditions(n: usize) -> Result<Vec<QCondition>, QCondError> {
    if n > 4 {
        return Err(QCondError::TooLarge(n, "enumerate_conditions"));
    }
    let table = PartitionTable::new(n)?;
    let size = table.len();
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        stack: &mut Vec<usize>,
        table: &PartitionTable,
        out: &mut Vec<QCondition>,
    ) {
        if !stack.is_empty() {
            let up: BTreeSet<usize> = stack
                .iter()
                .flat_map(|&i| (0..table.len()).filter(move |&j| table.leq_idx(i, j)))
                .collect();
            let members = (0..table.len())
                .filter(|j| !up.contains(j))
                .map(|j| table.partitions()[j].clone())
                .collect();
            out.push(QCondition {
                n: table.n(),
                members,
            });
        }
        for c in start..table.len() {
            if stack.iter().all(|&i| !table.comparable_idx(i, c)) {
                stack.push(c);
                rec(c + 1, stack, table, out);
                stack.pop();
            }
        }
    }
    rec(0, &mut stack, &table, &mut out);
    let _ = size;
    out.sort();
    Ok(out)
}

/// All conditions fixed by the S_n action, enumerated through downward-closed
/// sets of integer partitions. The order on shapes is derived from the
/// set-partition order: shape `s <= t` iff some partition of shape `s` is
/// below one of shape `t`.
pub fn symmetric_conditions(n: usize) -> Result<Vec<QCondition>, QCondError> {
    if n > 6 {
        return Err(QCondError::TooLarge(n, "symmetric_conditions"));
    }
    let parts = enumerate_partitions(n).map_err(|_| QCondError::TooLarge(n, "Part(n)"))?;
    let shapes: Vec<crate::partitions::IntegerPartition> = {
        let mut s: Vec<_> = parts.iter().map(|p| p.shape()).collect();
        s.sort();
        s.dedup();
        s
    };
    let k = shapes.len();
    let shape_idx = |p: &SetPartition| shapes.iter().position(|s| *s == p.shape()).unwrap();
    // brute-force induced order
    let mut leq = vec![vec![false; k]; k];
    for a in &parts {
        for b in &parts {
            if a.refined_by(b) {
                leq[shape_idx(a)][shape_idx(b)] = true;
            }
        }
    }
    let discrete_shape = shape_idx(&SetPartition::discrete(n));
    let mut out = Vec::new();
    // subsets of shapes, filtered for downward closure; p(6) = 11 keeps this tiny
    for bits in 0u32..(1 << k) {
        if bits >> discrete_shape & 1 == 1 {
            continue;
        }
        let chosen: Vec<usize> = (0..k).filter(|&i| bits >> i & 1 == 1).collect();
        let closed = chosen
            .iter()
            .all(|&i| (0..k).all(|j| !leq[j][i] || bits >> j & 1 == 1));
        if !closed {
            continue;
        }
        let members: BTreeSet<SetPartition> = parts
            .iter()
            .filter(|p| bits >> shape_idx(p) & 1 == 1)
            .cloned()
            .collect();
        out.push(QCondition { n, members });
    }
    out.sort();
    Ok(out)
}

/// Serialized form: `{ "n": int, "partitions": [[[int]]] }`.
#[derive(Serialize, Deserialize)]
struct QConditionWire {
    n: usize,
    partitions: Vec<SetPartition>,
}

impl Serialize for QCondition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QConditionWire {
            n: self.n,
            partitions: self.members.iter().cloned().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QCondition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = QConditionWire::deserialize(deserializer)?;
        QCondition::validate(wire.n, wire.partitions).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    #[test]
    fn validate_empty_is_fine() {
        let q = QCondition::validate(3, []).unwrap();
        assert!(q.is_empty());
    }

    #[test]
    fn validate_reports_witness() {
        let err = QCondition::validate(3, [p("{1,2}{3}")]).unwrap_err();
        assert_eq!(
            err,
            QCondError::NotDownwardClosed {
                member: p("{1,2}{3}"),
                missing: p("{1,2,3}"),
            }
        );
    }

    #[test]
    fn validate_rejects_discrete() {
        let members = enumerate_partitions(3).unwrap();
        assert_eq!(
            QCondition::validate(3, members).unwrap_err(),
            QCondError::ContainsDiscrete
        );
    }

    #[test]
    fn m_stable_examples() {
        assert!(QCondition::m_stable(3, 0).unwrap().is_empty());
        assert_eq!(QCondition::m_stable(3, 1).unwrap().len(), 1);
        // 1 + S(3,2) = 4, with the Stirling number computed independently
        fn stirling2(n: usize, k: usize) -> usize {
            if n == 0 {
                return usize::from(k == 0);
            }
            if k == 0 || k > n {
                return 0;
            }
            k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)
        }
        assert_eq!(
            QCondition::m_stable(3, 2).unwrap().len(),
            stirling2(3, 1) + stirling2(3, 2)
        );
        assert_eq!(QCondition::m_stable(3, 2).unwrap().len(), 4);
        assert!(QCondition::m_stable(3, 3).is_err());
        // block count never grows under coarsening, so these validate
        for m in 0..4 {
            let q = QCondition::m_stable(4, m).unwrap();
            assert!(QCondition::validate(4, q.members().iter().cloned()).is_ok());
        }
    }

    #[test]
    fn m_stable_chain() {
        for m in 0..3 {
            let small = QCondition::m_stable(4, m).unwrap();
            let large = QCondition::m_stable(4, m + 1).unwrap();
            assert!(small.members().is_subset(large.members()));
        }
    }

    #[test]
    fn antichain_examples() {
        let q = QCondition::empty(3);
        let a = q.to_antichain();
        assert_eq!(
            a.elements().iter().cloned().collect::<Vec<_>>(),
            vec![p("{1,2,3}")]
        );

        let a = Antichain::new(3, [SetPartition::discrete(3)]).unwrap();
        let q = QCondition::from_antichain(&a);
        assert_eq!(q.len(), 4);
        assert!(!q.contains(&SetPartition::discrete(3)));
    }

    /// Independent oracle for all antichains of Part(n): filter all subsets.
    fn all_antichains_bruteforce(n: usize) -> Vec<Vec<SetPartition>> {
        let parts = enumerate_partitions(n).unwrap();
        let mut out = Vec::new();
        for bits in 1u32..(1 << parts.len()) {
            let chosen: Vec<SetPartition> = parts
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect();
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(i, a)| chosen.iter().skip(i + 1).all(|b| !a.comparable(b)));
            if ok {
                out.push(chosen);
            }
        }
        out
    }

    #[test]
    fn antichain_duality_round_trip_n3() {
        let antichains = all_antichains_bruteforce(3);
        assert_eq!(antichains.len(), 9);
        for elements in antichains {
            let a = Antichain::new(3, elements).unwrap();
            let q = QCondition::from_antichain(&a);
            QCondition::validate(3, q.members().iter().cloned()).unwrap();
            assert_eq!(q.to_antichain(), a);
        }
    }

    #[test]
    fn counts_match_known_values() {
        assert_eq!(count_conditions(3).unwrap(), 9);
        assert_eq!(count_conditions(4).unwrap(), 346);
        assert!(count_conditions(6).is_err());
    }

    /// Naive second code path: filter all subsets of Part(3) for the two
    /// axioms directly.
    #[test]
    fn count_n3_by_naive_subset_filter() {
        let parts = enumerate_partitions(3).unwrap();
        let mut count = 0;
        for bits in 0u32..(1 << parts.len()) {
            let chosen: BTreeSet<SetPartition> = parts
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect();
            if QCondition::validate(3, chosen).is_ok() {
                count += 1;
            }
        }
        assert_eq!(count, 9);
        assert_eq!(count_conditions(3).unwrap(), count);
    }

    /// Resolution of the counting question: conditions, proper downward-closed
    /// subsets, and nonempty antichains all agree for n <= 4.
    #[test]
    fn three_counts_agree() {
        for n in 1..=4 {
            let parts = enumerate_partitions(n).unwrap();
            let mut conditions = 0u64;
            let mut proper_downsets = 0u64;
            for bits in 0u64..(1 << parts.len()) {
                let chosen: BTreeSet<SetPartition> = parts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits >> i & 1 == 1)
                    .map(|(_, p)| p.clone())
                    .collect();
                let down = chosen
                    .iter()
                    .all(|m| m.covers_below().iter().all(|b| chosen.contains(b)));
                if down && !chosen.contains(&SetPartition::discrete(n)) {
                    conditions += 1;
                }
                if down && chosen.len() < parts.len() {
                    proper_downsets += 1;
                }
            }
            let antichains = all_antichains_bruteforce(n).len() as u64;
            assert_eq!(conditions, proper_downsets, "n={n}");
            assert_eq!(conditions, antichains, "n={n}");
            assert_eq!(conditions, count_conditions(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn counter_thread_sharding_agrees() {
        for threads in [1, 2, 4] {
            assert_eq!(count_conditions_forced(4, Some(threads)).unwrap(), 346);
        }
    }

    #[test]
    fn enumerate_conditions_matches_count() {
        let all3 = enumerate_conditions(3).unwrap();
        assert_eq!(all3.len(), 9);
        let all4 = enumerate_conditions(4).unwrap();
        assert_eq!(all4.len(), 346);
        for q in &all4 {
            QCondition::validate(4, q.members().iter().cloned()).unwrap();
        }
        let mut dedup = all4.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 346);
    }

    #[test]
    fn lattice_laws() {
        let all = enumerate_conditions(3).unwrap();
        let bot = QCondition::empty(3);
        for q in &all {
            assert_eq!(q.meet(&bot).unwrap(), bot);
            assert_eq!(&q.join(&bot).unwrap(), q);
        }
        for a in &all {
            for b in &all {
                let m = a.meet(b).unwrap();
                let j = a.join(b).unwrap();
                QCondition::validate(3, m.members().iter().cloned()).unwrap();
                QCondition::validate(3, j.members().iter().cloned()).unwrap();
            }
        }
        assert!(QCondition::empty(3).meet(&QCondition::empty(4)).is_err());
    }

    #[test]
    fn prop22_bijection_n4() {
        // from_antichain is a bijection from nonempty antichains onto the
        // conditions for n = 4
        let antichains = all_antichains_bruteforce(4);
        let mut images: Vec<QCondition> = antichains
            .iter()
            .map(|els| QCondition::from_antichain(&Antichain::new(4, els.clone()).unwrap()))
            .collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), antichains.len());
        assert_eq!(images, enumerate_conditions(4).unwrap());
        for els in antichains {
            let a = Antichain::new(4, els).unwrap();
            assert_eq!(QCondition::from_antichain(&a).to_antichain(), a);
        }
    }

    #[test]
    fn symmetric_conditions_n5() {
        let sym = symmetric_conditions(5).unwrap();
        assert_eq!(sym.len(), 9);
        let mut m_stable_found = 0;
        for m in 0..5 {
            let q = QCondition::m_stable(5, m).unwrap();
            if sym.contains(&q) {
                m_stable_found += 1;
            }
        }
        assert_eq!(m_stable_found, 5);
    }

    #[test]
    fn symmetric_conditions_n3_matches_brute_force() {
        let sym = symmetric_conditions(3).unwrap();
        let brute: Vec<QCondition> = enumerate_conditions(3)
            .unwrap()
            .into_iter()
            .filter(|q| {
                // S_3-invariance by checking the two generating transpositions
                let swaps = [vec![2, 1, 3], vec![1, 3, 2]];
                swaps.iter().all(|perm| {
                    let relabeled: BTreeSet<SetPartition> =
                        q.members().iter().map(|p| p.relabel(perm)).collect();
                    relabeled == *q.members()
                })
            })
            .collect();
        assert_eq!(sym, brute);
        assert_eq!(sym.len(), 3);
    }

    #[test]
    fn symmetric_conditions_are_valid_and_fixed() {
        for n in 2..=5 {
            let perms: Vec<Vec<usize>> = (1..n)
                .map(|i| {
                    let mut perm: Vec<usize> = (1..=n).collect();
                    perm.swap(i - 1, i);
                    perm
                })
                .collect();
            for q in symmetric_conditions(n).unwrap() {
                QCondition::validate(n, q.members().iter().cloned()).unwrap();
                for perm in &perms {
                    let relabeled: BTreeSet<SetPartition> =
                        q.members().iter().map(|p| p.relabel(perm)).collect();
                    assert_eq!(relabeled, *q.members());
                }
                // shape image downward closed in the integer-partition order
                let shapes: BTreeSet<_> = q.members().iter().map(|p| p.shape()).collect();
                for p in enumerate_partitions(n).unwrap() {
                    if shapes.contains(&p.shape()) {
                        for below in p.covers_below() {
                            assert!(shapes.contains(&below.shape()));
                        }
                    }
                }
                // every m_stable appears
            }
            let sym = symmetric_conditions(n).unwrap();
            for m in 0..n {
                assert!(sym.contains(&QCondition::m_stable(n, m).unwrap()));
            }
        }
    }

    #[test]
    fn antichain_text_round_trip() {
        for q in enumerate_conditions(3).unwrap() {
            let a = q.to_antichain();
            let text = a.to_text();
            assert!(text.is_empty() || text.contains('{'));
            assert_eq!(Antichain::parse_text(&text).unwrap(), a);
        }
        let a = Antichain::parse_text("{1,2}{3};{1,3}{2}").unwrap();
        assert_eq!(a.elements().len(), 2);
        assert!(Antichain::parse_text("{1,2,3};{1,2}{3}").is_err());
    }

    #[test]
    fn json_round_trip() {
        let q = QCondition::m_stable(4, 2).unwrap();
        let json = serde_json::to_string(&q).unwrap();
        let back: QCondition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q);
        // deserializing revalidates
        let bad = r#"{"n":3,"partitions":[[[1,2],[3]]]}"#;
        assert!(serde_json::from_str::<QCondition>(bad).is_err());
    }
}
