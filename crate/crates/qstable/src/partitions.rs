//! Set partitions of `{1..n}` under the refinement order, their enumeration,
//! shapes, and symmetry orbits.
//!
//! The order convention throughout the crate: `p <= q` iff `p` is *refined by*
//! `q`, so coarser partitions sit lower. The one-block partition is the
//! minimum of `Part(n)` and the discrete partition `{{1},...,{n}}` is the
//! maximum.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Enumeration is capped here; `Bell(10) = 115975` is the largest ground set
/// the exhaustive suites can sweep.
pub const MAX_ENUMERATION_N: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("ground-set size {0} out of range (expected 1..={MAX_ENUMERATION_N})")]
    NOutOfRange(usize),
    #[error("blocks do not partition {{1..{n}}}: element {element} {problem}")]
    NotAPartition {
        n: usize,
        element: usize,
        problem: &'static str,
    },
    #[error("empty block in partition")]
    EmptyBlock,
    #[error("mismatched ground sets: {0} vs {1}")]
    MismatchedN(usize, usize),
    #[error("parse error at byte {at}: {message}")]
    Parse { at: usize, message: String },
}

/// A partition of `{1..n}` into disjoint nonempty blocks.
///
/// Canonical form: blocks sorted by minimum element, elements sorted within
/// each block, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds a partition from blocks, validating and canonicalizing.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        if n == 0 {
            return Err(PartitionError::NOutOfRange(0));
        }
        let mut seen = vec![false; n + 1];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            for &x in b {
                if x == 0 || x > n {
                    return Err(PartitionError::NotAPartition {
                        n,
                        element: x,
                        problem: "outside the ground set",
                    });
                }
                if seen[x] {
                    return Err(PartitionError::NotAPartition {
                        n,
                        element: x,
                        problem: "appears twice",
                    });
                }
                seen[x] = true;
            }
        }
        if let Some(missing) = (1..=n).find(|&x| !seen[x]) {
            return Err(PartitionError::NotAPartition {
                n,
                element: missing,
                problem: "is missing",
            });
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    /// Builds a partition from a dense block-index assignment: `assign[i]` is
    /// the block of element `i+1`. Block indices may be arbitrary labels.
    pub fn from_block_indices(assign: &[usize]) -> Self {
        let n = assign.len();
        assert!(n > 0, "empty assignment");
        let mut labels: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &a) in assign.iter().enumerate() {
            match labels.iter().position(|&l| l == a) {
                Some(j) => blocks[j].push(i + 1),
                None => {
                    labels.push(a);
                    blocks.push(vec![i + 1]);
                }
            }
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        SetPartition { n, blocks }
    }

    /// Dense representation: element `i+1` maps to the index of its block in
    /// canonical order.
    pub fn block_indices(&self) -> Vec<usize> {
        let mut assign = vec![0usize; self.n];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &x in b {
                assign[x - 1] = bi;
            }
        }
        assign
    }

    pub fn one_block(n: usize) -> Self {
        SetPartition {
            n,
            blocks: vec![(1..=n).collect()],
        }
    }

    pub fn discrete(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (1..=n).map(|x| vec![x]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.n
    }

    pub fn is_one_block(&self) -> bool {
        self.blocks.len() == 1
    }

    /// The block containing `element`.
    pub fn block_of(&self, element: usize) -> &[usize] {
        self.blocks
            .iter()
            .find(|b| b.binary_search(&element).is_ok())
            .expect("element outside ground set")
    }

    /// `self <= other` in the refinement order: every block of `other` is
    /// contained in some block of `self`. Panics if the ground sets differ;
    /// use [`refines`] for the checked variant.
    pub fn refined_by(&self, other: &SetPartition) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mine = self.block_indices();
        other
            .blocks
            .iter()
            .all(|b| b.iter().all(|&x| mine[x - 1] == mine[b[0] - 1]))
    }

    /// Strict refinement `self < other`.
    pub fn strictly_refined_by(&self, other: &SetPartition) -> bool {
        self != other && self.refined_by(other)
    }

    pub fn comparable(&self, other: &SetPartition) -> bool {
        self.refined_by(other) || other.refined_by(self)
    }

    /// All partitions obtained by merging exactly two blocks of `self`; these
    /// are precisely the lower covers of `self` in the refinement order.
    pub fn covers_below(&self) -> Vec<SetPartition> {
        let k = self.blocks.len();
        let mut out = Vec::with_capacity(k * (k.saturating_sub(1)) / 2);
        for i in 0..k {
            for j in (i + 1)..k {
                let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(k - 1);
                for (t, b) in self.blocks.iter().enumerate() {
                    if t == j {
                        continue;
                    }
                    if t == i {
                        let mut merged = b.clone();
                        merged.extend_from_slice(&self.blocks[j]);
                        merged.sort_unstable();
                        blocks.push(merged);
                    } else {
                        blocks.push(b.clone());
                    }
                }
                blocks.sort_unstable_by_key(|b| b[0]);
                out.push(SetPartition { n: self.n, blocks });
            }
        }
        out
    }

    /// Sorted block sizes; constant on S_n-orbits and separating them.
    pub fn shape(&self) -> IntegerPartition {
        let mut parts: Vec<usize> = self.blocks.iter().map(|b| b.len()).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        IntegerPartition { parts }
    }

    /// Canonical orbit representative under the S_n action: blocks are
    /// consecutive runs of `{1..n}` in weakly decreasing size.
    pub fn orbit_representative(&self) -> SetPartition {
        let shape = self.shape();
        let mut blocks = Vec::with_capacity(shape.parts.len());
        let mut next = 1usize;
        for &s in &shape.parts {
            blocks.push((next..next + s).collect());
            next += s;
        }
        SetPartition { n: self.n, blocks }
    }

    /// Applies a permutation of `{1..n}` given as `perm[i] = image of i+1`.
    pub fn relabel(&self, perm: &[usize]) -> SetPartition {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&x| perm[x - 1]).collect())
            .collect();
        SetPartition::new(self.n, blocks).expect("relabeling preserves validity")
    }
}

/// `true` iff `p1` is below `p2` in the refinement order (`p1` is refined by
/// `p2`). Coarser partitions are smaller.
pub fn refines(p1: &SetPartition, p2: &SetPartition) -> Result<bool, PartitionError> {
    if p1.n != p2.n {
        return Err(PartitionError::MismatchedN(p1.n, p2.n));
    }
    Ok(p1.refined_by(p2))
}

/// Every partition of `{1..n}` exactly once, ordered by the lexicographic
/// order of restricted-growth strings. The one-block partition comes first
/// and the discrete partition last.
pub fn enumerate_partitions(n: usize) -> Result<Vec<SetPartition>, PartitionError> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(PartitionError::NOutOfRange(n));
    }
    let mut out = Vec::new();
    let mut assign = vec![0usize; n];
    fn rec(assign: &mut Vec<usize>, pos: usize, max_used: usize, out: &mut Vec<SetPartition>) {
        if pos == assign.len() {
            out.push(SetPartition::from_block_indices(assign));
            return;
        }
        for label in 0..=(max_used + 1) {
            assign[pos] = label;
            rec(assign, pos + 1, max_used.max(label), out);
        }
    }
    // element 1 always starts block 0
    rec(&mut assign, 1, 0, &mut out);
    Ok(out)
}

/// A weakly decreasing sequence of positive integers; the shape of a set
/// partition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IntegerPartition {
    parts: Vec<usize>,
}

impl IntegerPartition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self, PartitionError> {
        if parts.contains(&0) {
            return Err(PartitionError::EmptyBlock);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(IntegerPartition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn sum(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }
}

/// All integer partitions of `n`, most-parts-last deterministic order.
pub fn enumerate_integer_partitions(n: usize) -> Vec<IntegerPartition> {
    fn rec(remaining: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<IntegerPartition>) {
        if remaining == 0 {
            out.push(IntegerPartition { parts: acc.clone() });
            return;
        }
        for next in (1..=remaining.min(max)).rev() {
            acc.push(next);
            rec(remaining - next, next, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for SetPartition {
    /// Text form: blocks as brace lists, e.g. `{1,2}{3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            write!(f, "{{")?;
            for (i, x) in b.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for SetPartition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let mut pos = 0usize;
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut max = 0usize;
        while pos < bytes.len() {
            if bytes[pos] != b'{' {
                return Err(PartitionError::Parse {
                    at: pos,
                    message: "expected '{'".into(),
                });
            }
            pos += 1;
            let mut block = Vec::new();
            loop {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(PartitionError::Parse {
                        at: pos,
                        message: "expected an element".into(),
                    });
                }
                let x: usize = s[start..pos].parse().map_err(|_| PartitionError::Parse {
                    at: start,
                    message: "bad number".into(),
                })?;
                max = max.max(x);
                block.push(x);
                match bytes.get(pos) {
                    Some(b',') => pos += 1,
                    Some(b'}') => {
                        pos += 1;
                        break;
                    }
                    _ => {
                        return Err(PartitionError::Parse {
                            at: pos,
                            message: "expected ',' or '}'".into(),
                        })
                    }
                }
            }
            blocks.push(block);
        }
        if blocks.is_empty() {
            return Err(PartitionError::Parse {
                at: 0,
                message: "empty partition".into(),
            });
        }
        SetPartition::new(max, blocks)
    }
}

impl Serialize for SetPartition {
    /// JSON form: array of arrays of integers, e.g. `[[1,2],[3]]`.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.blocks.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let blocks: Vec<Vec<usize>> = Vec::deserialize(deserializer)?;
        let n = blocks.iter().flatten().copied().max().unwrap_or(0);
        SetPartition::new(n, blocks).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    /// Independent oracle: counts partitions by the textbook recursion
    /// (element n either joins one of the blocks of a partition of n-1 or
    /// starts its own).
    fn bell_oracle(n: usize) -> usize {
        fn rec(blocks: &mut Vec<Vec<usize>>, next: usize, n: usize, count: &mut usize) {
            if next > n {
                *count += 1;
                return;
            }
            for i in 0..blocks.len() {
                blocks[i].push(next);
                rec(blocks, next + 1, n, count);
                blocks[i].pop();
            }
            blocks.push(vec![next]);
            rec(blocks, next + 1, n, count);
            blocks.pop();
        }
        let mut count = 0;
        rec(&mut Vec::new(), 1, n, &mut count);
        count
    }

    #[test]
    fn enumerate_n1() {
        let all = enumerate_partitions(1).unwrap();
        assert_eq!(all, vec![p("{1}")]);
    }

    #[test]
    fn enumerate_matches_bell_oracle() {
        assert_eq!(bell_oracle(3), 5);
        assert_eq!(bell_oracle(5), 52);
        for n in 1..=6 {
            let all = enumerate_partitions(n).unwrap();
            assert_eq!(all.len(), bell_oracle(n), "n={n}");
            // exactly once
            let mut dedup = all.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
        }
    }

    #[test]
    fn enumerate_bounds() {
        assert!(enumerate_partitions(0).is_err());
        assert!(enumerate_partitions(11).is_err());
    }

    #[test]
    fn enumeration_order_endpoints() {
        let all = enumerate_partitions(4).unwrap();
        assert_eq!(all[0], SetPartition::one_block(4));
        assert_eq!(all[all.len() - 1], SetPartition::discrete(4));
    }

    #[test]
    fn refines_examples() {
        assert!(refines(&p("{1,2,3}"), &p("{1,2}{3}")).unwrap());
        assert!(!refines(&p("{1,2}{3}"), &p("{1,3}{2}")).unwrap());
        assert!(!refines(&p("{1,2}{3}"), &p("{1,3}{2}")).unwrap());
        assert!(refines(&p("{1}{2}"), &p("{1,2,3}")).is_err());
    }

    #[test]
    fn refinement_is_partial_order() {
        for n in 1..=5 {
            let all = enumerate_partitions(n).unwrap();
            for a in &all {
                assert!(a.refined_by(a), "reflexive");
            }
            for a in &all {
                for b in &all {
                    if a.refined_by(b) && b.refined_by(a) {
                        assert_eq!(a, b, "antisymmetric");
                    }
                }
            }
            if n <= 4 {
                for a in &all {
                    for b in &all {
                        for c in &all {
                            if a.refined_by(b) && b.refined_by(c) {
                                assert!(a.refined_by(c), "transitive");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn one_block_minimum_discrete_maximum() {
        for n in 1..=5 {
            let all = enumerate_partitions(n).unwrap();
            let bot = SetPartition::one_block(n);
            let top = SetPartition::discrete(n);
            for q in &all {
                assert!(bot.refined_by(q));
                assert!(q.refined_by(&top));
            }
        }
    }

    #[test]
    fn covers_below_examples() {
        let covers = p("{1}{2}{3}").covers_below();
        let expect = vec![p("{1,2}{3}"), p("{1,3}{2}"), p("{1}{2,3}")];
        let mut got = covers.clone();
        got.sort();
        let mut expect = expect;
        expect.sort();
        assert_eq!(got, expect);
        assert!(p("{1,2,3}").covers_below().is_empty());
    }

    #[test]
    fn covers_below_count_and_covering_property() {
        let all = enumerate_partitions(4).unwrap();
        for q in &all {
            let covers = q.covers_below();
            let k = q.num_blocks();
            assert_eq!(covers.len(), k * (k - 1) / 2);
            for c in &covers {
                assert!(c.strictly_refined_by(q));
                // no strictly intermediate partition
                for m in &all {
                    assert!(
                        !(c.strictly_refined_by(m) && m.strictly_refined_by(q)),
                        "found {m} strictly between {c} and {q}"
                    );
                }
            }
        }
    }

    #[test]
    fn shape_examples() {
        assert_eq!(
            p("{1,2}{3}").shape(),
            IntegerPartition::new(vec![2, 1]).unwrap()
        );
        assert_eq!(enumerate_integer_partitions(5).len(), 7);
        let shapes: std::collections::BTreeSet<_> = enumerate_partitions(5)
            .unwrap()
            .iter()
            .map(|q| q.shape())
            .collect();
        assert_eq!(shapes.len(), 7);
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        fn rec(rest: &mut Vec<usize>, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if rest.is_empty() {
                out.push(acc.clone());
                return;
            }
            for i in 0..rest.len() {
                let x = rest.remove(i);
                acc.push(x);
                rec(rest, acc, out);
                acc.pop();
                rest.insert(i, x);
            }
        }
        let mut out = Vec::new();
        rec(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn shape_separates_orbits() {
        for n in [4usize, 5] {
            let perms = permutations(n);
            let all = enumerate_partitions(n).unwrap();
            for q in &all {
                // shape is constant on the orbit
                for perm in &perms {
                    assert_eq!(q.relabel(perm).shape(), q.shape());
                }
            }
            // equal shape implies same orbit (via the canonical representative)
            for a in &all {
                for b in &all {
                    if a.shape() == b.shape() {
                        assert!(perms.iter().any(|perm| &a.relabel(perm) == b));
                    }
                }
            }
        }
    }

    #[test]
    fn orbit_representative_is_orbit_invariant() {
        let all = enumerate_partitions(4).unwrap();
        for q in &all {
            let rep = q.orbit_representative();
            assert_eq!(rep.shape(), q.shape());
            for perm in permutations(4) {
                assert_eq!(q.relabel(&perm).orbit_representative(), rep);
            }
        }
    }

    #[test]
    fn orbit_sizes_n3() {
        let all = enumerate_partitions(3).unwrap();
        let mut by_shape: std::collections::BTreeMap<IntegerPartition, usize> = Default::default();
        for q in &all {
            *by_shape.entry(q.shape()).or_default() += 1;
        }
        assert_eq!(by_shape[&IntegerPartition::new(vec![3]).unwrap()], 1);
        assert_eq!(by_shape[&IntegerPartition::new(vec![2, 1]).unwrap()], 3);
        assert_eq!(by_shape[&IntegerPartition::new(vec![1, 1, 1]).unwrap()], 1);
    }

    #[test]
    fn text_and_json_round_trip() {
        for n in 1..=5 {
            for q in enumerate_partitions(n).unwrap() {
                let text: SetPartition = q.to_string().parse().unwrap();
                assert_eq!(text, q);
                let json = serde_json::to_string(&q).unwrap();
                let back: SetPartition = serde_json::from_str(&json).unwrap();
                assert_eq!(back, q);
            }
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("".parse::<SetPartition>().is_err());
        assert!("{1,2}{2}".parse::<SetPartition>().is_err());
        assert!("{1}{3}".parse::<SetPartition>().is_err());
        assert!("{}".parse::<SetPartition>().is_err());
        assert!("1,2".parse::<SetPartition>().is_err());
    }
}
