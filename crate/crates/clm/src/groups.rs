//! Finite abelian l-groups encoded as partitions of exponents.
//!
//! A group `A = Z/l^a1 + ... + Z/l^ar` with `a1 >= ... >= ar >= 1` is
//! represented by the sorted exponent list `[a1, ..., ar]`; the empty list is
//! the trivial group. All equality is partition equality, so values stand for
//! isomorphism classes.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::ClmError;

/// Isomorphism class of a finite abelian l-group, as a sorted partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupType {
    ell: u64,
    parts: Vec<u32>,
}

impl GroupType {
    /// Builds a group from any list of exponents; zero parts are dropped and
    /// the rest sorted non-increasing.
    pub fn new(ell: u64, parts: impl IntoIterator<Item = u32>) -> Self {
        let mut parts: Vec<u32> = parts.into_iter().filter(|&p| p > 0).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        GroupType { ell, parts }
    }

    pub fn trivial(ell: u64) -> Self {
        GroupType { ell, parts: Vec::new() }
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.parts.len()
    }

    /// Largest exponent a1, or 0 for the trivial group.
    pub fn max_exponent(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// log_l of the order, i.e. the partition sum.
    pub fn log_order(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// |A| as u128; panics on overflow (callers stay far below that).
    pub fn order(&self) -> u128 {
        (self.ell as u128).pow(self.log_order())
    }

    /// rank_{l^i} A = #{j : a_j >= i}, the dimension of l^{i-1}A / l^iA.
    pub fn rank_pow(&self, i: u32) -> usize {
        assert!(i >= 1, "rank_pow requires i >= 1");
        self.parts.iter().filter(|&&p| p >= i).count()
    }

    /// A / l^k A: each part becomes min(a_i, k).
    pub fn quotient_by_power(&self, k: u32) -> GroupType {
        GroupType::new(self.ell, self.parts.iter().map(|&p| p.min(k)))
    }

    /// A_{+i} = A + (Z/l)^i.
    pub fn pad_elementary(&self, i: usize) -> GroupType {
        let mut parts = self.parts.clone();
        parts.extend(std::iter::repeat(1).take(i));
        GroupType { ell: self.ell, parts }
    }

    /// Conjugate partition: entry i-1 is rank_{l^i} A.
    pub fn conjugate(&self) -> Vec<usize> {
        let max = self.max_exponent();
        (1..=max).map(|i| self.rank_pow(i)).collect()
    }

    /// Poset relation on G: true iff A injects into B.
    ///
    /// Criterion: componentwise domination of the sorted parts after zero
    /// padding (equivalently of the conjugates). Backed by a brute-force
    /// injection search in the tests.
    pub fn embeds(&self, other: &GroupType) -> bool {
        assert_eq!(self.ell, other.ell, "embeds requires matching l");
        if self.parts.len() > other.parts.len() {
            return false;
        }
        self.parts.iter().zip(&other.parts).all(|(a, b)| a <= b)
    }

    /// Whether some injection A -> B has elementary abelian cokernel, i.e.
    /// b_i - a_i lies in {0, 1} componentwise after zero padding.
    pub fn elementary_cokernel_shape(&self, other: &GroupType) -> bool {
        assert_eq!(self.ell, other.ell);
        if self.parts.len() > other.parts.len() {
            return false;
        }
        (0..other.parts.len()).all(|i| {
            let a = self.parts.get(i).copied().unwrap_or(0);
            let b = other.parts[i];
            b == a || b == a + 1
        })
    }

    /// Canonical enumeration order: by order, then lexicographic parts.
    pub fn canonical_cmp(&self, other: &GroupType) -> Ordering {
        // Within an order class, larger leading exponents come first, so
        // e.g. 3^[2] precedes 3^[1,1].
        self.log_order()
            .cmp(&other.log_order())
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for GroupType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupType {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ell.cmp(&other.ell).then_with(|| self.canonical_cmp(other))
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^[", self.ell)?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for GroupType {
    type Err = ClmError;

    /// Parses the textual notation "l^[a1,a2,...]", e.g. "3^[2,1]" or "3^[]".
    fn from_str(s: &str) -> Result<Self, ClmError> {
        let bad = || ClmError::Config(format!("cannot parse group notation {s:?}"));
        let (ell, rest) = s.split_once("^[").ok_or_else(bad)?;
        let ell: u64 = ell.trim().parse().map_err(|_| bad())?;
        let inner = rest.strip_suffix(']').ok_or_else(bad)?;
        let mut parts = Vec::new();
        for piece in inner.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let p: u32 = piece.parse().map_err(|_| bad())?;
            if p == 0 {
                return Err(bad());
            }
            parts.push(p);
        }
        let sorted = parts.windows(2).all(|w| w[0] >= w[1]);
        if !sorted {
            return Err(ClmError::Config(format!(
                "group notation {s:?} must list exponents non-increasing"
            )));
        }
        Ok(GroupType::new(ell, parts))
    }
}

/// Finite window into the poset G.
#[derive(Debug, Clone)]
pub struct GroupEnumeration {
    pub ell: u64,
    /// Enumerate every A with |A| <= l^max_log_order.
    pub max_log_order: u32,
    /// Optional restriction to a fixed l-rank.
    pub rank_filter: Option<usize>,
}

impl GroupEnumeration {
    pub fn new(ell: u64, max_log_order: u32) -> Self {
        GroupEnumeration { ell, max_log_order, rank_filter: None }
    }

    pub fn with_rank(mut self, rank: usize) -> Self {
        self.rank_filter = Some(rank);
        self
    }
}

/// All groups in the window, in the canonical (order, lexicographic) order.
pub fn enumerate_groups(spec: &GroupEnumeration) -> Vec<GroupType> {
    let mut out = Vec::new();
    for n in 0..=spec.max_log_order {
        let mut partitions = Vec::new();
        partitions_of(n, n, &mut Vec::new(), &mut partitions);
        partitions.sort_by(|a, b| b.cmp(a));
        for parts in partitions {
            let g = GroupType::new(spec.ell, parts);
            if spec.rank_filter.map_or(true, |r| g.rank() == r) {
                out.push(g);
            }
        }
    }
    out
}

fn partitions_of(n: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    let top = max_part.min(n);
    for p in (1..=top).rev() {
        prefix.push(p);
        partitions_of(n - p, p, prefix, out);
        prefix.pop();
    }
}

/// All partitions dominated by `upper` componentwise and dominating `lower`,
/// i.e. the closed interval [lower, upper] in the embedding order.
pub fn interval(lower: &GroupType, upper: &GroupType) -> Vec<GroupType> {
    assert_eq!(lower.ell(), upper.ell());
    if !lower.embeds(upper) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    interval_rec(lower.parts(), upper.parts(), 0, upper.max_exponent(), &mut current, &mut out);
    let mut groups: Vec<GroupType> = out
        .into_iter()
        .map(|parts| GroupType::new(lower.ell(), parts))
        .collect();
    groups.sort();
    groups.dedup();
    groups
}

fn interval_rec(
    lower: &[u32],
    upper: &[u32],
    idx: usize,
    prev: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if idx == upper.len() {
        out.push(current.clone());
        return;
    }
    let lo = lower.get(idx).copied().unwrap_or(0);
    let hi = upper[idx].min(prev);
    for p in lo..=hi {
        current.push(p);
        interval_rec(lower, upper, idx + 1, if p == 0 { 0 } else { p }, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(parts: &[u32]) -> GroupType {
        GroupType::new(3, parts.iter().copied())
    }

    #[test]
    fn rank_pow_examples() {
        assert_eq!(g(&[2, 1]).rank_pow(1), 2);
        assert_eq!(g(&[2, 1]).rank_pow(2), 1);
        assert_eq!(g(&[]).rank_pow(1), 0);
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(g(&[3, 1]).quotient_by_power(2), g(&[2, 1]));
        assert_eq!(g(&[2]).quotient_by_power(0), g(&[]));
        assert_eq!(g(&[1, 1]).quotient_by_power(5), g(&[1, 1]));
    }

    #[test]
    fn pad_examples() {
        assert_eq!(g(&[2]).pad_elementary(2), g(&[2, 1, 1]));
        assert_eq!(g(&[]).pad_elementary(1), g(&[1]));
        assert_eq!(g(&[1]).pad_elementary(0), g(&[1]));
    }

    #[test]
    fn embeds_examples() {
        assert!(g(&[2, 1]).embeds(&g(&[2, 2])));
        assert!(!g(&[1, 1]).embeds(&g(&[2])));
        assert!(!g(&[3]).embeds(&g(&[2, 2])));
    }

    #[test]
    fn enumerate_examples() {
        let all = enumerate_groups(&GroupEnumeration::new(3, 3));
        assert_eq!(all.len(), 7);
        let names: Vec<String> = all.iter().map(|a| a.to_string()).collect();
        assert_eq!(
            names,
            ["3^[]", "3^[1]", "3^[2]", "3^[1,1]", "3^[3]", "3^[2,1]", "3^[1,1,1]"]
        );
        assert_eq!(enumerate_groups(&GroupEnumeration::new(3, 0)), vec![g(&[])]);
        let rank2 = enumerate_groups(&GroupEnumeration::new(3, 4).with_rank(2));
        assert_eq!(rank2, vec![g(&[1, 1]), g(&[2, 1]), g(&[3, 1]), g(&[2, 2])]);
    }

    #[test]
    fn rank_pow_monotone() {
        for a in enumerate_groups(&GroupEnumeration::new(3, 6)) {
            let mut prev = a.rank_pow(1);
            for i in 2..10 {
                let cur = a.rank_pow(i);
                assert!(cur <= prev);
                prev = cur;
            }
            assert_eq!(a.rank_pow(a.max_exponent() + 1), 0);
        }
    }

    #[test]
    fn quotient_pad_relations() {
        for a in enumerate_groups(&GroupEnumeration::new(3, 5)) {
            assert_eq!(a.quotient_by_power(a.max_exponent().max(1)), a.clone());
            for i in 0..3 {
                assert_eq!(a.pad_elementary(i).quotient_by_power(1).rank(), a.rank() + i);
            }
        }
    }

    #[test]
    fn embeds_is_partial_order() {
        let all = enumerate_groups(&GroupEnumeration::new(3, 6));
        for a in &all {
            assert!(a.embeds(a));
            for b in &all {
                if a.embeds(b) && b.embeds(a) {
                    assert_eq!(a, b);
                }
                for c in &all {
                    if a.embeds(b) && b.embeds(c) {
                        assert!(a.embeds(c));
                    }
                }
            }
        }
    }

    #[test]
    fn interval_is_embedding_interval() {
        let all = enumerate_groups(&GroupEnumeration::new(3, 4));
        for a in &all {
            for b in &all {
                let iv = interval(a, b);
                for c in &all {
                    let inside = a.embeds(c) && c.embeds(b);
                    assert_eq!(inside, iv.contains(c), "a={a} b={b} c={c}");
                }
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["3^[]", "3^[1]", "3^[2,1]", "5^[3,3,1]"] {
            let a: GroupType = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert!("3^[1,2]".parse::<GroupType>().is_err());
        assert!("3^[0]".parse::<GroupType>().is_err());
        assert!("nonsense".parse::<GroupType>().is_err());
    }
}
