//! Permutations of ℕ built from consecutive blocks, each permuted cyclically.
//!
//! The block sizes come either from a symbolic infinite set (sizes are its
//! elements in increasing order, so each size occurs once) or from an
//! eventually periodic sequence (a finite prefix followed by a repeating
//! period, so repeated sizes are allowed).  Block `i` is the interval of ℕ
//! starting at the sum of the earlier sizes; the block `{a_1 < … < a_ℓ}` is
//! cycled as `a_1 ↦ a_2 ↦ … ↦ a_ℓ ↦ a_1`.
//!
//! The induced map is a total bijection of ℕ, so its index is 0 and it has no
//! rays.  Exact composition of two block permutations generally leaves the
//! class and is intentionally not provided; finite windows of compositions
//! are available through the brute-force machinery instead.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cycletype::{CardinalCount, CycleTypeSpec};
use crate::setspec::{SetSpec, Universe};
use crate::PointMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SizeSource {
    /// Sizes are the elements of an infinite set with minimum ≥ 1, ascending.
    FromSet(SetSpec),
    /// Sizes `prefix[0], …, prefix[k-1], period[0], period[1], …` repeating.
    FromSeq { prefix: Vec<u64>, period: Vec<u64> },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockPermError {
    #[error("block sizes must come from a nat-universe set")]
    NotNatUniverse,
    #[error("block size set must be infinite")]
    FiniteSizeSet,
    #[error("block sizes must be at least 1")]
    ZeroSize,
    #[error("the repeating period must be nonempty")]
    EmptyPeriod,
}

/// A permutation of ℕ that cycles each block of a consecutive-block partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPermutation {
    source: SizeSource,
}

impl BlockPermutation {
    pub fn from_set(sizes: SetSpec) -> Result<BlockPermutation, BlockPermError> {
        if sizes.universe() != Universe::Nat {
            return Err(BlockPermError::NotNatUniverse);
        }
        if !sizes.is_infinite() {
            return Err(BlockPermError::FiniteSizeSet);
        }
        if sizes.contains(0) {
            return Err(BlockPermError::ZeroSize);
        }
        Ok(BlockPermutation {
            source: SizeSource::FromSet(sizes),
        })
    }

    pub fn from_seq(prefix: Vec<u64>, period: Vec<u64>) -> Result<BlockPermutation, BlockPermError> {
        if period.is_empty() {
            return Err(BlockPermError::EmptyPeriod);
        }
        if prefix.iter().chain(period.iter()).any(|&s| s == 0) {
            return Err(BlockPermError::ZeroSize);
        }
        Ok(BlockPermutation {
            source: SizeSource::FromSeq { prefix, period },
        })
    }

    pub fn source(&self) -> &SizeSource {
        &self.source
    }

    /// The block sizes in order.
    pub fn sizes(&self) -> SizeIter<'_> {
        match &self.source {
            SizeSource::FromSet(s) => SizeIter::Set(s.iter_members()),
            SizeSource::FromSeq { prefix, period } => SizeIter::Seq {
                prefix,
                period,
                pos: 0,
            },
        }
    }

    /// The block containing `n`, as `(start, size)`.
    fn block_of(&self, n: u64) -> (u64, u64) {
        let mut start = 0u64;
        for size in self.sizes() {
            if n < start + size {
                return (start, size);
            }
            start += size;
        }
        unreachable!("the blocks partition the naturals");
    }

    /// The image of `n`: the next point of its block, cyclically.
    pub fn apply_block(&self, n: u64) -> u64 {
        let (start, size) = self.block_of(n);
        if n + 1 < start + size {
            n + 1
        } else {
            start
        }
    }

    /// The exact cycle type.  Sizes from a set `x` give one `ℓ`-cycle per
    /// `ℓ ∈ x`; sizes from a sequence give ℵ₀ many `ℓ`-cycles for each `ℓ` in
    /// the period and a finite count for the remaining prefix sizes.
    pub fn cycle_type_of(&self) -> CycleTypeSpec {
        match &self.source {
            SizeSource::FromSet(x) => {
                CycleTypeSpec::new(vec![(x.clone(), CardinalCount::Fin(1))], 0, (0, 0))
                    .expect("size set is a valid length class")
            }
            SizeSource::FromSeq { prefix, period } => {
                let omega: BTreeSet<u64> = period.iter().copied().collect();
                let mut finite: BTreeMap<u64, u64> = BTreeMap::new();
                for &s in prefix {
                    if !omega.contains(&s) {
                        *finite.entry(s).or_insert(0) += 1;
                    }
                }
                let mut classes: Vec<(SetSpec, CardinalCount)> = Vec::new();
                if !omega.is_empty() {
                    let lens = SetSpec::finite(Universe::Nat, omega.iter().map(|&s| s as i64))
                        .expect("period sizes are naturals");
                    classes.push((lens, CardinalCount::Omega));
                }
                let mut by_count: BTreeMap<u64, Vec<i64>> = BTreeMap::new();
                for (s, c) in finite {
                    by_count.entry(c).or_default().push(s as i64);
                }
                for (count, lens) in by_count {
                    let lens = SetSpec::finite(Universe::Nat, lens).expect("sizes are naturals");
                    classes.push((lens, CardinalCount::Fin(count)));
                }
                CycleTypeSpec::new(classes, 0, (0, 0))
                    .expect("classes are disjoint by construction")
            }
        }
    }

    /// The restriction to `[0, w)`: images inside the window for points of
    /// complete blocks, plus the list of points whose block straddles `w`.
    pub fn window_of(&self, w: u64) -> BlockWindow {
        let mut table: Vec<Option<u64>> = vec![None; w as usize];
        let mut incomplete: Vec<u64> = Vec::new();
        let mut start = 0u64;
        for size in self.sizes() {
            if start >= w {
                break;
            }
            if start + size <= w {
                for n in start..start + size {
                    table[n as usize] = Some(if n + 1 < start + size { n + 1 } else { start });
                }
            } else {
                for n in start..w {
                    incomplete.push(n);
                }
            }
            start += size;
        }
        BlockWindow { table, incomplete }
    }
}

/// Restriction of a block permutation to an initial window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockWindow {
    /// `table[n]` is the image of `n` when its block is complete in-window.
    pub table: Vec<Option<u64>>,
    /// Points whose block straddles the window end.
    pub incomplete: Vec<u64>,
}

pub enum SizeIter<'a> {
    Set(crate::setspec::MemberIter),
    Seq {
        prefix: &'a [u64],
        period: &'a [u64],
        pos: usize,
    },
}

impl Iterator for SizeIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        match self {
            SizeIter::Set(it) => it.next().map(|v| v as u64),
            SizeIter::Seq {
                prefix,
                period,
                pos,
            } => {
                let v = if *pos < prefix.len() {
                    prefix[*pos]
                } else {
                    period[(*pos - prefix.len()) % period.len()]
                };
                *pos += 1;
                Some(v)
            }
        }
    }
}

impl PointMap for BlockPermutation {
    fn image(&self, n: u64) -> Option<u64> {
        Some(self.apply_block(n))
    }
}

impl fmt::Display for BlockPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            SizeSource::FromSet(s) => write!(f, "blockperm sizes from {s}"),
            SizeSource::FromSeq { prefix, period } => {
                let pre: Vec<String> = prefix.iter().map(|v| v.to_string()).collect();
                let per: Vec<String> = period.iter().map(|v| v.to_string()).collect();
                if pre.is_empty() {
                    write!(f, "blockperm sizes seq {{ repeat {} }}", per.join(" "))
                } else {
                    write!(
                        f,
                        "blockperm sizes seq {{ {} | repeat {} }}",
                        pre.join(" "),
                        per.join(" ")
                    )
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setspec::Atom;

    fn paper_x() -> SetSpec {
        SetSpec::new(Universe::Nat, vec![Atom::periodic(10, 1, [0])], [2, 5], []).unwrap()
    }

    fn pi_x() -> BlockPermutation {
        BlockPermutation::from_set(paper_x()).unwrap()
    }

    #[test]
    fn apply_block_examples() {
        // Blocks of pi_x: {0,1}, {2..6}, {7..16}, ...
        let p = pi_x();
        assert_eq!(p.apply_block(6), 2, "the 5-cycle closes");
        assert_eq!(p.apply_block(0), 1);
        assert_eq!(p.apply_block(1), 0);
        let tau = BlockPermutation::from_seq(vec![], vec![3]).unwrap();
        assert_eq!(tau.apply_block(4), 5, "inside block {{3,4,5}}");
        assert_eq!(tau.apply_block(5), 3);
    }

    #[test]
    fn apply_block_is_bijective_on_a_window() {
        for p in [
            pi_x(),
            BlockPermutation::from_seq(vec![4], vec![3]).unwrap(),
            BlockPermutation::from_seq(vec![1, 1], vec![2, 5]).unwrap(),
        ] {
            let w = 200u64;
            let mut seen = vec![false; w as usize + 2];
            for n in 0..w {
                let v = p.apply_block(n);
                assert!(!seen[v as usize], "image {v} hit twice");
                seen[v as usize] = true;
            }
        }
    }

    #[test]
    fn iterating_a_complete_block_returns_to_start() {
        let p = pi_x();
        // Block {2..6} has length 5.
        for start in [2u64, 3, 4, 5, 6] {
            let mut cur = start;
            for _ in 0..5 {
                cur = p.apply_block(cur);
            }
            assert_eq!(cur, start);
        }
    }

    #[test]
    fn cycle_type_from_set() {
        let t = pi_x().cycle_type_of();
        assert_eq!(t.kappa(2), CardinalCount::Fin(1));
        assert_eq!(t.kappa(5), CardinalCount::Fin(1));
        assert_eq!(t.kappa(3), CardinalCount::Fin(0));
        assert_eq!(t.kappa(10), CardinalCount::Fin(1));
        assert_eq!(t.kappa(4721), CardinalCount::Fin(1));
        assert_eq!(t.kappa0(), 0);
        assert_eq!(t.ray_data(), (0, 0));
    }

    #[test]
    fn cycle_type_from_seq() {
        let t = BlockPermutation::from_seq(vec![4], vec![3])
            .unwrap()
            .cycle_type_of();
        assert_eq!(t.kappa(4), CardinalCount::Fin(1));
        assert_eq!(t.kappa(3), CardinalCount::Omega);
        assert_eq!(t.kappa(5), CardinalCount::Fin(0));
    }

    #[test]
    fn cycle_type_geometric_support() {
        let x = SetSpec::new(Universe::Nat, vec![Atom::geometric(1, 2)], [], []).unwrap();
        let t = BlockPermutation::from_set(x.clone())
            .unwrap()
            .cycle_type_of();
        assert_eq!(t.kappa(8), CardinalCount::Fin(1));
        assert_eq!(t.kappa(6), CardinalCount::Fin(0));
        // The support of the type is exactly x.
        let support = t.count_class_union(CardinalCount::Fin(1)).unwrap();
        assert_eq!(
            support.compare(&x).unwrap(),
            crate::setspec::SetComparison::Equal
        );
    }

    #[test]
    fn window_examples() {
        let p = pi_x();
        let w = p.window_of(7);
        assert!(w.incomplete.is_empty(), "two complete blocks fill [0,7)");
        assert_eq!(w.table[6], Some(2));
        assert_eq!(w.table[0], Some(1));
        let tau = BlockPermutation::from_seq(vec![], vec![3]).unwrap();
        let w = tau.window_of(5);
        assert_eq!(w.table[0..3], [Some(1), Some(2), Some(0)]);
        assert_eq!(w.table[3], None);
        assert_eq!(w.incomplete, vec![3, 4]);
    }

    #[test]
    fn constructor_rejects_bad_sources() {
        assert_eq!(
            BlockPermutation::from_seq(vec![3], vec![]).unwrap_err(),
            BlockPermError::EmptyPeriod
        );
        assert_eq!(
            BlockPermutation::from_seq(vec![0], vec![3]).unwrap_err(),
            BlockPermError::ZeroSize
        );
        let fin = SetSpec::finite(Universe::Nat, [3, 4]).unwrap();
        assert_eq!(
            BlockPermutation::from_set(fin).unwrap_err(),
            BlockPermError::FiniteSizeSet
        );
        let with_zero =
            SetSpec::new(Universe::Nat, vec![Atom::periodic(0, 1, [0])], [], []).unwrap();
        assert_eq!(
            BlockPermutation::from_set(with_zero).unwrap_err(),
            BlockPermError::ZeroSize
        );
    }
}
