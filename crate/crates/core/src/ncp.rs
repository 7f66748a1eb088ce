//! Non-crossing partitions of `[n]`, Kreweras complementation and the
//! geodesic-permutation bijection.
//!
//! A partition is non-crossing when no indices `a < b < c < d` exist with
//! `{a,c}` in one block and `{b,d}` in a different one; equivalently the
//! convex hulls of the blocks drawn on a regular `n`-gon are pairwise
//! disjoint.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::perm::Permutation;
use crate::Result;

/// A set partition of `[n]`; blocks sorted internally and by minimum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<PartitionRepr> for SetPartition {
    type Error = Error;
    fn try_from(r: PartitionRepr) -> Result<Self> {
        SetPartition::from_blocks(r.n, r.blocks)
    }
}

impl From<SetPartition> for PartitionRepr {
    fn from(p: SetPartition) -> Self {
        PartitionRepr {
            n: p.n,
            blocks: p.blocks,
        }
    }
}

impl SetPartition {
    /// Validates and canonicalizes a block list into a partition of `[n]`.
    pub fn from_blocks(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut count = 0usize;
        for b in blocks.iter_mut() {
            if b.is_empty() {
                return Err(Error::NotAPartition {
                    n,
                    reason: "empty block".into(),
                });
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x == 0 || x > n {
                    return Err(Error::IndexOutOfRange { index: x, n });
                }
                if seen[x] {
                    return Err(Error::NotAPartition {
                        n,
                        reason: format!("element {x} appears twice"),
                    });
                }
                seen[x] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(Error::NotAPartition {
                n,
                reason: format!("{count} of {n} elements covered"),
            });
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// Trusted constructor: blocks already sorted and partitioning `[n]`.
    pub(crate) fn from_sorted_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Self {
        debug_assert!(Self::from_blocks(n, blocks.clone()).is_ok());
        Self { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Index (into `blocks()`) of the block containing each element.
    pub fn block_index(&self) -> Vec<usize> {
        let mut who = vec![0usize; self.n + 1];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &x in b {
                who[x] = bi;
            }
        }
        who
    }

    /// Multiset of block sizes, sorted.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    }

    /// O(n) stack scan for the non-crossing condition.
    pub fn is_noncrossing(&self) -> bool {
        let who = self.block_index();
        let maxima: Vec<usize> = self.blocks.iter().map(|b| *b.last().unwrap()).collect();
        let minima: Vec<usize> = self.blocks.iter().map(|b| b[0]).collect();
        let mut stack: Vec<usize> = Vec::new();
        for x in 1..=self.n {
            let b = who[x];
            if minima[b] == x {
                stack.push(b);
            }
            if stack.last() != Some(&b) {
                return false;
            }
            if maxima[b] == x {
                stack.pop();
            }
        }
        true
    }
}

/// A non-crossing partition of `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SetPartition", into = "SetPartition")]
pub struct NonCrossingPartition(SetPartition);

impl TryFrom<SetPartition> for NonCrossingPartition {
    type Error = Error;

    fn try_from(p: SetPartition) -> Result<Self> {
        if !p.is_noncrossing() {
            // locate a crossing witness for the error message
            let who = p.block_index();
            for a in 1..=p.n() {
                for b in a + 1..=p.n() {
                    for c in b + 1..=p.n() {
                        for d in c + 1..=p.n() {
                            if who[a] == who[c] && who[b] == who[d] && who[a] != who[b] {
                                return Err(Error::Crossing { a, b, c, d });
                            }
                        }
                    }
                }
            }
            unreachable!("stack scan and quadruple scan disagree");
        }
        Ok(Self(p))
    }
}

impl From<NonCrossingPartition> for SetPartition {
    fn from(p: NonCrossingPartition) -> Self {
        p.0
    }
}

impl NonCrossingPartition {
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        SetPartition::from_blocks(n, blocks)?.try_into()
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        self.0.blocks()
    }

    pub fn block_count(&self) -> usize {
        self.0.block_count()
    }

    pub fn block_index(&self) -> Vec<usize> {
        self.0.block_index()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.0.block_sizes()
    }

    pub fn as_set_partition(&self) -> &SetPartition {
        &self.0
    }

    /// The unique permutation whose cycles are the blocks, each cycle
    /// increasing. Such permutations are exactly the prefix products of
    /// minimal factorizations.
    pub fn geodesic_perm_of(&self) -> Permutation {
        let mut image: Vec<usize> = (1..=self.n()).collect();
        for b in self.blocks() {
            for i in 0..b.len() {
                image[b[i] - 1] = b[(i + 1) % b.len()];
            }
        }
        Permutation::from_image(image).expect("blocks partition [n]")
    }

    /// Kreweras complement, computed algebraically: with `sigma` the geodesic
    /// permutation of the partition and `C` the `n`-cycle, the complement is
    /// the cycle partition of the left-to-right product `C sigma^{-1}`.
    ///
    /// The result has `n + 1 - block_count()` blocks.
    pub fn kreweras(&self) -> NonCrossingPartition {
        let n = self.n();
        let sigma_inv = self.geodesic_perm_of().inverse();
        // x -> sigma^{-1}(C(x)), evaluated without materializing the product
        let image: Vec<usize> = (1..=n).map(|x| sigma_inv.apply(x % n + 1)).collect();
        let rho = Permutation::from_image(image).expect("bijection");
        let part = rho.cycle_partition();
        debug_assert!(part.is_noncrossing());
        NonCrossingPartition(part)
    }

    /// Relabels every element `i` to `((i - 1 + j) mod n) + 1`; `j` may be
    /// negative. Block sizes are preserved.
    pub fn rotate(&self, j: i64) -> NonCrossingPartition {
        let n = self.n() as i64;
        let shift = j.rem_euclid(n) as usize;
        let blocks = self
            .blocks()
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&i| (i - 1 + shift) % self.n() + 1)
                    .collect::<Vec<_>>()
            })
            .collect();
        NonCrossingPartition::from_blocks(self.n(), blocks).expect("rotation preserves crossings")
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::perm::tests::reference_factorization_12;

    fn ncp(n: usize, blocks: &[&[usize]]) -> NonCrossingPartition {
        NonCrossingPartition::from_blocks(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    /// Partition of the 6th partial product of the size-12 reference
    /// factorization.
    pub(crate) fn reference_partition_12() -> NonCrossingPartition {
        ncp(
            12,
            &[&[1, 3, 5], &[2], &[4], &[6, 7, 11, 12], &[8], &[9, 10]],
        )
    }

    #[test]
    fn crossing_detection() {
        let p = SetPartition::from_blocks(4, vec![vec![1, 3], vec![2, 4]]).unwrap();
        assert!(!p.is_noncrossing());
        assert!(matches!(
            NonCrossingPartition::try_from(p),
            Err(Error::Crossing {
                a: 1,
                b: 2,
                c: 3,
                d: 4
            })
        ));
        let singletons = SetPartition::from_blocks(5, (1..=5).map(|i| vec![i]).collect()).unwrap();
        assert!(singletons.is_noncrossing());
        assert!(reference_partition_12().as_set_partition().is_noncrossing());
    }

    #[test]
    fn partition_validation() {
        assert!(SetPartition::from_blocks(3, vec![vec![1, 2]]).is_err());
        assert!(SetPartition::from_blocks(3, vec![vec![1, 2], vec![2, 3]]).is_err());
        assert!(SetPartition::from_blocks(3, vec![vec![1, 2], vec![3], vec![]]).is_err());
        assert!(SetPartition::from_blocks(3, vec![vec![1, 4], vec![2, 3]]).is_err());
    }

    #[test]
    fn geodesic_permutation() {
        let p = ncp(6, &[&[1, 3, 4], &[2], &[5, 6]]);
        let g = p.geodesic_perm_of();
        assert_eq!(g.cycles(), vec![vec![1, 3, 4], vec![2], vec![5, 6]]);
        assert_eq!(g.apply(1), 3);
        assert_eq!(g.apply(4), 1);
        assert_eq!(g.cycle_partition(), *p.as_set_partition());

        let singles = ncp(4, &[&[1], &[2], &[3], &[4]]);
        assert!(singles.geodesic_perm_of().is_identity());
        let full = ncp(4, &[&[1, 2, 3, 4]]);
        assert_eq!(full.geodesic_perm_of(), Permutation::n_cycle(4));
    }

    #[test]
    fn kreweras_reference_example() {
        // Complement of the size-12 reference partition. Note the singleton
        // {9}: the complement must have 12 + 1 - 6 = 7 blocks.
        let k = reference_partition_12().kreweras();
        assert_eq!(
            k.blocks(),
            &[
                vec![1, 2],
                vec![3, 4],
                vec![5, 12],
                vec![6],
                vec![7, 8, 10],
                vec![9],
                vec![11],
            ]
        );
    }

    #[test]
    fn kreweras_of_singletons_is_full_block() {
        let p = ncp(5, &[&[1], &[2], &[3], &[4], &[5]]);
        assert_eq!(p.kreweras().blocks(), &[vec![1, 2, 3, 4, 5]]);
    }

    #[test]
    fn kreweras_block_count_identity() {
        let p = reference_partition_12();
        assert_eq!(p.kreweras().block_count() + p.block_count(), 12 + 1);
    }

    #[test]
    fn double_kreweras_is_backward_rotation() {
        // K(K(P)) relabels i -> i-1 (mod n)
        for p in [
            reference_partition_12(),
            ncp(3, &[&[1, 2], &[3]]),
            ncp(6, &[&[1, 3, 4], &[2], &[5, 6]]),
        ] {
            assert_eq!(p.kreweras().kreweras(), p.rotate(-1));
        }
    }

    #[test]
    fn rotation_basics() {
        let p = ncp(3, &[&[1, 2], &[3]]);
        assert_eq!(p.rotate(0), p);
        assert_eq!(p.rotate(3), p);
        assert_eq!(p.rotate(1), ncp(3, &[&[2, 3], &[1]]));
        assert_eq!(p.rotate(-1), p.rotate(2));
    }

    #[test]
    fn kreweras_size_multiset_symmetry() {
        // sizes of (P, K(P)) match sizes of (K(P), K(K(P))) as multisets
        for k in 1..=11 {
            let f = reference_factorization_12();
            let part: NonCrossingPartition = f
                .partial_product(k)
                .unwrap()
                .cycle_partition()
                .try_into()
                .unwrap();
            let kp = part.kreweras();
            let mut lhs = part.block_sizes();
            lhs.extend(kp.block_sizes());
            lhs.sort_unstable();
            let mut rhs = kp.block_sizes();
            rhs.extend(kp.kreweras().block_sizes());
            rhs.sort_unstable();
            assert_eq!(lhs, rhs);
        }
    }
}
