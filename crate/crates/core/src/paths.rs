//! Walk encodings of bi-type trees: the (offspring, grandchildren) pair
//! sequence, the bijective code onto pairs of offspring vectors, cyclic
//! shifts and the discrete Vervaat transform.
//!
//! For a tree with black vertices `v_0, v_1, ...` in lexicographic order,
//! `pairs[i] = (h, b)` records the white-children count and black-grandchild
//! count of `v_i`. The running sums `Hbar_i = h_1 + .. + h_i` and
//! `Bbar_i = b_1 + .. + b_i - i` turn the second coordinate into the
//! Lukasiewicz path of the reduced black subtree: `Bbar` stays nonnegative
//! until it hits `-1` at the last step.

use crate::error::Error;
use crate::tree::{BiTypeTree, TreeBuilder};
use crate::Result;

/// Sequence of per-black-vertex `(white children, black grandchildren)`
/// counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPair {
    pairs: Vec<(u64, u64)>,
}

impl PathPair {
    pub fn new(pairs: Vec<(u64, u64)>) -> Self {
        Self { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    /// Prefix sums of the first coordinate.
    pub fn h_prefix(&self) -> Vec<i64> {
        self.pairs
            .iter()
            .scan(0i64, |s, &(h, _)| {
                *s += h as i64;
                Some(*s)
            })
            .collect()
    }

    /// The walk `b_1 + .. + b_i - i`; Lukasiewicz path of the reduced black
    /// subtree when the pair sequence encodes a tree.
    pub fn b_walk(&self) -> Vec<i64> {
        self.pairs
            .iter()
            .enumerate()
            .scan(0i64, |s, (i, &(_, b))| {
                *s += b as i64;
                Some(*s - (i as i64 + 1))
            })
            .collect()
    }
}

/// The offspring-vector code of an alternating tree: `h[i]` is the child
/// count of the `i`-th black vertex (lexicographic order), `w[j]` the child
/// count of the `j`-th white vertex ordered by (parent's black rank, sibling
/// position).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiCode {
    pub h: Vec<u64>,
    pub w: Vec<u64>,
}

impl PhiCode {
    /// Checks membership in the image of the code: the two sum conditions
    /// and the prefix-domination condition.
    pub fn validate(&self) -> Result<()> {
        let nb = self.h.len();
        let nw = self.w.len();
        if nb == 0 {
            return Err(Error::InvalidCode("no black vertices".into()));
        }
        let hsum: u64 = self.h.iter().sum();
        if hsum != nw as u64 {
            return Err(Error::InvalidCode(format!(
                "h sums to {hsum}, expected the white count {nw}"
            )));
        }
        let wsum: u64 = self.w.iter().sum();
        if wsum != (nb - 1) as u64 {
            return Err(Error::InvalidCode(format!(
                "w sums to {wsum}, expected black count - 1 = {}",
                nb - 1
            )));
        }
        // domination: w_1 + .. + w_{h_1 + .. + h_i} >= i for i < nb
        let wpre: Vec<u64> = std::iter::once(0)
            .chain(self.w.iter().scan(0u64, |s, &w| {
                *s += w;
                Some(*s)
            }))
            .collect();
        let mut hpre = 0usize;
        for i in 1..nb {
            hpre += self.h[i - 1] as usize;
            if wpre[hpre] < i as u64 {
                return Err(Error::InvalidCode(format!(
                    "domination fails at black vertex {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Encodes an alternating black-rooted tree into its offspring vectors.
pub fn encode_phi(t: &BiTypeTree) -> PhiCode {
    let h = t
        .black_vertices()
        .into_iter()
        .map(|v| t.child_count(v) as u64)
        .collect();
    let w = t
        .white_vertices_by_parent()
        .into_iter()
        .map(|v| t.child_count(v) as u64)
        .collect();
    PhiCode { h, w }
}

/// Decodes offspring vectors back into the unique tree; fails when the code
/// is not in the image of [`encode_phi`].
pub fn decode_phi(code: &PhiCode) -> Result<BiTypeTree> {
    code.validate()?;
    let nb = code.h.len();

    // chunk the white vector by black vertex and derive grandchild counts
    let mut chunks: Vec<&[u64]> = Vec::with_capacity(nb);
    let mut pos = 0usize;
    let mut b = Vec::with_capacity(nb);
    for i in 0..nb {
        let h = code.h[i] as usize;
        chunks.push(&code.w[pos..pos + h]);
        b.push(chunks[i].iter().sum::<u64>() as usize);
        pos += h;
    }

    // reduced black tree from preorder child counts
    let mut black_children: Vec<Vec<usize>> = vec![Vec::new(); nb];
    let mut stack: Vec<(usize, usize)> = vec![(0, b[0])];
    for i in 1..nb {
        while let Some(&(_, 0)) = stack.last() {
            stack.pop();
        }
        let (p, rem) = stack.pop().ok_or_else(|| {
            Error::InvalidCode("ran out of open vertices while rebuilding".into())
        })?;
        black_children[p].push(i);
        if rem > 1 {
            stack.push((p, rem - 1));
        }
        stack.push((i, b[i]));
    }

    // interleave whites back between blacks and their grandchildren
    struct Ctx<'a> {
        chunks: &'a [&'a [u64]],
        black_children: &'a [Vec<usize>],
    }
    fn build(ctx: &Ctx, builder: &mut TreeBuilder, node: usize, black: usize) {
        let mut taken = 0usize;
        for &wcount in ctx.chunks[black] {
            let white = builder.add_child(node);
            for offset in 0..wcount as usize {
                let grandchild = ctx.black_children[black][taken + offset];
                let gnode = builder.add_child(white);
                build(ctx, builder, gnode, grandchild);
            }
            taken += wcount as usize;
        }
    }

    let ctx = Ctx {
        chunks: &chunks,
        black_children: &black_children,
    };
    let mut builder = TreeBuilder::new();
    let root = builder.add_root();
    build(&ctx, &mut builder, root, 0);
    Ok(builder.finish())
}

/// Per-black-vertex `(white children, black grandchildren)` counts.
pub fn hb_paths(t: &BiTypeTree) -> PathPair {
    let pairs = t
        .black_vertices()
        .into_iter()
        .map(|v| {
            let h = t.child_count(v) as u64;
            let b: u64 = t.children(v).map(|w| t.child_count(w) as u64).sum();
            (h, b)
        })
        .collect();
    PathPair { pairs }
}

/// Rotates the pair sequence left by `i` positions (`0 <= i < len`).
pub fn cyclic_shift(p: &PathPair, i: usize) -> PathPair {
    let m = p.len();
    let pairs = (0..m).map(|k| p.pairs[(k + i) % m]).collect();
    PathPair { pairs }
}

/// Shifts a bridge (`b` increments summing to `len - 1`, i.e. the walk ends
/// at `-1`) at the first location of the running minimum of the walk,
/// producing the unique cyclic representative satisfying the excursion
/// condition.
pub fn vervaat_discrete(p: &PathPair) -> Result<PathPair> {
    let m = p.len() as i64;
    let walk = p.b_walk();
    match walk.last() {
        Some(&-1) => {}
        Some(&end) => return Err(Error::NotABridge { sum: end }),
        None => return Err(Error::NotABridge { sum: 0 }),
    }
    let mut istar = 0usize;
    let mut best = i64::MAX;
    for (j, &v) in walk.iter().enumerate() {
        if v < best {
            best = v;
            istar = j + 1;
        }
    }
    debug_assert!(istar as i64 <= m);
    Ok(cyclic_shift(p, istar % m as usize))
}

/// True iff the walk stays nonnegative before ending at `-1`.
pub fn is_excursion(p: &PathPair) -> bool {
    let walk = p.b_walk();
    let m = walk.len();
    if m == 0 || walk[m - 1] != -1 {
        return false;
    }
    walk[..m - 1].iter().all(|&v| v >= 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncp::tests::reference_partition_12;
    use crate::tree::{dual_tree, reduced_black_subtree, BiTypeTree};

    /// The 14-vertex tree whose code is
    /// `((4,2,1,0,0,1), (1,0,2,0,1,1,0,0))`.
    fn reference_code_tree() -> BiTypeTree {
        BiTypeTree::from_parents(&[-1, 0, 1, 2, 3, 4, 2, 6, 0, 0, 9, 9, 11, 0]).unwrap()
    }

    #[test]
    fn encode_reference_tree() {
        let code = encode_phi(&reference_code_tree());
        assert_eq!(code.h, vec![4, 2, 1, 0, 0, 1]);
        assert_eq!(code.w, vec![1, 0, 2, 0, 1, 1, 0, 0]);
        code.validate().unwrap();
    }

    #[test]
    fn encode_single_root() {
        let t = BiTypeTree::from_parents(&[-1]).unwrap();
        let code = encode_phi(&t);
        assert_eq!(code.h, vec![0]);
        assert!(code.w.is_empty());
        assert_eq!(decode_phi(&code).unwrap(), t);
    }

    #[test]
    fn decode_inverts_encode() {
        for t in [
            reference_code_tree(),
            dual_tree(&reference_partition_12()),
            BiTypeTree::from_parents(&[-1, 0, 1, 1]).unwrap(),
        ] {
            assert_eq!(decode_phi(&encode_phi(&t)).unwrap(), t);
        }
    }

    #[test]
    fn invalid_codes_are_rejected() {
        // wrong white total
        assert!(decode_phi(&PhiCode {
            h: vec![1],
            w: vec![1]
        })
        .is_err());
        // domination violated: second black vertex arrives before any white
        // has produced it
        assert!(decode_phi(&PhiCode {
            h: vec![0, 1],
            w: vec![1]
        })
        .is_err());
    }

    #[test]
    fn hb_path_examples() {
        // black root - white - two black leaves
        let t = BiTypeTree::from_parents(&[-1, 0, 1, 1]).unwrap();
        let p = hb_paths(&t);
        assert_eq!(p.pairs(), &[(1, 2), (0, 0), (0, 0)]);
        assert_eq!(p.b_walk(), vec![1, 0, -1]);

        let single = BiTypeTree::from_parents(&[-1]).unwrap();
        assert_eq!(hb_paths(&single).b_walk(), vec![-1]);
    }

    #[test]
    fn b_walk_is_reduced_lukasiewicz() {
        for t in [
            reference_code_tree(),
            dual_tree(&reference_partition_12()),
        ] {
            assert_eq!(hb_paths(&t).b_walk(), reduced_black_subtree(&t).lukasiewicz());
        }
    }

    #[test]
    fn h_prefix_ends_at_white_count() {
        let t = reference_code_tree();
        assert_eq!(
            *hb_paths(&t).h_prefix().last().unwrap(),
            t.white_count() as i64
        );
    }

    #[test]
    fn shift_examples() {
        let p = PathPair::new(vec![(1, 2), (0, 0), (0, 0)]);
        assert_eq!(cyclic_shift(&p, 0), p);
        assert_eq!(cyclic_shift(&p, 3), p);
        assert_eq!(
            cyclic_shift(&p, 1).pairs(),
            &[(0, 0), (0, 0), (1, 2)]
        );
    }

    #[test]
    fn vervaat_examples() {
        // already an excursion: minimum is last, shift is the identity
        let exc = PathPair::new(vec![(1, 2), (0, 0), (0, 0)]);
        assert_eq!(vervaat_discrete(&exc).unwrap(), exc);

        // b = (0,2,0): walk (-1,0,-1), first minimum at 1
        let p = PathPair::new(vec![(0, 0), (2, 2), (0, 0)]);
        let v = vervaat_discrete(&p).unwrap();
        assert_eq!(
            v.pairs().iter().map(|&(_, b)| b).collect::<Vec<_>>(),
            vec![2, 0, 0]
        );
        assert_eq!(v.b_walk(), vec![1, 0, -1]);
        assert!(is_excursion(&v));

        // non-bridge input is rejected
        let bad = PathPair::new(vec![(0, 1), (0, 1)]);
        assert!(matches!(
            vervaat_discrete(&bad),
            Err(Error::NotABridge { sum: 0 })
        ));
    }
}
