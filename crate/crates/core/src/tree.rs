//! The dual bi-type plane tree of a non-crossing partition, contour
//! sequences, black-corner labels and the reduced black subtree.
//!
//! A partition of `[n]` corresponds to a rooted plane tree with `n+1`
//! vertices carrying the alternating black/white coloration (black at even
//! depth): one black vertex per block, one white vertex per block of the
//! Kreweras complement, rooted at the block containing `n`. Walking the
//! contour and labeling the corners of black vertices `1..n` (ending at the
//! root corner) recovers the blocks as the label sets around each black
//! vertex.

use crate::error::Error;
use crate::ncp::NonCrossingPartition;
use crate::Result;

/// Rooted plane tree with alternating colors and black root.
///
/// Nodes are stored in depth-first (preorder) order, so node ids coincide
/// with the lexicographic order on vertices. Colors are derived from depth
/// parity and never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BiTypeTree {
    parent: Vec<Option<usize>>,
    first_child: Vec<Option<usize>>,
    next_sibling: Vec<Option<usize>>,
    depth: Vec<u32>,
}

/// Builder that enforces depth-first insertion order.
#[derive(Debug, Default)]
pub(crate) struct TreeBuilder {
    parent: Vec<Option<usize>>,
    first_child: Vec<Option<usize>>,
    next_sibling: Vec<Option<usize>>,
    last_child: Vec<Option<usize>>,
    depth: Vec<u32>,
}

impl TreeBuilder {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add_root(&mut self) -> usize {
        debug_assert!(self.parent.is_empty());
        self.push(None, 0)
    }

    pub(crate) fn add_child(&mut self, parent: usize) -> usize {
        let depth = self.depth[parent] + 1;
        let id = self.push(Some(parent), depth);
        match self.last_child[parent] {
            None => self.first_child[parent] = Some(id),
            Some(prev) => self.next_sibling[prev] = Some(id),
        }
        self.last_child[parent] = Some(id);
        id
    }

    fn push(&mut self, parent: Option<usize>, depth: u32) -> usize {
        let id = self.parent.len();
        self.parent.push(parent);
        self.first_child.push(None);
        self.next_sibling.push(None);
        self.last_child.push(None);
        self.depth.push(depth);
        id
    }

    pub(crate) fn finish(self) -> BiTypeTree {
        BiTypeTree {
            parent: self.parent,
            first_child: self.first_child,
            next_sibling: self.next_sibling,
            depth: self.depth,
        }
    }
}

impl BiTypeTree {
    /// Reconstructs a tree from a depth-first parent array (`-1` for the
    /// root); the canonical JSON encoding.
    pub fn from_parents(parents: &[i64]) -> Result<Self> {
        if parents.is_empty() || parents[0] != -1 {
            return Err(Error::Domain(
                "parent array must start with -1 at the root".into(),
            ));
        }
        let mut b = TreeBuilder::new();
        b.add_root();
        for (i, &p) in parents.iter().enumerate().skip(1) {
            if p < 0 || p as usize >= i {
                return Err(Error::Domain(format!(
                    "node {i}: parent {p} does not precede it in depth-first order"
                )));
            }
            b.add_child(p as usize);
        }
        let t = b.finish();
        // depth-first order also requires children of u to follow u's subtree
        // contiguously; verify by walking
        let mut expected = Vec::with_capacity(t.len());
        t.preorder_into(0, &mut expected);
        if expected.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::Domain("parent array is not in depth-first order".into()));
        }
        Ok(t)
    }

    /// Parent array in depth-first order, `-1` at the root.
    pub fn parents(&self) -> Vec<i64> {
        self.parent
            .iter()
            .map(|p| p.map_or(-1, |v| v as i64))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.len() - 1
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn depth(&self, v: usize) -> u32 {
        self.depth[v]
    }

    /// Black vertices sit at even depth.
    pub fn is_black(&self, v: usize) -> bool {
        self.depth[v] % 2 == 0
    }

    pub fn children(&self, v: usize) -> ChildIter<'_> {
        ChildIter {
            tree: self,
            cur: self.first_child[v],
        }
    }

    pub fn child_count(&self, v: usize) -> usize {
        self.children(v).count()
    }

    pub fn black_count(&self) -> usize {
        self.depth.iter().filter(|d| **d % 2 == 0).count()
    }

    pub fn white_count(&self) -> usize {
        self.len() - self.black_count()
    }

    /// Black vertex ids in lexicographic order (node id order).
    pub fn black_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_black(v)).collect()
    }

    /// White vertex ids sorted by (lexicographic rank of the parent black
    /// vertex, sibling order); the order the walk codings use.
    pub fn white_vertices_by_parent(&self) -> Vec<usize> {
        let mut black_rank = vec![usize::MAX; self.len()];
        for (r, v) in self.black_vertices().into_iter().enumerate() {
            black_rank[v] = r;
        }
        let mut whites: Vec<usize> = (0..self.len()).filter(|&v| !self.is_black(v)).collect();
        whites.sort_by_key(|&w| (black_rank[self.parent[w].expect("white has parent")], w));
        whites
    }

    fn preorder_into(&self, v: usize, out: &mut Vec<usize>) {
        out.push(v);
        for c in self.children(v) {
            self.preorder_into(c, out);
        }
    }

    /// Number of descendants (excluding the vertex itself) per vertex.
    pub fn descendant_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.len()];
        // children precede parents nowhere in preorder; walk ids backwards
        for v in (1..self.len()).rev() {
            let p = self.parent[v].unwrap();
            counts[p] += counts[v] + 1;
        }
        counts
    }
}

pub struct ChildIter<'a> {
    tree: &'a BiTypeTree,
    cur: Option<usize>,
}

impl Iterator for ChildIter<'_> {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        let v = self.cur?;
        self.cur = self.tree.next_sibling[v];
        Some(v)
    }
}

/// A plain (uncolored) plane tree; the reduced black subtree lives here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneTree {
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

impl PlaneTree {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Walk with increments `children(v) - 1` along preorder; hits `-1`
    /// exactly at the end.
    pub fn lukasiewicz(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.len());
        let mut s = 0i64;
        for v in 0..self.len() {
            s += self.children[v].len() as i64 - 1;
            out.push(s);
        }
        out
    }
}

/// Per-black-vertex corner labels, in contour order (hence increasing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerLabeling {
    /// Indexed by lexicographic black rank.
    pub per_black: Vec<Vec<usize>>,
}

/// Corner-index data for one black vertex (see [`block_label_bounds`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLabelBounds {
    /// First black-corner label of the vertex in contour order.
    pub x: usize,
    /// Last black-corner label.
    pub y: usize,
    /// Black corners of strict ancestors branching to the right of the path.
    pub ell: usize,
    /// Total number of black descendants.
    pub n_black_desc: usize,
    /// Total number of descendants of either color.
    pub n_desc: usize,
}

/// The dual tree of a non-crossing partition: one black vertex per block,
/// one white vertex per complement block, rooted at the block containing `n`.
pub fn dual_tree(p: &NonCrossingPartition) -> BiTypeTree {
    let n = p.n();
    let who = p.block_index();
    let blocks = p.blocks();
    let mut b = TreeBuilder::new();
    let root = b.add_root();
    if n == 0 {
        return b.finish();
    }

    // Recursion over gap intervals: each white vertex covers an integer
    // interval; its black children are the outermost blocks inside it.
    fn fill_white(
        b: &mut TreeBuilder,
        white: usize,
        lo: usize,
        hi: usize,
        who: &[usize],
        blocks: &[Vec<usize>],
    ) {
        let mut pos = lo;
        while pos <= hi {
            let blk = &blocks[who[pos]];
            debug_assert_eq!(blk[0], pos, "outermost block must start the interval");
            let black = b.add_child(white);
            for w in blk.windows(2) {
                let child = b.add_child(black);
                fill_white(b, child, w[0] + 1, w[1] - 1, who, blocks);
            }
            pos = blk[blk.len() - 1] + 1;
        }
    }

    let root_block = &blocks[who[n]];
    let mut prev = 0usize;
    for &r in root_block {
        let w = b.add_child(root);
        fill_white(&mut b, w, prev + 1, r - 1, &who, blocks);
        prev = r;
    }
    b.finish()
}

/// Contour sequence `u_0 = root, u_1, ...` visiting each edge twice and
/// ending at the root; length `2 * edges + 1`.
pub fn contour_sequence(t: &BiTypeTree) -> Vec<usize> {
    let mut seq = Vec::with_capacity(2 * t.edge_count() + 1);
    let mut next_child = t.first_child.clone();
    let mut cur = t.root();
    seq.push(cur);
    loop {
        if let Some(c) = next_child[cur] {
            next_child[cur] = t.next_sibling[c];
            cur = c;
            seq.push(cur);
        } else if let Some(p) = t.parent(cur) {
            cur = p;
            seq.push(cur);
        } else {
            break;
        }
    }
    seq
}

/// Labels `1..n` of the black corners, following the contour and ending at
/// the root corner.
pub fn corner_labels(t: &BiTypeTree) -> CornerLabeling {
    CornerLabeling {
        per_black: corner_labels_with_positions(t)
            .into_iter()
            .map(|v| v.into_iter().map(|(label, _)| label).collect())
            .collect(),
    }
}

/// As [`corner_labels`], also reporting each corner's contour position.
fn corner_labels_with_positions(t: &BiTypeTree) -> Vec<Vec<(usize, usize)>> {
    let blacks = t.black_vertices();
    let mut rank = vec![usize::MAX; t.len()];
    for (r, &v) in blacks.iter().enumerate() {
        rank[v] = r;
    }
    let seq = contour_sequence(t);
    let mut per_black: Vec<Vec<(usize, usize)>> = vec![Vec::new(); blacks.len()];
    let mut label = 0usize;
    for (pos, &v) in seq.iter().enumerate().skip(1) {
        if t.is_black(v) {
            label += 1;
            per_black[rank[v]].push((label, pos));
        }
    }
    per_black
}

/// Inverse of [`dual_tree`]: recovers the partition whose blocks are the
/// corner labels around each black vertex.
pub fn partition_of_tree(t: &BiTypeTree) -> Result<NonCrossingPartition> {
    if t.len() < 2 {
        return Err(Error::Domain(
            "single-vertex tree has no corners to label".into(),
        ));
    }
    let labels = corner_labels(t);
    let n = t.len() - 1;
    NonCrossingPartition::from_blocks(n, labels.per_black)
}

/// Corner-index arithmetic for the `i`-th black vertex in lexicographic
/// order (`i >= 1`; the root is excluded).
pub fn block_label_bounds(t: &BiTypeTree, i: usize) -> Result<BlockLabelBounds> {
    let blacks = t.black_vertices();
    if i == 0 || i >= blacks.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: blacks.len().saturating_sub(1),
        });
    }
    let per_black = corner_labels_with_positions(t);
    let v = blacks[i];
    let corners = &per_black[i];
    let x = corners.first().expect("black vertex has a corner").0;
    let y = corners.last().unwrap().0;
    let first_pos = corners.first().unwrap().1;

    let desc = t.descendant_counts();
    let n_desc = desc[v];
    let n_black_desc = {
        // descendants occupy the id range (v, v + n_desc] in preorder
        (v + 1..=v + n_desc).filter(|&u| t.is_black(u)).count()
    };

    // black corners adjacent to strict ancestors of v, visited after v's
    // first corner
    let mut rank = vec![usize::MAX; t.len()];
    for (r, &bv) in blacks.iter().enumerate() {
        rank[bv] = r;
    }
    let mut ell = 0usize;
    let mut a = t.parent(v);
    while let Some(u) = a {
        if t.is_black(u) {
            ell += per_black[rank[u]]
                .iter()
                .filter(|&&(_, pos)| pos > first_pos)
                .count();
        }
        a = t.parent(u);
    }
    Ok(BlockLabelBounds {
        x,
        y,
        ell,
        n_black_desc,
        n_desc,
    })
}

/// Keeps only black vertices, with ancestor/descendant relations inherited;
/// the parent of a black vertex is its black grandparent.
pub fn reduced_black_subtree(t: &BiTypeTree) -> PlaneTree {
    let blacks = t.black_vertices();
    let mut rank = vec![usize::MAX; t.len()];
    for (r, &v) in blacks.iter().enumerate() {
        rank[v] = r;
    }
    let mut parent = vec![None; blacks.len()];
    let mut children = vec![Vec::new(); blacks.len()];
    for (r, &v) in blacks.iter().enumerate().skip(1) {
        let gp = t
            .parent(v)
            .and_then(|w| t.parent(w))
            .expect("non-root black vertex has a black grandparent");
        parent[r] = Some(rank[gp]);
        children[rank[gp]].push(r);
    }
    PlaneTree { parent, children }
}
