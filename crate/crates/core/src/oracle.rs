//! Exhaustive enumeration and exact rational arithmetic: the ground truth
//! for every closed-form law at small `n`.
//!
//! Everything here is deliberately independent of the fast paths it checks:
//! the crossing test is the quadruple scan rather than the stack scan,
//! random-walk probabilities come from direct convolution rather than the
//! closed form, and laws of partial products come from brute-force counting
//! over all of `M_n`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dist::{pmf_mu, OffspringParams};
use crate::error::Error;
use crate::ncp::{NonCrossingPartition, SetPartition};
use crate::perm::{Factorization, Permutation, Transposition};
use crate::tree::{BiTypeTree, TreeBuilder};
use crate::Result;

pub type Rational = BigRational;

/// Largest ground set for full enumeration of minimal factorizations
/// (`8^6 = 262144` sequences).
pub const MAX_ENUM_N: usize = 8;

pub fn big_factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// The block weight `s^{s-2} / (s-1)!` as an exact rational; `s = 1`
/// evaluates to 1.
pub fn block_weight(s: usize) -> Rational {
    let num = if s >= 2 {
        BigInt::from(s).pow((s - 2) as u32)
    } else {
        BigInt::one()
    };
    Rational::new(num, big_factorial(s - 1))
}

/// Independent O(n^4) crossing checker (the production path uses a stack
/// scan).
pub fn is_noncrossing_quadruple_scan(p: &SetPartition) -> bool {
    let who = p.block_index();
    let n = p.n();
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                for d in c + 1..=n {
                    if who[a] == who[c] && who[b] == who[d] && who[a] != who[b] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Cycle count if the permutation is a prefix product of some minimal
/// factorization (all cycles increasing, cycle partition non-crossing),
/// else `None`.
fn geodesic_cycle_count(image: &[usize]) -> Option<usize> {
    let n = image.len();
    let mut visited = vec![false; n + 1];
    let mut who = vec![0usize; n + 1];
    let mut mins = Vec::new();
    let mut maxs = Vec::new();
    for start in 1..=n {
        if visited[start] {
            continue;
        }
        let id = mins.len();
        let mut x = start;
        let mut prev = 0usize;
        let mut max = start;
        loop {
            visited[x] = true;
            who[x] = id;
            if x < prev {
                return None; // cycle not increasing from its minimum
            }
            if x > max {
                max = x;
            }
            prev = x;
            x = image[x - 1];
            if x == start {
                break;
            }
        }
        mins.push(start);
        maxs.push(max);
    }
    // stack scan over block intervals
    let mut stack: Vec<usize> = Vec::new();
    for x in 1..=n {
        let b = who[x];
        if mins[b] == x {
            stack.push(b);
        }
        if stack.last() != Some(&b) {
            return None;
        }
        if maxs[b] == x {
            stack.pop();
        }
    }
    Some(mins.len())
}

fn apply_transposition(image: &mut [usize], a: usize, b: usize) {
    for v in image.iter_mut() {
        if *v == a {
            *v = b;
        } else if *v == b {
            *v = a;
        }
    }
}

/// All minimal factorizations of the `n`-cycle, by depth-first search over
/// transpositions with geodesic pruning: every partial product must keep
/// increasing non-crossing cycles, which forces the final product to be the
/// cycle itself.
pub fn enumerate_factorizations(n: usize) -> Result<Vec<Factorization>> {
    if n > MAX_ENUM_N {
        return Err(Error::TooLarge {
            what: "factorization enumeration",
            max: MAX_ENUM_N,
            got: n,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    fn dfs(
        n: usize,
        image: &mut Vec<usize>,
        prefix: &mut Vec<Transposition>,
        out: &mut Vec<Factorization>,
    ) {
        if prefix.len() == n - 1 {
            out.push(
                Factorization::new(n, prefix.clone()).expect("geodesic pruning reaches the cycle"),
            );
            return;
        }
        for a in 1..=n {
            for b in a + 1..=n {
                apply_transposition(image, a, b);
                // a merge step leaves n - (k+1) cycles; splits are pruned
                if geodesic_cycle_count(image) == Some(n - prefix.len() - 1) {
                    prefix.push(Transposition::new(a, b).unwrap());
                    dfs(n, image, prefix, out);
                    prefix.pop();
                }
                apply_transposition(image, a, b);
            }
        }
    }
    let mut image: Vec<usize> = (1..=n).collect();
    let mut prefix: Vec<Transposition> = Vec::with_capacity(n - 1);
    let mut out = Vec::new();
    dfs(n, &mut image, &mut prefix, &mut out);
    Ok(out)
}

/// The exact law of the partition of the `k`-th partial product under the
/// uniform measure on `M_n`, by counting.
pub fn exact_law_partial_product(
    n: usize,
    k: usize,
) -> Result<BTreeMap<NonCrossingPartition, Rational>> {
    if k == 0 || k >= n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    let facts = enumerate_factorizations(n)?;
    let total = BigInt::from(facts.len());
    let mut counts: BTreeMap<NonCrossingPartition, BigInt> = BTreeMap::new();
    for f in &facts {
        let p: NonCrossingPartition = f
            .partial_product(k)?
            .cycle_partition()
            .try_into()
            .expect("partial products of minimal factorizations are non-crossing");
        *counts.entry(p).or_insert_with(BigInt::zero) += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(p, c)| (p, Rational::new(c, total.clone())))
        .collect())
}

/// The closed-form law of the `k`-th partial product partition:
/// `k! (n-k-1)! / n^{n-2}` times the block weights of the partition and of
/// its Kreweras complement.
pub fn partial_product_law_formula(n: usize, k: usize, p: &NonCrossingPartition) -> Rational {
    let mut pr = Rational::new(
        big_factorial(k) * big_factorial(n - k - 1),
        BigInt::from(n).pow((n - 2) as u32),
    );
    for b in p.blocks() {
        pr *= block_weight(b.len());
    }
    for b in p.kreweras().blocks() {
        pr *= block_weight(b.len());
    }
    pr
}

/// Counts minimal factorizations of an arbitrary permutation by brute
/// force: sequences of `n - cycles(sigma)` transpositions multiplying to
/// `sigma`, pruned so that both the prefix and the remainder stay minimal.
pub fn count_minfacts_of_perm(sigma: &Permutation) -> u64 {
    fn cycles_of(image: &[usize]) -> usize {
        let n = image.len();
        let mut seen = vec![false; n + 1];
        let mut c = 0;
        for s in 1..=n {
            if !seen[s] {
                c += 1;
                let mut x = s;
                while !seen[x] {
                    seen[x] = true;
                    x = image[x - 1];
                }
            }
        }
        c
    }
    fn dfs(depth: usize, m: usize, n: usize, g: &mut Vec<usize>, rem: &mut Vec<usize>) -> u64 {
        if depth == m {
            return 1;
        }
        let mut total = 0;
        let base_g = cycles_of(g);
        let base_rem = cycles_of(rem);
        for a in 1..=n {
            for b in a + 1..=n {
                apply_transposition(g, a, b);
                // appending tau turns the remainder r into r o tau, i.e.
                // swaps two of its input slots
                rem.swap(a - 1, b - 1);
                if cycles_of(g) == base_g - 1 && cycles_of(rem) == base_rem + 1 {
                    total += dfs(depth + 1, m, n, g, rem);
                }
                rem.swap(a - 1, b - 1);
                apply_transposition(g, a, b);
            }
        }
        total
    }
    let n = sigma.n();
    let m = n - sigma.cycle_count();
    let mut g: Vec<usize> = (1..=n).collect();
    let mut rem: Vec<usize> = (1..=n).map(|x| sigma.apply(x)).collect();
    dfs(0, m, n, &mut g, &mut rem)
}

/// Closed form for the number of minimal factorizations of `sigma`:
/// `(n - k)!` times the product of block weights, `k` the cycle count.
pub fn minfacts_formula(sigma: &Permutation) -> Rational {
    let part = sigma.cycle_partition();
    let mut out = Rational::from(big_factorial(sigma.n() - part.block_count()));
    for b in part.blocks() {
        out *= block_weight(b.len());
    }
    out
}

/// All set partitions of `[n]` via restricted-growth strings.
pub fn all_set_partitions(n: usize) -> Vec<SetPartition> {
    fn rec(i: usize, maxc: usize, n: usize, assign: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
        if i > n {
            let mut blocks = vec![Vec::new(); maxc];
            for x in 1..=n {
                blocks[assign[x]].push(x);
            }
            out.push(SetPartition::from_blocks(n, blocks).unwrap());
            return;
        }
        for c in 0..=maxc {
            assign[i] = c;
            rec(i + 1, maxc.max(c + 1), n, assign, out);
        }
    }
    let mut out = Vec::new();
    let mut assign = vec![0usize; n + 1];
    if n > 0 {
        rec(1, 0, n, &mut assign, &mut out);
    }
    out
}

/// All non-crossing partitions of `[n]`, optionally restricted to a block
/// count.
pub fn all_ncps(n: usize, block_count: Option<usize>) -> Vec<NonCrossingPartition> {
    all_set_partitions(n)
        .into_iter()
        .filter(|p| block_count.is_none_or(|c| p.block_count() == c))
        .filter(is_noncrossing_quadruple_scan)
        .map(|p| NonCrossingPartition::try_from(p).unwrap())
        .collect()
}

/// All alternating black-rooted plane trees with the given vertex counts.
pub fn enumerate_trees(n_black: usize, n_white: usize) -> Result<Vec<BiTypeTree>> {
    if n_black + n_white > 12 {
        return Err(Error::TooLarge {
            what: "tree enumeration",
            max: 12,
            got: n_black + n_white,
        });
    }
    if n_black == 0 {
        return Ok(Vec::new());
    }

    // nested shape: a node is the ordered list of its children's shapes
    #[derive(Clone)]
    struct Shape(Vec<Shape>);

    // ordered forests with `root_color` vertices of the roots' color and
    // `other` of the opposite color
    fn forests(root_color: usize, other: usize) -> Vec<Vec<Shape>> {
        if root_color == 0 {
            return if other == 0 { vec![Vec::new()] } else { Vec::new() };
        }
        let mut out = Vec::new();
        for r1 in 1..=root_color {
            for o1 in 0..=other {
                for t in trees(r1, o1) {
                    for rest in forests(root_color - r1, other - o1) {
                        let mut v = Vec::with_capacity(rest.len() + 1);
                        v.push(t.clone());
                        v.extend(rest);
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    // trees with `same` vertices of the root's color, `other` of the
    // opposite color
    fn trees(same: usize, other: usize) -> Vec<Shape> {
        if same == 0 {
            return Vec::new();
        }
        forests(other, same - 1).into_iter().map(Shape).collect()
    }

    fn emit(b: &mut TreeBuilder, at: usize, s: &Shape) {
        for c in &s.0 {
            let id = b.add_child(at);
            emit(b, id, c);
        }
    }

    let shapes = trees(n_black, n_white);
    let mut out = Vec::with_capacity(shapes.len());
    for s in shapes {
        let mut b = TreeBuilder::new();
        let root = b.add_root();
        emit(&mut b, root, &s);
        out.push(b.finish());
    }
    Ok(out)
}

/// Probability weight of a finite tree under per-color offspring laws, with
/// a separate law for the root.
pub fn tree_probability(
    t: &BiTypeTree,
    even_law: impl Fn(u64) -> f64,
    odd_law: impl Fn(u64) -> f64,
    root_law: impl Fn(u64) -> f64,
) -> f64 {
    let mut p = 1.0;
    for v in 0..t.len() {
        let k = t.child_count(v) as u64;
        p *= if v == t.root() {
            root_law(k)
        } else if t.is_black(v) {
            even_law(k)
        } else {
            odd_law(k)
        };
    }
    p
}

/// Exact table `P(tree has (root_side, other) vertex counts)` for trees
/// whose root takes `root_side`'s law, indexed `[root_side][other]`.
pub fn tree_count_table(
    root_side: &OffspringParams,
    other_side: &OffspringParams,
    max_root_side: usize,
    max_other: usize,
) -> Vec<Vec<f64>> {
    let mut table = vec![vec![0.0; max_other + 1]; max_root_side + 1];
    for b in 1..=max_root_side {
        for w in 0..=max_other {
            for t in enumerate_trees(b, w).expect("bounds checked by caller") {
                table[b][w] += tree_probability(
                    &t,
                    |k| pmf_mu(k, root_side),
                    |k| pmf_mu(k, other_side),
                    |k| pmf_mu(k, root_side),
                );
            }
        }
    }
    table
}

/// `j`-fold 2D convolution of a tree-count table: the law of vertex counts
/// in a forest of `j` i.i.d. trees.
pub fn forest_count_table(tree_table: &[Vec<f64>], j: usize) -> Vec<Vec<f64>> {
    let rows = tree_table.len();
    let cols = tree_table[0].len();
    let mut acc = vec![vec![0.0; cols]; rows];
    acc[0][0] = 1.0;
    for _ in 0..j {
        let mut next = vec![vec![0.0; cols]; rows];
        for b0 in 0..rows {
            for w0 in 0..cols {
                if acc[b0][w0] == 0.0 {
                    continue;
                }
                for b1 in 0..rows - b0 {
                    for w1 in 0..cols - w0 {
                        next[b0 + b1][w0 + w1] += acc[b0][w0] * tree_table[b1][w1];
                    }
                }
            }
        }
        acc = next;
    }
    acc
}

/// Direct convolution powers of an offspring pmf truncated at `support`:
/// `out[n][k] = P(S_n = k)` up to the truncation tail.
pub fn convolution_powers(p: &OffspringParams, max_fold: usize, support: usize) -> Vec<Vec<f64>> {
    let base: Vec<f64> = (0..=support).map(|i| pmf_mu(i as u64, p)).collect();
    let mut out = Vec::with_capacity(max_fold + 1);
    let mut dirac = vec![0.0; support + 1];
    dirac[0] = 1.0;
    out.push(dirac);
    for n in 1..=max_fold {
        let prev = &out[n - 1];
        let mut next = vec![0.0; support + 1];
        for (i, &x) in prev.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in base.iter().enumerate().take(support + 1 - i) {
                next[i + j] += x * y;
            }
        }
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::solve_params;

    #[test]
    fn factorization_counts() {
        assert_eq!(enumerate_factorizations(1).unwrap().len(), 1);
        assert_eq!(enumerate_factorizations(2).unwrap().len(), 1);
        assert_eq!(enumerate_factorizations(3).unwrap().len(), 3);
        assert_eq!(enumerate_factorizations(4).unwrap().len(), 16);
        assert_eq!(enumerate_factorizations(5).unwrap().len(), 125);
        assert!(enumerate_factorizations(9).is_err());
    }

    #[test]
    fn exact_law_small_case() {
        // n = 3, k = 1: each of the three 2-block non-crossing partitions
        // has probability 1/3
        let law = exact_law_partial_product(3, 1).unwrap();
        assert_eq!(law.len(), 3);
        for (p, pr) in &law {
            assert_eq!(*pr, Rational::new(BigInt::one(), BigInt::from(3)));
            assert_eq!(*pr, partial_product_law_formula(3, 1, p));
        }
    }

    #[test]
    fn minfact_count_examples() {
        // sigma = (1,2)(3,4) in S_4: two shuffles of the two one-factor
        // factorizations
        let sigma = Permutation::from_image(vec![2, 1, 4, 3]).unwrap();
        assert_eq!(count_minfacts_of_perm(&sigma), 2);
        assert_eq!(minfacts_formula(&sigma), Rational::from(BigInt::from(2)));
        let id = Permutation::identity(4);
        assert_eq!(count_minfacts_of_perm(&id), 1);
        let cyc = Permutation::n_cycle(4);
        assert_eq!(count_minfacts_of_perm(&cyc), 16);
    }

    #[test]
    fn ncp_counts_are_catalan() {
        assert_eq!(all_ncps(3, None).len(), 5);
        assert_eq!(all_ncps(4, None).len(), 14);
        assert_eq!(all_set_partitions(4).len(), 15); // Bell(4)
    }

    #[test]
    fn quadruple_scan_agrees_with_stack_scan() {
        for p in all_set_partitions(6) {
            assert_eq!(is_noncrossing_quadruple_scan(&p), p.is_noncrossing());
        }
    }

    #[test]
    fn tree_enumeration_small_counts() {
        assert_eq!(enumerate_trees(1, 1).unwrap().len(), 1);
        assert_eq!(enumerate_trees(2, 1).unwrap().len(), 1);
        assert_eq!(enumerate_trees(2, 3).unwrap().len(), 6);
        // total alternating trees with 9 vertices = Catalan(8)
        let mut total = 0;
        for nb in 1..=9usize {
            let nw = 9 - nb;
            total += enumerate_trees(nb, nw).unwrap().len();
        }
        assert_eq!(total, 1430);
    }

    #[test]
    fn tree_tables_sum_to_one() {
        let pb = solve_params(0.5).unwrap();
        let pw = solve_params(2.0).unwrap();
        let table = tree_count_table(&pb, &pw, 6, 6);
        let mass: f64 = table.iter().flatten().sum();
        assert!(mass > 0.8 && mass <= 1.0 + 1e-12, "mass = {mass}");
    }
}
