//! Exact samplers: uniform minimal factorizations, bi-conditioned two-type
//! Galton-Watson trees, and the partial-product pipeline.
//!
//! The factorization sampler recurses on the first factor: its gap law is
//! explicit, the remainder splits into two independent sub-cycles, and the
//! two sub-factorizations are shuffled back together uniformly. The tree
//! sampler draws the offspring vectors conditioned on their totals, applies
//! the discrete Vervaat transform to land on the excursion set, and decodes.

use statrs::function::gamma::ln_gamma;

use crate::dist::{ln_pmf_mu, ln_walk_pmf, pmf_mu, solve_params, OffspringParams};
use crate::error::Error;
use crate::ncp::{NonCrossingPartition, SetPartition};
use crate::paths::{decode_phi, PathPair, PhiCode};
use crate::perm::{Factorization, Transposition};
use crate::rng::RngStream;
use crate::tree::BiTypeTree;
use crate::Result;

/// `ln(j^{j-2} / (j-1)!)` for `j = 1..=n`; the per-cycle weight table shared
/// across recursion levels.
#[derive(Debug, Clone)]
pub struct BlockWeightTable {
    lw: Vec<f64>,
}

impl BlockWeightTable {
    pub fn new(n: usize) -> Self {
        let mut lw = vec![f64::NEG_INFINITY; n + 1];
        for (j, w) in lw.iter_mut().enumerate().skip(1) {
            let x = j as f64;
            *w = (x - 2.0) * x.ln() - ln_gamma(x);
        }
        Self { lw }
    }

    pub fn get(&self, j: usize) -> f64 {
        self.lw[j]
    }
}

/// The law of the gap `b - a` of the first factor `(a, a+gap)` at size `m`:
/// `P(gap = i)` proportional to `(m-i) w(i) w(m-i)`.
#[derive(Debug, Clone)]
pub struct GapLaw {
    m: usize,
    pmf: Vec<f64>,
    cum: Vec<f64>,
}

impl GapLaw {
    pub fn new(m: usize, table: &BlockWeightTable) -> Self {
        debug_assert!(m >= 2);
        let mut logs: Vec<f64> = (1..m)
            .map(|i| ((m - i) as f64).ln() + table.get(i) + table.get(m - i))
            .collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for l in logs.iter_mut() {
            *l = (*l - max).exp();
        }
        let total: f64 = logs.iter().sum();
        let pmf: Vec<f64> = logs.iter().map(|w| w / total).collect();
        let mut cum = pmf.clone();
        for i in 1..cum.len() {
            cum[i] += cum[i - 1];
        }
        Self { m, pmf, cum }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `P(gap = i)` for `1 <= i <= m-1`.
    pub fn pmf(&self, i: usize) -> f64 {
        self.pmf[i - 1]
    }

    pub fn sample(&self, rng: &mut RngStream) -> usize {
        let u = rng.uniform();
        match self.cum.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(idx) | Err(idx) => (idx + 1).min(self.m - 1),
        }
    }
}

/// Splits the canonical cycle on `[m]` after removing the first factor
/// `(a, a+gap)`: the remainder maps `x` to `tau(x) mod m + 1` and its two
/// increasing cycles partition `[m]`.
fn remainder_cycles(m: usize, a: usize, b: usize) -> (Vec<usize>, Vec<usize>) {
    let mut cycles: Vec<Vec<usize>> = Vec::with_capacity(2);
    let mut seen = vec![false; m + 1];
    for start in 1..=m {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cyc.push(x);
            let y = if x == a {
                b
            } else if x == b {
                a
            } else {
                x
            };
            x = y % m + 1;
        }
        cyc.sort_unstable();
        cycles.push(cyc);
    }
    debug_assert_eq!(cycles.len(), 2);
    let second = cycles.pop().unwrap();
    let first = cycles.pop().unwrap();
    (first, second)
}

/// Draws an exactly uniform minimal factorization of the `n`-cycle.
pub fn sample_min_factorization(n: usize, rng: &mut RngStream) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("ground set must be nonempty".into()));
    }
    let table = BlockWeightTable::new(n);

    // explicit work stack; recursion depth is O(n) in the worst case
    enum Work {
        Expand(Vec<usize>),
        Combine { t1: Transposition, left: usize },
    }
    let mut work = vec![Work::Expand((1..=n).collect())];
    let mut results: Vec<Vec<Transposition>> = Vec::new();
    while let Some(job) = work.pop() {
        match job {
            Work::Expand(labels) => {
                let m = labels.len();
                if m == 1 {
                    results.push(Vec::new());
                    continue;
                }
                if m == 2 {
                    results.push(vec![Transposition::new(labels[0], labels[1])?]);
                    continue;
                }
                let gap = GapLaw::new(m, &table).sample(rng);
                let a = 1 + rng.below((m - gap) as u64) as usize;
                let b = a + gap;
                let t1 = Transposition::new(labels[a - 1], labels[b - 1])?;
                let (c1, c2) = remainder_cycles(m, a, b);
                let first: Vec<usize> = c1.iter().map(|&x| labels[x - 1]).collect();
                let second: Vec<usize> = c2.iter().map(|&x| labels[x - 1]).collect();
                let left = first.len().saturating_sub(1);
                work.push(Work::Combine { t1, left });
                work.push(Work::Expand(second));
                work.push(Work::Expand(first));
            }
            Work::Combine { t1, left } => {
                let f2 = results.pop().expect("two sub-results pending");
                let f1 = results.pop().expect("two sub-results pending");
                debug_assert_eq!(f1.len(), left);
                // uniform shuffle keeping both internal orders
                let mut slots = rng.subset(f1.len() + f2.len(), f1.len());
                slots.sort_unstable();
                let mut merged = Vec::with_capacity(1 + f1.len() + f2.len());
                merged.push(t1);
                let (mut i1, mut i2, mut s) = (0, 0, 0);
                for pos in 0..f1.len() + f2.len() {
                    if s < slots.len() && slots[s] == pos {
                        merged.push(f1[i1]);
                        i1 += 1;
                        s += 1;
                    } else {
                        merged.push(f2[i2]);
                        i2 += 1;
                    }
                }
                results.push(merged);
            }
        }
    }
    debug_assert_eq!(results.len(), 1);
    Factorization::new(n, results.pop().unwrap())
}

/// Cycle partition of the `k`-th partial product, validated non-crossing.
pub fn partial_product_partition(f: &Factorization, k: usize) -> Result<NonCrossingPartition> {
    f.partial_product(k)?.cycle_partition().try_into()
}

/// Connected components of the graph on `[n]` with the given edges; for
/// prefixes of minimal factorizations these are exactly the blocks of the
/// partial-product partition.
pub fn forest_components(n: usize, edges: &[Transposition]) -> SetPartition {
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for t in edges {
        let (ra, rb) = (find(&mut parent, t.a()), find(&mut parent, t.b()));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in 1..=n {
        let r = find(&mut parent, x);
        blocks.entry(r).or_default().push(x);
    }
    let mut blocks: Vec<Vec<usize>> = blocks.into_values().collect();
    blocks.sort_unstable_by_key(|b| b[0]);
    SetPartition::from_sorted_blocks(n, blocks)
}

/// Exact sampler for alternating two-type trees conditioned on having
/// `n - k` black and `k + 1` white vertices, with offspring means matched to
/// the conditioning.
#[derive(Debug, Clone)]
pub struct TreeSampler {
    n: usize,
    k: usize,
    black: OffspringParams,
    white: OffspringParams,
}

impl TreeSampler {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::Infeasible(format!(
                "need 1 <= k <= n-1, got k = {k}, n = {n}"
            )));
        }
        let black = solve_params((k + 1) as f64 / (n - k) as f64)?;
        let white = solve_params((n - k) as f64 / (k + 1) as f64)?;
        Ok(Self { n, k, black, white })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn black_params(&self) -> &OffspringParams {
        &self.black
    }

    pub fn white_params(&self) -> &OffspringParams {
        &self.white
    }

    /// One exact sample; with `root_shifted` the root's offspring law is the
    /// shifted law (the one matching partial products of uniform minimal
    /// factorizations).
    pub fn sample(&self, root_shifted: bool, rng: &mut RngStream) -> Result<BiTypeTree> {
        let nb = self.n - self.k;
        let nw = self.k + 1;
        if root_shifted {
            self.sample_root_shifted(nb, nw, rng)
        } else {
            let code = sample_code(nb, nw, &self.black, &self.white, rng)?;
            decode_phi(&code)
        }
    }

    fn sample_root_shifted(
        &self,
        nb: usize,
        nw: usize,
        rng: &mut RngStream,
    ) -> Result<BiTypeTree> {
        // root degree law: P(j) proportional to mu(j-1) * P(white forest of
        // j trees carries the remaining nb-1 blacks and nw whites)
        let mut weights = Vec::with_capacity(nw);
        for j in 1..=nw {
            weights.push(ln_pmf_mu((j - 1) as u64, &self.black) + self.ln_forest_white(j, nb - 1, nw));
        }
        let j = 1 + draw_from_logs(&weights, rng);

        // split the totals across the j subtrees, then sample each
        let mut splits = Vec::with_capacity(j);
        let (mut rem_b, mut rem_w) = (nb - 1, nw);
        for t_i in (1..=j).rev() {
            if t_i == 1 {
                splits.push((rem_b, rem_w));
                break;
            }
            let mut cand = Vec::new();
            let mut logs = Vec::new();
            for w1 in 1..=rem_w.saturating_sub(t_i - 1) {
                for b1 in 0..=rem_b {
                    let lp = self.ln_tree_white(b1, w1)
                        + self.ln_forest_white(t_i - 1, rem_b - b1, rem_w - w1);
                    if lp > f64::NEG_INFINITY {
                        cand.push((b1, w1));
                        logs.push(lp);
                    }
                }
            }
            if cand.is_empty() {
                return Err(Error::Infeasible(format!(
                    "no feasible subtree split at j = {j}, remaining ({rem_b}, {rem_w})"
                )));
            }
            let pick = cand[draw_from_logs(&logs, rng)];
            splits.push(pick);
            rem_b -= pick.0;
            rem_w -= pick.1;
        }

        // sample each white-rooted subtree with the colors swapped, then
        // graft under a fresh black root
        let mut parents: Vec<i64> = vec![-1];
        for (b_i, w_i) in splits {
            let code = sample_code(w_i, b_i, &self.white, &self.black, rng)?;
            let sub = decode_phi(&code)?;
            let offset = parents.len() as i64;
            for (idx, p) in sub.parents().into_iter().enumerate() {
                parents.push(if idx == 0 { 0 } else { p + offset });
            }
        }
        BiTypeTree::from_parents(&parents)
    }

    /// `ln P(forest of j white-rooted trees has (b, w) vertices)`.
    fn ln_forest_white(&self, j: usize, b: usize, w: usize) -> f64 {
        if j == 0 {
            return if b == 0 && w == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        if w < j {
            return f64::NEG_INFINITY;
        }
        (j as f64).ln() - (w as f64).ln()
            + ln_walk_pmf(b as u64, (w - j) as u64, &self.black)
            + ln_walk_pmf(w as u64, b as u64, &self.white)
    }

    /// `ln P(single white-rooted tree has (b, w) vertices)`.
    fn ln_tree_white(&self, b: usize, w: usize) -> f64 {
        self.ln_forest_white(1, b, w)
    }
}

/// The bridge-conditioned walk behind the tree sampler: offspring vectors
/// conditioned on their totals, without the Vervaat rotation. Returns the
/// walk `b_1 + .. + b_i - i` of length `n - k` (it ends at `-1`).
pub fn sample_conditioned_bridge_walk(
    n: usize,
    k: usize,
    rng: &mut RngStream,
) -> Result<Vec<i64>> {
    let s = TreeSampler::new(n, k)?;
    let (nb, nw) = (n - k, k + 1);
    let h = conditioned_sum_sequence(nw, nb, &s.black, rng);
    let w = conditioned_sum_sequence(nb - 1, nw, &s.white, rng);
    let mut pairs = Vec::with_capacity(nb);
    let mut pos = 0usize;
    for &hi in &h {
        let b: u64 = w[pos..pos + hi as usize].iter().sum();
        pairs.push((hi, b));
        pos += hi as usize;
    }
    Ok(PathPair::new(pairs).b_walk())
}

/// Samples i.i.d. draws from `mu` conditioned on their sum, sequentially:
/// `P(X_1 = x | S_r = s) = mu(x) P(S_{r-1} = s - x) / P(S_r = s)`, the last
/// coordinate forced.
fn conditioned_sum_sequence(
    total: usize,
    count: usize,
    p: &OffspringParams,
    rng: &mut RngStream,
) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut s = total as u64;
    for r in (1..=count as u64).rev() {
        if r == 1 {
            out.push(s);
            break;
        }
        let denom = ln_walk_pmf(r, s, p);
        let u = rng.uniform();
        let mut acc = 0.0;
        let mut x = 0u64;
        loop {
            acc += (ln_pmf_mu(x, p) + ln_walk_pmf(r - 1, s - x, p) - denom).exp();
            if u < acc || x == s {
                break;
            }
            x += 1;
        }
        out.push(x);
        s -= x;
    }
    out
}

/// Samples the offspring code of a conditioned alternating tree whose root
/// is on the `root_side` law: offspring vectors conditioned on their totals,
/// rotated onto the excursion set by the Vervaat transform.
fn sample_code(
    n_root_side: usize,
    n_other: usize,
    root_side: &OffspringParams,
    other_side: &OffspringParams,
    rng: &mut RngStream,
) -> Result<PhiCode> {
    let h = conditioned_sum_sequence(n_other, n_root_side, root_side, rng);
    let w = conditioned_sum_sequence(n_root_side - 1, n_other, other_side, rng);

    // chunk the other-side offspring by parent and rotate whole chunks
    let mut chunks: Vec<&[u64]> = Vec::with_capacity(h.len());
    let mut pos = 0usize;
    for &hi in &h {
        chunks.push(&w[pos..pos + hi as usize]);
        pos += hi as usize;
    }
    let pairs = PathPair::new(
        h.iter()
            .zip(&chunks)
            .map(|(&hi, c)| (hi, c.iter().sum::<u64>()))
            .collect(),
    );
    let walk = pairs.b_walk();
    let mut istar = 0usize;
    let mut best = i64::MAX;
    for (j, &v) in walk.iter().enumerate() {
        if v < best {
            best = v;
            istar = j + 1;
        }
    }
    let m = h.len();
    let rot = istar % m;
    let h2: Vec<u64> = (0..m).map(|i| h[(i + rot) % m]).collect();
    let w2: Vec<u64> = (0..m)
        .flat_map(|i| chunks[(i + rot) % m].iter().copied())
        .collect();
    let code = PhiCode { h: h2, w: w2 };
    debug_assert!(code.validate().is_ok());
    Ok(code)
}

/// Inverse-CDF draw over unnormalized log-weights.
fn draw_from_logs(logs: &[f64], rng: &mut RngStream) -> usize {
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let u = rng.uniform() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Exact conditional law of a conditioned tree by enumeration; keyed by
/// parent array. `root_shifted` selects the shifted root law.
pub fn conditioned_tree_law(
    n: usize,
    k: usize,
    root_shifted: bool,
) -> Result<Vec<(BiTypeTree, f64)>> {
    let sampler = TreeSampler::new(n, k)?;
    let (nb, nw) = (n - k, k + 1);
    let trees = crate::oracle::enumerate_trees(nb, nw)?;
    let mut weighted: Vec<(BiTypeTree, f64)> = trees
        .into_iter()
        .map(|t| {
            let w = crate::oracle::tree_probability(
                &t,
                |c| pmf_mu(c, sampler.black_params()),
                |c| pmf_mu(c, sampler.white_params()),
                |c| {
                    if root_shifted {
                        crate::dist::pmf_mu_tilde(c, sampler.black_params())
                    } else {
                        pmf_mu(c, sampler.black_params())
                    }
                },
            );
            (t, w)
        })
        .collect();
    let total: f64 = weighted.iter().map(|(_, w)| w).sum();
    for (_, w) in weighted.iter_mut() {
        *w /= total;
    }
    Ok(weighted)
}
