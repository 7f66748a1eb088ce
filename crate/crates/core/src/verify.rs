//! Check suites: exact identities at small sizes, sampler exactness, and
//! the statistical regression guards at large `n`.
//!
//! Each suite returns a [`Report`] listing its individual checks; the CLI
//! `verify` subcommand serializes these to JSON and the acceptance
//! test-suite asserts them one criterion at a time. All statistical checks
//! run on fixed seeds so results are reproducible; thresholds live in
//! [`thresholds`].

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dist::{borel_pmf, pmf_mu, solve_params, walk_pmf};
use crate::error::Error;
use crate::lam::{hausdorff, lam_of_forest, lam_of_partition, HausdorffOpts};
use crate::levy::{density_d, density_q, ig_increment};
use crate::ncp::NonCrossingPartition;
use crate::oracle::{
    self, all_ncps, convolution_powers, count_minfacts_of_perm, enumerate_factorizations,
    enumerate_trees, exact_law_partial_product, forest_count_table, minfacts_formula,
    partial_product_law_formula, tree_count_table, Rational,
};
use crate::paths::{decode_phi, encode_phi, hb_paths};
use crate::perm::{Permutation, Transposition};
use crate::rng::RngStream;
use crate::sample::{
    conditioned_tree_law, forest_components, partial_product_partition,
    sample_min_factorization, BlockWeightTable, GapLaw, TreeSampler,
};
use crate::tree::{block_label_bounds, dual_tree, partition_of_tree, reduced_black_subtree};
use crate::Result;

/// Pinned tolerances and run sizes for the statistical checks.
pub mod thresholds {
    /// Monte-Carlo draws for sampler-exactness checks.
    pub const SAMPLER_DRAWS: usize = 100_000;
    /// Minimum chi-square p-value before declaring non-uniformity.
    pub const CHI2_MIN_P: f64 = 1e-3;
    /// Total-variation budget for conditioned-tree and end-to-end laws.
    pub const TV_BUDGET: f64 = 0.01;
    /// Absolute error allowed between the empirical first-gap law and the
    /// Borel pmf at `n = 10^4`, per point `i <= 5`.
    pub const BOREL_ABS: f64 = 0.01;
    /// Relative error for the walk-pmf closed form vs direct convolution.
    pub const WALK_PMF_REL: f64 = 1e-10;
    /// Relative error for the tree/walk counting identities.
    pub const BGW_REL: f64 = 1e-10;
    /// Absolute defect allowed in density normalizations.
    pub const DENSITY_INTEGRAL_ABS: f64 = 1e-6;
    /// Pointwise tolerance for the density shift identity.
    pub const SHIFT_IDENTITY_ABS: f64 = 1e-12;
    /// Relative error of the inverse-Gaussian increment mean over 10^6
    /// draws.
    pub const IG_MEAN_REL: f64 = 0.01;
    /// Draws for the inverse-Gaussian mean check.
    pub const IG_MEAN_DRAWS: usize = 1_000_000;
    /// KS budget for the rescaled walk endpoint against the time-1 density.
    pub const KS_ENDPOINT: f64 = 0.05;
    /// Samples for the endpoint KS check.
    pub const KS_SAMPLES: usize = 10_000;
    /// Sup-norm budget for the local-limit diagnostics.
    pub const LLT_SUP: f64 = 0.05;
    /// Ground-set size for the large-`n` diagnostics.
    pub const DIAG_N: usize = 10_000;
    /// Seeds for the longest-chord and Hausdorff medians.
    pub const DIAG_SEEDS: usize = 200;
    /// Budget for the median Hausdorff distance between the two pictures at
    /// `K = 5 sqrt(n)`.
    pub const MEDIAN_DH: f64 = 0.10;
    /// End-to-end laminations drawn for the validity check.
    pub const LAMINATION_DRAWS: usize = 1_000;
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            pass: true,
            checks: Vec::new(),
        }
    }

    fn add(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.pass &= pass;
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    /// One-line summary per check plus a verdict.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {}: {}\n",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out.push_str(&format!(
            "suite {}: {}\n",
            self.suite,
            if self.pass { "pass" } else { "FAIL" }
        ));
        out
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Trapezoid CDF of a density on `[lo, hi]`.
pub struct NumericCdf {
    lo: f64,
    step: f64,
    cum: Vec<f64>,
}

impl NumericCdf {
    pub fn new(density: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> Self {
        let step = (hi - lo) / steps as f64;
        let mut cum = Vec::with_capacity(steps + 1);
        cum.push(0.0);
        let mut prev = density(lo);
        let mut acc = 0.0;
        for i in 1..=steps {
            let x = lo + i as f64 * step;
            let cur = density(x);
            acc += 0.5 * (prev + cur) * step;
            cum.push(acc);
            prev = cur;
        }
        Self { lo, step, cum }
    }

    pub fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pos = (x - self.lo) / self.step;
        if pos <= 0.0 {
            return 0.0;
        }
        let idx = pos.floor() as usize;
        if idx + 1 >= self.cum.len() {
            return self.total();
        }
        let frac = pos - idx as f64;
        self.cum[idx] + frac * (self.cum[idx + 1] - self.cum[idx])
    }
}

/// Two-sided KS distance between sorted samples and a CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut ks = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        ks = ks.max((f - i as f64 / n).abs());
        ks = ks.max((f - (i + 1) as f64 / n).abs());
    }
    ks
}

/// Upper-tail chi-square p-value.
pub fn chi_square_pvalue(stat: f64, dof: f64) -> f64 {
    let dist = ChiSquared::new(dof).expect("positive dof");
    1.0 - dist.cdf(stat)
}

// ---------------------------------------------------------------------------
// suite: counts
// ---------------------------------------------------------------------------

/// Factorization counts `n^{n-2}` for `n = 3..=7` (8 behind the flag), and
/// the minimal-factorization count formula over all of `S_n`, `n <= 6`.
pub fn suite_counts(include_n8: bool) -> Report {
    let mut r = Report::new("counts");
    let expected: &[(usize, usize)] = &[
        (1, 1),
        (2, 1),
        (3, 3),
        (4, 16),
        (5, 125),
        (6, 1296),
        (7, 16807),
        (8, 262_144),
    ];
    let start = std::time::Instant::now();
    for &(n, want) in expected {
        if n == 8 && !include_n8 {
            continue;
        }
        let got = enumerate_factorizations(n).map(|v| v.len()).unwrap_or(0);
        r.add(
            format!("factorization count n={n}"),
            got == want,
            format!("{got} vs {want}"),
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    r.add(
        "enumeration runtime",
        elapsed < 60.0,
        format!("{elapsed:.2} s"),
    );

    for n in 1..=6usize {
        let mut all_ok = true;
        let mut worst = String::new();
        for_each_permutation(n, |sigma| {
            let got = count_minfacts_of_perm(sigma);
            let want = minfacts_formula(sigma);
            if Rational::from(BigInt::from(got)) != want {
                all_ok = false;
                worst = format!("sigma with image {:?}: {got} vs {want}", sigma.image());
            }
        });
        r.add(
            format!("minimal factorization count formula, all of S_{n}"),
            all_ok,
            if all_ok { "exact".into() } else { worst },
        );
    }
    r
}

fn for_each_permutation(n: usize, mut f: impl FnMut(&Permutation)) {
    let mut image: Vec<usize> = (1..=n).collect();
    // Heap's algorithm
    fn heap(k: usize, image: &mut Vec<usize>, f: &mut impl FnMut(&Permutation)) {
        if k == 1 {
            f(&Permutation::from_image(image.clone()).unwrap());
            return;
        }
        for i in 0..k {
            heap(k - 1, image, f);
            if k % 2 == 0 {
                image.swap(i, k - 1);
            } else {
                image.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut image, &mut f);
}

// ---------------------------------------------------------------------------
// suite: lawproduct
// ---------------------------------------------------------------------------

/// The partial-product law: exact rational agreement with the closed form
/// for `n = 4, 5, 6` and all `k`, plus the three sampler-exactness checks.
pub fn suite_lawproduct(seed: u64) -> Report {
    let mut r = Report::new("lawproduct");
    for n in [4usize, 5, 6] {
        for k in 1..n {
            let law = exact_law_partial_product(n, k).unwrap();
            let support = all_ncps(n, Some(n - k));
            let mut ok = law.len() == support.len();
            let mut detail = format!("{} partitions with {} blocks", support.len(), n - k);
            let mut total = Rational::from(BigInt::from(0));
            for p in &support {
                let formula = partial_product_law_formula(n, k, p);
                total += formula.clone();
                match law.get(p) {
                    Some(counted) if *counted == formula => {}
                    other => {
                        ok = false;
                        detail = format!(
                            "mismatch at {:?}: counted {:?}, formula {}",
                            p.blocks(),
                            other,
                            formula
                        );
                    }
                }
            }
            if total != Rational::from(BigInt::from(1)) {
                ok = false;
                detail = format!("law sums to {total}");
            }
            r.add(format!("partial-product law n={n} k={k}"), ok, detail);
        }
    }

    // uniformity over M_5 by chi-square
    let facts = enumerate_factorizations(5).unwrap();
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    for (i, f) in facts.iter().enumerate() {
        index.insert(fact_key(f.factors()), i);
    }
    let mut rng = RngStream::new(seed);
    let mut counts = vec![0u64; facts.len()];
    for _ in 0..thresholds::SAMPLER_DRAWS {
        let f = sample_min_factorization(5, &mut rng).unwrap();
        counts[index[&fact_key(f.factors())]] += 1;
    }
    let expect = thresholds::SAMPLER_DRAWS as f64 / facts.len() as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expect).powi(2) / expect)
        .sum();
    let p = chi_square_pvalue(stat, (facts.len() - 1) as f64);
    r.add(
        "uniformity over M_5 (chi-square)",
        p > thresholds::CHI2_MIN_P,
        format!("stat {stat:.1}, p {p:.4}"),
    );

    // conditioned-tree sampler against the enumerated conditional law
    let law = conditioned_tree_law(4, 2, false).unwrap();
    let mut idx: HashMap<Vec<i64>, usize> = HashMap::new();
    for (i, (t, _)) in law.iter().enumerate() {
        idx.insert(t.parents(), i);
    }
    let sampler = TreeSampler::new(4, 2).unwrap();
    let mut rng = RngStream::new(seed ^ 0xA5A5);
    let mut counts = vec![0u64; law.len()];
    for _ in 0..thresholds::SAMPLER_DRAWS {
        let t = sampler.sample(false, &mut rng).unwrap();
        counts[idx[&t.parents()]] += 1;
    }
    let tv: f64 = law
        .iter()
        .zip(&counts)
        .map(|((_, p), &c)| (c as f64 / thresholds::SAMPLER_DRAWS as f64 - p).abs())
        .sum::<f64>()
        / 2.0;
    r.add(
        "conditioned tree sampler TV at (n=4, K=2)",
        tv < thresholds::TV_BUDGET,
        format!("tv {tv:.5}"),
    );

    // end-to-end: tree route partition law vs the closed form at n=5, k=2
    let n = 5;
    let k = 2;
    let support = all_ncps(n, Some(n - k));
    let mut exact: HashMap<Vec<Vec<usize>>, f64> = HashMap::new();
    for p in &support {
        exact.insert(
            p.blocks().to_vec(),
            rational_to_f64(&partial_product_law_formula(n, k, p)),
        );
    }
    let sampler = TreeSampler::new(n, k).unwrap();
    let mut rng = RngStream::new(seed ^ 0x5A5A);
    let mut emp: HashMap<Vec<Vec<usize>>, u64> = HashMap::new();
    for _ in 0..thresholds::SAMPLER_DRAWS {
        let t = sampler.sample(true, &mut rng).unwrap();
        let p = partition_of_tree(&t).unwrap();
        *emp.entry(p.blocks().to_vec()).or_insert(0) += 1;
    }
    let mut tv = 0.0;
    let mut stray = false;
    for (blocks, pr) in &exact {
        let c = emp.get(blocks).copied().unwrap_or(0);
        tv += (c as f64 / thresholds::SAMPLER_DRAWS as f64 - pr).abs();
    }
    for blocks in emp.keys() {
        if !exact.contains_key(blocks) {
            stray = true;
        }
    }
    tv /= 2.0;
    r.add(
        "tree-route partial-product law TV at (n=5, k=2)",
        tv < thresholds::TV_BUDGET && !stray,
        format!("tv {tv:.5}, stray support: {stray}"),
    );
    r
}

fn fact_key(factors: &[Transposition]) -> Vec<(usize, usize)> {
    factors.iter().map(|t| (t.a(), t.b())).collect()
}

// ---------------------------------------------------------------------------
// suite: marginals
// ---------------------------------------------------------------------------

/// Stationarity and the first-factor marginal, exactly at small `n`; the
/// Borel limit of the first gap at `n = 10^4`.
pub fn suite_marginals(seed: u64) -> Report {
    let mut r = Report::new("marginals");

    // exact stationarity: prefix patterns of length n-2 match suffix
    // patterns count-for-count
    for n in 3..=6usize {
        let facts = enumerate_factorizations(n).unwrap();
        let mut balance: HashMap<Vec<(usize, usize)>, i64> = HashMap::new();
        for f in &facts {
            *balance
                .entry(fact_key(&f.factors()[..n - 2]))
                .or_insert(0) += 1;
            *balance.entry(fact_key(&f.factors()[1..])).or_insert(0) -= 1;
        }
        let ok = balance.values().all(|&v| v == 0);
        r.add(
            format!("exact stationarity n={n}"),
            ok,
            format!("{} distinct patterns", balance.len()),
        );
    }

    // exact first-factor marginal for n <= 7
    for n in 3..=7usize {
        let facts = enumerate_factorizations(n).unwrap();
        let mut counts: HashMap<(usize, usize), u64> = HashMap::new();
        for f in &facts {
            *counts
                .entry((f.factors()[0].a(), f.factors()[0].b()))
                .or_insert(0) += 1;
        }
        let mut ok = true;
        for a in 1..n {
            for b in a + 1..=n {
                let i = b - a;
                let want = Rational::from(oracle::big_factorial(n - 2))
                    * oracle::block_weight(i)
                    * oracle::block_weight(n - i);
                let got = Rational::from(BigInt::from(counts.get(&(a, b)).copied().unwrap_or(0)));
                if got != want {
                    ok = false;
                }
            }
        }
        r.add(
            format!("exact first-factor marginal n={n}"),
            ok,
            "counts match (n-2)! w(i) w(n-i)".to_string(),
        );
    }

    // Borel limit of the first gap at n = 10^4
    let n = thresholds::DIAG_N;
    let table = BlockWeightTable::new(n);
    let law = GapLaw::new(n, &table);
    let mut rng = RngStream::new(seed);
    let draws = thresholds::SAMPLER_DRAWS;
    let mut hist = vec![0u64; 7];
    for _ in 0..draws {
        let g = law.sample(&mut rng);
        if g <= 5 {
            hist[g] += 1;
        }
    }
    let mut worst = 0.0f64;
    for i in 1..=5usize {
        let emp = hist[i] as f64 / draws as f64;
        worst = worst.max((emp - borel_pmf(i as u64).unwrap()).abs());
    }
    r.add(
        format!("first-gap law vs Borel pmf at n={n} (i <= 5)"),
        worst <= thresholds::BOREL_ABS,
        format!("max abs deviation {worst:.5}"),
    );

    // integration guard: the full sampler's first factor follows the same
    // gap law (smaller run, 3-sigma band per point)
    let mut rng = RngStream::new(seed ^ 0xB0B0);
    let small_n = 200;
    let small_draws = 4000;
    let small_table = BlockWeightTable::new(small_n);
    let small_law = GapLaw::new(small_n, &small_table);
    let mut hist = vec![0u64; small_n];
    for _ in 0..small_draws {
        let f = sample_min_factorization(small_n, &mut rng).unwrap();
        let t = &f.factors()[0];
        hist[t.b() - t.a()] += 1;
    }
    let mut ok = true;
    for i in 1..small_n {
        let p = small_law.pmf(i);
        let sd = (p * (1.0 - p) / small_draws as f64).sqrt();
        let emp = hist[i] as f64 / small_draws as f64;
        if (emp - p).abs() > 4.0 * sd + 1e-3 {
            ok = false;
        }
    }
    r.add(
        format!("full sampler first-gap marginal at n={small_n}"),
        ok,
        format!("{small_draws} draws within 4 sigma bands"),
    );
    r
}

// ---------------------------------------------------------------------------
// suite: symmetry
// ---------------------------------------------------------------------------

/// The complement symmetry: the law of the `(n-k-1)`-th partial-product
/// partition equals the law of the complement of the `k`-th, exactly.
pub fn suite_symmetry() -> Report {
    let mut r = Report::new("symmetry");
    for n in 3..=6usize {
        for k in 1..n - 1 {
            let lhs = exact_law_partial_product(n, n - k - 1).unwrap();
            let rhs_raw = exact_law_partial_product(n, k).unwrap();
            let mut rhs: BTreeMap<NonCrossingPartition, Rational> = BTreeMap::new();
            for (p, pr) in rhs_raw {
                let kp = p.kreweras();
                *rhs.entry(kp)
                    .or_insert_with(|| Rational::from(BigInt::from(0))) += pr;
            }
            let ok = lhs == rhs;
            r.add(
                format!("complement symmetry n={n} k={k}"),
                ok,
                format!("{} support points", lhs.len()),
            );
        }
    }
    r
}

// ---------------------------------------------------------------------------
// suite: bijections
// ---------------------------------------------------------------------------

/// Round trips and corner arithmetic: partition/tree, offspring-vector
/// code, double complement, label bounds, walk identifications.
pub fn suite_bijections() -> Report {
    let mut r = Report::new("bijections");

    let mut round_trips = 0usize;
    let mut ok = true;
    for n in 1..=8usize {
        for p in all_ncps(n, None) {
            let t = dual_tree(&p);
            ok &= t.black_count() == p.block_count();
            ok &= t.white_count() == p.kreweras().block_count();
            ok &= partition_of_tree(&t).unwrap() == p;
            round_trips += 1;
        }
    }
    r.add(
        "dual tree round trip, all partitions n <= 8",
        ok,
        format!("{round_trips} cases"),
    );

    let mut ok = true;
    let mut cases = 0usize;
    for n in 1..=8usize {
        for p in all_ncps(n, None) {
            ok &= p.kreweras().kreweras() == p.rotate(-1);
            ok &= p.kreweras().block_count() + p.block_count() == n + 1;
            cases += 1;
        }
    }
    r.add(
        "double complement is the backward rotation, n <= 8",
        ok,
        format!("{cases} cases"),
    );

    let mut ok = true;
    let mut cases = 0usize;
    for total in 2..=9usize {
        for nb in 1..=total {
            let nw = total - nb;
            for t in enumerate_trees(nb, nw).unwrap() {
                let code = encode_phi(&t);
                ok &= code.validate().is_ok();
                ok &= decode_phi(&code).unwrap() == t;
                cases += 1;
            }
        }
    }
    r.add(
        "offspring-code round trip, all trees <= 9 vertices",
        ok,
        format!("{cases} trees"),
    );

    // corner label arithmetic and the walk identification, exhaustively
    let mut ok_bounds = true;
    let mut ok_walk = true;
    let mut ok_chords = true;
    for total in 2..=9usize {
        for nb in 1..=total {
            let nw = total - nb;
            for t in enumerate_trees(nb, nw).unwrap() {
                let walk = hb_paths(&t).b_walk();
                ok_walk &= walk == reduced_black_subtree(&t).lukasiewicz();
                let blacks = t.black_vertices();
                let pairs = crate::levy::chords_from_discrete_path(&walk).unwrap();
                let by_i: HashMap<usize, usize> = pairs.into_iter().collect();
                for i in 1..blacks.len() {
                    let b = block_label_bounds(&t, i).unwrap();
                    ok_bounds &= b.y == b.x + b.n_desc;
                    ok_bounds &= i <= b.x && b.x <= i + t.white_count();
                    ok_bounds &=
                        i + b.n_black_desc <= b.y && b.y <= i + b.n_black_desc + 2 * t.white_count();
                    // first-drop pairing matches the descendant interval
                    ok_chords &= by_i.get(&i) == Some(&(i + b.n_black_desc + 1));
                }
            }
        }
    }
    r.add("corner label bounds, all trees <= 9 vertices", ok_bounds, "");
    r.add(
        "walk equals reduced-subtree path, all trees <= 9 vertices",
        ok_walk,
        "",
    );
    r.add(
        "first-drop pairs match descendant intervals",
        ok_chords,
        "",
    );
    r
}

// ---------------------------------------------------------------------------
// suite: bgw-formulas
// ---------------------------------------------------------------------------

/// Finite counting identities for the conditioned walks and trees, both
/// sides computed independently, plus the walk-pmf closed-form gate.
pub fn suite_bgw_formulas() -> Report {
    let mut r = Report::new("bgw-formulas");
    let pb = solve_params(0.5).unwrap();
    let pw = solve_params(2.0).unwrap();

    // closed form vs direct convolution
    let mut worst = 0.0f64;
    for p in [&pb, &pw] {
        let conv = convolution_powers(p, 6, 200);
        for n_steps in 1..=6usize {
            for k in 0..=10usize {
                let direct = conv[n_steps][k];
                let closed = walk_pmf(n_steps as u64, k as u64, p);
                worst = worst.max((direct - closed).abs() / closed);
            }
        }
    }
    r.add(
        "walk pmf closed form vs convolution (N <= 6, k <= 10)",
        worst <= thresholds::WALK_PMF_REL,
        format!("max rel err {worst:.2e}"),
    );

    let rel = |a: f64, b: f64| {
        if a == 0.0 && b == 0.0 {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    };

    // vertex-count laws: tree enumeration vs the cycle-lemma formulas
    let conv_b = convolution_powers(&pb, 7, 64);
    let conv_w = convolution_powers(&pw, 7, 64);
    let black_rooted = tree_count_table(&pb, &pw, 6, 6);
    let white_rooted = tree_count_table(&pw, &pb, 6, 6);
    let mut worst_black = 0.0f64;
    let mut worst_white = 0.0f64;
    for nb in 1..=6usize {
        for nw in 0..=6usize {
            let lhs = black_rooted[nb][nw];
            let rhs = if nw <= 64 && nb >= 1 {
                conv_b[nb][nw] * (if nb >= 1 { conv_w[nw][nb - 1] } else { 0.0 }) / nb as f64
            } else {
                0.0
            };
            worst_black = worst_black.max(rel(lhs, rhs));
            // white-rooted: swap roles
            if nw >= 1 {
                let lhs = white_rooted[nw][nb];
                let rhs = conv_b[nb][nw - 1] * conv_w[nw][nb] / nw as f64;
                worst_white = worst_white.max(rel(lhs, rhs));
            }
        }
    }
    r.add(
        "black-rooted vertex-count law (n <= 6)",
        worst_black <= thresholds::BGW_REL,
        format!("max rel err {worst_black:.2e}"),
    );
    r.add(
        "white-rooted vertex-count law (n <= 6)",
        worst_white <= thresholds::BGW_REL,
        format!("max rel err {worst_white:.2e}"),
    );

    // forests of j i.i.d. trees
    let mut worst_forest = 0.0f64;
    for j in 1..=6usize {
        let fw = forest_count_table(&white_rooted, j);
        let fb = forest_count_table(&black_rooted, j);
        for nb in 0..=6usize {
            for nw in j..=6usize {
                let rhs = if nw >= j {
                    j as f64 / nw as f64 * conv_b[nb][nw - j] * conv_w[nw][nb]
                } else {
                    0.0
                };
                worst_forest = worst_forest.max(rel(fw[nw][nb], rhs));
            }
        }
        for nb in j..=6usize {
            for nw in 0..=6usize {
                let rhs = j as f64 / nb as f64 * conv_b[nb][nw] * conv_w[nw][nb - j];
                worst_forest = worst_forest.max(rel(fb[nb][nw], rhs));
            }
        }
    }
    r.add(
        "forest vertex-count laws (j <= 6)",
        worst_forest <= thresholds::BGW_REL,
        format!("max rel err {worst_forest:.2e}"),
    );

    // joint walk kernel: P(H = h, B = b) = mu_b(h) P(S_w_h = b)
    let hmax = 8usize;
    let bmax = 14usize;
    let mut kernel = vec![vec![0.0f64; bmax + 1]; hmax + 1];
    let conv_w_small = convolution_powers(&pw, hmax, bmax);
    for h in 0..=hmax {
        for b in 0..=bmax {
            kernel[h][b] = pmf_mu(h as u64, &pb) * conv_w_small[h][b];
        }
    }

    // decoupling: P(Hbar_n1 = n2, sum B = s) = P(S_b_n1 = n2) P(S_w_n2 = s)
    let mut worst_dec = 0.0f64;
    for n1 in 1..=6usize {
        // DP over steps in (hsum, bsum)
        let mut dp = vec![vec![0.0f64; bmax + 1]; hmax + 1];
        dp[0][0] = 1.0;
        for _ in 0..n1 {
            let mut next = vec![vec![0.0f64; bmax + 1]; hmax + 1];
            for hs in 0..=hmax {
                for bs in 0..=bmax {
                    if dp[hs][bs] == 0.0 {
                        continue;
                    }
                    for h in 0..=hmax - hs {
                        for b in 0..=bmax - bs {
                            next[hs + h][bs + b] += dp[hs][bs] * kernel[h][b];
                        }
                    }
                }
            }
            dp = next;
        }
        for n2 in 0..=6usize {
            for n3 in 0..=6usize {
                // Bbar_n1 = n3 means the raw sum is n1 + n3
                if n1 + n3 > bmax {
                    continue;
                }
                let lhs = dp[n2][n1 + n3];
                let rhs = conv_b[n1][n2] * conv_w[n2][n1 + n3];
                worst_dec = worst_dec.max(rel(lhs, rhs));
            }
        }
    }
    r.add(
        "walk decoupling identity (indices <= 6)",
        worst_dec <= thresholds::BGW_REL,
        format!("max rel err {worst_dec:.2e}"),
    );

    // excursion vs tree enumeration and the cyclic-lemma 1/n factor
    let mut worst_exc = 0.0f64;
    let mut worst_cyc = 0.0f64;
    for nb in 1..=5usize {
        for nw in 0..=5usize {
            let exc = excursion_probability(&kernel, nb, nw, true);
            let bridge = excursion_probability(&kernel, nb, nw, false);
            worst_exc = worst_exc.max(rel(exc, black_rooted[nb][nw]));
            worst_cyc = worst_cyc.max(rel(exc, bridge / nb as f64));
        }
    }
    r.add(
        "excursion path sum equals tree enumeration (n <= 5)",
        worst_exc <= thresholds::BGW_REL,
        format!("max rel err {worst_exc:.2e}"),
    );
    r.add(
        "excursion probability is bridge / n (n <= 5)",
        worst_cyc <= thresholds::BGW_REL,
        format!("max rel err {worst_cyc:.2e}"),
    );
    r
}

/// Sum of joint-kernel path weights with `Hbar = nw`, walk ending at `-1`,
/// optionally constrained to stay nonnegative before the end.
fn excursion_probability(kernel: &[Vec<f64>], nb: usize, nw: usize, excursion: bool) -> f64 {
    let hmax = kernel.len() - 1;
    let bmax = kernel[0].len() - 1;
    // state: (step i, hsum, bsum); walk value is bsum - i
    let mut dp: HashMap<(usize, usize), f64> = HashMap::new();
    dp.insert((0, 0), 1.0);
    for i in 1..=nb {
        let mut next: HashMap<(usize, usize), f64> = HashMap::new();
        for (&(hs, bs), &w) in &dp {
            for h in 0..=hmax.saturating_sub(hs) {
                for b in 0..=bmax.saturating_sub(bs) {
                    let k = kernel[h][b];
                    if k == 0.0 {
                        continue;
                    }
                    let bs2 = bs + b;
                    let walk = bs2 as i64 - i as i64;
                    if i < nb {
                        if excursion && walk < 0 {
                            continue;
                        }
                    } else if walk != -1 {
                        continue;
                    }
                    *next.entry((hs + h, bs2)).or_insert(0.0) += w * k;
                }
            }
        }
        dp = next;
    }
    dp.get(&(nw, nb - 1)).copied().unwrap_or(0.0)
}

// ---------------------------------------------------------------------------
// suite: llt-diagnostic
// ---------------------------------------------------------------------------

/// Density normalizations, the shift identity, the increment mean, the
/// rescaled endpoint KS check and the local-limit sup-norm diagnostics.
pub fn suite_llt_diagnostic(seed: u64) -> Report {
    let mut r = Report::new("llt-diagnostic");

    for c in [1.0f64, 5.0] {
        let cdf_d = NumericCdf::new(|x| density_d(1.0, x, c), -c, 60.0 / c.max(1.0) + 40.0, 400_000);
        r.add(
            format!("time-1 density integrates to 1 (c={c})"),
            (cdf_d.total() - 1.0).abs() <= thresholds::DENSITY_INTEGRAL_ABS,
            format!("integral {:.9}", cdf_d.total()),
        );
        let cdf_q = NumericCdf::new(|x| density_q(1.0, x, c), 0.0, 60.0 / c.max(1.0) + 40.0, 400_000);
        r.add(
            format!("subordinator density integrates to 1 (c={c})"),
            (cdf_q.total() - 1.0).abs() <= thresholds::DENSITY_INTEGRAL_ABS,
            format!("integral {:.9}", cdf_q.total()),
        );
    }

    // pointwise shift identity on a grid
    let c = 2.0;
    let mut worst = 0.0f64;
    for u in [0.1, 0.25, 0.5, 0.75, 0.9] {
        for i in 0..400 {
            let x = -c * (1.0 - u) + i as f64 * 0.02;
            let lhs = density_q(1.0 - u, x + c * (1.0 - u), c);
            let rhs = density_d(1.0 - u, x, c);
            worst = worst.max((lhs - rhs).abs());
        }
    }
    r.add(
        "density shift identity on a grid",
        worst <= thresholds::SHIFT_IDENTITY_ABS,
        format!("max abs dev {worst:.2e}"),
    );

    // increment mean over 10^6 draws
    let mut rng = RngStream::new(seed);
    let (dt, cc) = (0.01, 5.0);
    let mut sum = 0.0;
    for _ in 0..thresholds::IG_MEAN_DRAWS {
        sum += ig_increment(dt, cc, &mut rng).unwrap();
    }
    let mean = sum / thresholds::IG_MEAN_DRAWS as f64;
    r.add(
        "increment mean over 10^6 draws",
        (mean - cc * dt).abs() <= thresholds::IG_MEAN_REL * cc * dt,
        format!("mean {mean:.6} vs {}", cc * dt),
    );

    // rescaled endpoint of the unconditioned walk vs the time-1 density
    let n = thresholds::DIAG_N;
    let c = 1.0;
    let k = (c * (n as f64).sqrt()) as usize;
    let sampler = TreeSampler::new(n, k).unwrap();
    let (pb, pw) = (sampler.black_params(), sampler.white_params());
    // table for the total number of white vertices produced in n-k steps
    let n_steps = (n - k) as u64;
    let mean_w = n_steps as f64 * pb.mean;
    let sd_w = (n_steps as f64 * pb.variance).sqrt();
    let wmax = (mean_w + 14.0 * sd_w) as usize;
    let mut cum_total = Vec::with_capacity(wmax + 1);
    let mut acc = 0.0;
    for kk in 0..=wmax {
        acc += walk_pmf(n_steps, kk as u64, pb);
        cum_total.push(acc);
    }
    // cumulative white offspring law, truncated when the tail clears 1e-13
    let mut cum_w = Vec::new();
    let mut acc = 0.0;
    let mut i = 0u64;
    while acc < 1.0 - 1e-13 && i < 3_000_000 {
        acc += pmf_mu(i, pw);
        cum_w.push(acc);
        i += 1;
    }
    let mut rng = RngStream::new(seed ^ 0xC0FFEE);
    let mut endpoints: Vec<f64> = (0..thresholds::KS_SAMPLES)
        .map(|_| {
            let u = rng.uniform() * cum_total.last().unwrap();
            let total_whites = match cum_total
                .binary_search_by(|v| v.partial_cmp(&u).unwrap())
            {
                Ok(ix) | Err(ix) => ix,
            };
            let mut b_sum = 0i64;
            for _ in 0..total_whites {
                let v = rng.uniform() * cum_w.last().unwrap();
                let d = match cum_w.binary_search_by(|w| w.partial_cmp(&v).unwrap()) {
                    Ok(ix) | Err(ix) => ix,
                };
                b_sum += d as i64;
            }
            c * (b_sum - (n - k) as i64) as f64 / n as f64
        })
        .collect();
    endpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cdf = NumericCdf::new(|x| density_d(1.0, x, c), -c, 80.0, 400_000);
    let ks = ks_distance(&endpoints, |x| cdf.eval(x) / cdf.total());
    r.add(
        format!("rescaled endpoint KS vs time-1 density (n={n})"),
        ks <= thresholds::KS_ENDPOINT,
        format!("ks {ks:.4}"),
    );

    // local-limit sup norms after rescaling
    let d_black = ((n_steps as f64) * pb.variance).sqrt();
    let mut sup_black = 0.0f64;
    for kk in 0..=(mean_w + 12.0 * sd_w) as u64 {
        let lhs = d_black * walk_pmf(n_steps, kk, pb);
        let arg = (kk as f64 - n_steps as f64 * pb.mean) / d_black;
        let gauss = (-0.5 * arg * arg).exp() / (2.0 * std::f64::consts::PI).sqrt();
        sup_black = sup_black.max((lhs - gauss).abs());
    }
    r.add(
        "black walk pmf vs Gaussian density (sup norm)",
        sup_black <= thresholds::LLT_SUP,
        format!("sup {sup_black:.4}"),
    );

    let d_white = (pw.variance * k as f64).sqrt();
    let mut sup_white = 0.0f64;
    let kmax = (3.0 * n as f64) as u64;
    let mut kk = 1u64;
    while kk <= kmax {
        let lhs = d_white * walk_pmf(k as u64, kk, pw);
        let rhs = density_q(1.0, kk as f64 / d_white, c);
        sup_white = sup_white.max((lhs - rhs).abs());
        kk += 7; // the sup varies slowly on the n/c scale
    }
    r.add(
        "white walk pmf vs subordinator density (sup norm)",
        sup_white <= thresholds::LLT_SUP,
        format!("sup {sup_white:.4}"),
    );
    r
}

// ---------------------------------------------------------------------------
// suite: hausdorff
// ---------------------------------------------------------------------------

/// Geometric diagnostics at `n = 10^4` plus end-to-end lamination validity.
pub fn suite_hausdorff(seed: u64) -> Report {
    let mut r = Report::new("hausdorff");
    let n = thresholds::DIAG_N;
    let root = RngStream::new(seed);

    // longest chord of the partition picture: small at K = sqrt(n)/log(n),
    // macroscopic at K = 5 sqrt(n)
    let k_small = ((n as f64).sqrt() / (n as f64).ln()) as usize;
    let k_large = 5 * ((n as f64).sqrt() as usize);
    let seeds: Vec<u64> = (0..thresholds::DIAG_SEEDS as u64).collect();
    let medians: Vec<(f64, f64)> = seeds
        .par_iter()
        .map(|&s| {
            let mut out = (0.0, 0.0);
            for (slot, k) in [(0usize, k_small), (1, k_large)] {
                let mut rng = root.substream(s * 2 + slot as u64 + 1);
                let sampler = TreeSampler::new(n, k).unwrap();
                let t = sampler.sample(true, &mut rng).unwrap();
                let p = partition_of_tree(&t).unwrap();
                let lc = lam_of_partition(&p).longest_chord();
                if slot == 0 {
                    out.0 = lc;
                } else {
                    out.1 = lc;
                }
            }
            out
        })
        .collect();
    let mut small: Vec<f64> = medians.iter().map(|m| m.0).collect();
    let mut large: Vec<f64> = medians.iter().map(|m| m.1).collect();
    small.sort_by(|a, b| a.partial_cmp(b).unwrap());
    large.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let med_small = small[small.len() / 2];
    let med_large = large[large.len() / 2];
    r.add(
        format!("longest-chord medians at K={k_small} vs K={k_large} ({} seeds)", seeds.len()),
        med_small < med_large,
        format!("{med_small:.4} vs {med_large:.4}"),
    );

    // median Hausdorff distance between the forest and partition pictures
    let dhs: Vec<f64> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = root.substream(0x1000 + s);
            let f = sample_min_factorization(n, &mut rng).unwrap();
            let prefix = &f.factors()[..k_large];
            let forest = lam_of_forest(n, prefix).unwrap();
            let comps = forest_components(n, prefix);
            let p = NonCrossingPartition::try_from(comps).unwrap();
            let partition = lam_of_partition(&p);
            hausdorff(
                &forest,
                &partition,
                HausdorffOpts {
                    delta: 5e-3,
                    include_circle: true,
                },
            )
        })
        .collect();
    let mut dhs = dhs;
    dhs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let med_dh = dhs[dhs.len() / 2];
    r.add(
        format!("median picture distance at K={k_large} ({} seeds)", seeds.len()),
        med_dh < thresholds::MEDIAN_DH,
        format!("median {med_dh:.4}, max {:.4}", dhs[dhs.len() - 1]),
    );

    // end-to-end lamination validity at n <= 64, exact endpoints
    let mut rng = root.substream(0x2000);
    let mut ok_cross = true;
    let mut ok_touch = true;
    for _ in 0..thresholds::LAMINATION_DRAWS {
        let nn = 8 + rng.below(57) as usize; // 8..=64
        let f = sample_min_factorization(nn, &mut rng).unwrap();
        let k = 1 + rng.below((nn - 1) as u64) as usize;
        let prefix = &f.factors()[..k];
        let forest = match lam_of_forest(nn, prefix) {
            Ok(l) => l,
            Err(_) => {
                ok_cross = false;
                continue;
            }
        };
        let partition = lam_of_partition(&partial_product_partition(&f, k).unwrap());
        ok_cross &= forest.is_noncrossing() && partition.is_noncrossing();
        ok_touch &= forest.touched_indices() == partition.touched_indices();
    }
    r.add(
        "laminations non-crossing end to end",
        ok_cross,
        format!("{} draws", thresholds::LAMINATION_DRAWS),
    );
    r.add(
        "circle-touching sets agree between pictures",
        ok_touch,
        "block supports equal forest supports",
    );
    r
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

pub const SUITES: &[&str] = &[
    "counts",
    "lawproduct",
    "marginals",
    "symmetry",
    "bijections",
    "bgw-formulas",
    "llt-diagnostic",
    "hausdorff",
];

/// Runs a named suite with a seed for its statistical parts.
pub fn run_suite(name: &str, seed: u64, include_n8: bool) -> Result<Report> {
    match name {
        "counts" => Ok(suite_counts(include_n8)),
        "lawproduct" => Ok(suite_lawproduct(seed)),
        "marginals" => Ok(suite_marginals(seed)),
        "symmetry" => Ok(suite_symmetry()),
        "bijections" => Ok(suite_bijections()),
        "bgw-formulas" => Ok(suite_bgw_formulas()),
        "llt-diagnostic" => Ok(suite_llt_diagnostic(seed)),
        "hausdorff" => Ok(suite_hausdorff(seed)),
        other => Err(Error::Domain(format!(
            "unknown suite '{other}'; available: {}",
            SUITES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_cdf_of_uniform() {
        let cdf = NumericCdf::new(|_| 1.0, 0.0, 1.0, 1000);
        assert!((cdf.total() - 1.0).abs() < 1e-12);
        assert!((cdf.eval(0.25) - 0.25).abs() < 1e-6);
        assert_eq!(cdf.eval(-1.0), 0.0);
        assert!((cdf.eval(2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_tail() {
        // median of chi2_1 is about 0.455
        let p = chi_square_pvalue(0.455, 1.0);
        assert!((p - 0.5).abs() < 0.01);
    }

    #[test]
    fn suite_dispatch_rejects_unknown() {
        assert!(run_suite("nope", 0, false).is_err());
    }
}
