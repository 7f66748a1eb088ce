//! Chord sets in the closed unit disk: the partition and forest pictures of
//! a factorization prefix, laminations extracted from excursions, Hausdorff
//! distance and geometric diagnostics.
//!
//! Angles are fractions of a turn with the clockwise orientation: label `j`
//! of `[n]` sits at `e^{-2 pi i j / n}`.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::levy::{chords_from_discrete_path, SampledPath};
use crate::ncp::NonCrossingPartition;
use crate::perm::Transposition;
use crate::Result;

/// A chord of the unit disk between angles `s < t` (fractions of a turn in
/// `[0, 1)`); `s = t` encodes a degenerate point-chord.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Chord {
    pub s: f64,
    pub t: f64,
}

impl Chord {
    pub fn new(a: f64, b: f64) -> Self {
        let (s, t) = if a <= b { (a, b) } else { (b, a) };
        Self { s, t }
    }

    /// Chord between circle labels `a, b` of `[n]`.
    pub fn from_indices(n: usize, a: usize, b: usize) -> Self {
        Self::new((a % n) as f64 / n as f64, (b % n) as f64 / n as f64)
    }

    /// Euclidean endpoints (clockwise parameterization).
    pub fn endpoints(&self) -> ([f64; 2], [f64; 2]) {
        (angle_point(self.s), angle_point(self.t))
    }

    /// Euclidean length `2 sin(pi (t - s))`.
    pub fn length(&self) -> f64 {
        2.0 * (std::f64::consts::PI * (self.t - self.s)).sin().abs()
    }

    /// Strict interior crossing; chords sharing an endpoint do not cross.
    pub fn crosses(&self, other: &Chord) -> bool {
        let (a, b) = (self.s, self.t);
        let (c, d) = (other.s, other.t);
        (a < c && c < b && b < d) || (c < a && a < d && d < b)
    }
}

pub fn angle_point(s: f64) -> [f64; 2] {
    let th = -2.0 * std::f64::consts::PI * s;
    [th.cos(), th.sin()]
}

/// A finite set of pairwise non-crossing chords; `n` records the circle
/// discretization (0 for continuum angles).
#[derive(Debug, Clone, PartialEq)]
pub struct Lamination {
    pub n: usize,
    chords: Vec<Chord>,
}

impl Lamination {
    pub fn new(n: usize, mut chords: Vec<Chord>) -> Self {
        chords.sort_by(|a, b| (a.s, a.t).partial_cmp(&(b.s, b.t)).unwrap());
        chords.dedup_by(|a, b| a.s == b.s && a.t == b.t);
        Self { n, chords }
    }

    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    pub fn len(&self) -> usize {
        self.chords.len()
    }

    /// Pairwise non-crossing check (chords may share endpoints).
    pub fn is_noncrossing(&self) -> bool {
        for (i, a) in self.chords.iter().enumerate() {
            for b in &self.chords[i + 1..] {
                if b.s >= a.t {
                    break; // sorted by start; no later chord can cross a
                }
                if a.crosses(b) {
                    return false;
                }
            }
        }
        true
    }

    /// Circle labels touched by some chord (integer laminations only).
    pub fn touched_indices(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        if self.n == 0 {
            return out;
        }
        for c in &self.chords {
            for angle in [c.s, c.t] {
                let j = (angle * self.n as f64).round() as usize;
                out.insert(if j == 0 { self.n } else { j });
            }
        }
        out
    }

    /// Euclidean length of the longest chord; 0 when empty.
    pub fn longest_chord(&self) -> f64 {
        self.chords.iter().map(Chord::length).fold(0.0, f64::max)
    }
}

/// The partition picture: for each block of size >= 2, chords between
/// cyclically consecutive elements (smallest and largest are consecutive by
/// convention); singletons contribute nothing. A 2-element block yields a
/// single chord.
pub fn lam_of_partition(p: &NonCrossingPartition) -> Lamination {
    let n = p.n();
    let mut chords = Vec::new();
    for b in p.blocks() {
        if b.len() < 2 {
            continue;
        }
        for w in b.windows(2) {
            chords.push(Chord::from_indices(n, w[0], w[1]));
        }
        if b.len() > 2 {
            chords.push(Chord::from_indices(n, b[b.len() - 1], b[0]));
        }
    }
    Lamination::new(n, chords)
}

/// The forest picture: one chord per transposition edge; rejects crossing
/// edge sets (prefixes of minimal factorizations never cross).
pub fn lam_of_forest(n: usize, edges: &[Transposition]) -> Result<Lamination> {
    let chords: Vec<Chord> = edges
        .iter()
        .map(|t| Chord::from_indices(n, t.a(), t.b()))
        .collect();
    let lam = Lamination::new(n, chords);
    if !lam.is_noncrossing() {
        // report a witness in circle labels
        for (i, a) in lam.chords.iter().enumerate() {
            for b in &lam.chords[i + 1..] {
                if a.crosses(b) {
                    let lab = |x: f64| {
                        let j = (x * n as f64).round() as usize;
                        if j == 0 {
                            n
                        } else {
                            j
                        }
                    };
                    return Err(Error::Crossing {
                        a: lab(a.s),
                        b: lab(b.s),
                        c: lab(a.t),
                        d: lab(b.t),
                    });
                }
            }
        }
    }
    Ok(lam)
}

/// Options for [`hausdorff`].
#[derive(Debug, Clone, Copy)]
pub struct HausdorffOpts {
    /// Sampling step along segments; the reported distance is within
    /// `delta / 2` of the true one (point-to-set distance is 1-Lipschitz
    /// along a segment).
    pub delta: f64,
    /// Treat both sets as containing the unit circle (the compact sets of
    /// the lamination picture); otherwise compare bare chord unions.
    pub include_circle: bool,
}

impl Default for HausdorffOpts {
    fn default() -> Self {
        Self {
            delta: 2e-3,
            include_circle: true,
        }
    }
}

/// Symmetric Hausdorff distance between two chord systems, by sampling each
/// segment at step `delta` and querying exact point-segment distances
/// through a uniform grid.
pub fn hausdorff(l1: &Lamination, l2: &Lamination, opts: HausdorffOpts) -> f64 {
    let d12 = directed_hausdorff(l1, l2, opts);
    let d21 = directed_hausdorff(l2, l1, opts);
    d12.max(d21)
}

fn directed_hausdorff(from: &Lamination, to: &Lamination, opts: HausdorffOpts) -> f64 {
    let grid = SegmentGrid::build(to, 64);
    let mut worst = 0.0f64;
    for c in from.chords() {
        let (p, q) = c.endpoints();
        let len = c.length();
        let steps = (len / opts.delta).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let x = [p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t];
            let mut d = grid.min_distance(x, worst);
            if opts.include_circle {
                d = d.min(1.0 - (x[0] * x[0] + x[1] * x[1]).sqrt());
            }
            worst = worst.max(d);
        }
    }
    // when the circle belongs to both sets its points are at distance 0, so
    // only segment samples can realize the supremum
    worst
}

/// Exact distance from a point to a segment.
fn point_segment_distance(x: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ax = [x[0] - a[0], x[1] - a[1]];
    let den = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if den > 0.0 {
        ((ax[0] * ab[0] + ax[1] * ab[1]) / den).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let px = a[0] + t * ab[0] - x[0];
    let py = a[1] + t * ab[1] - x[1];
    (px * px + py * py).sqrt()
}

/// Uniform grid over `[-1, 1]^2` bucketing segments by bounding box; point
/// queries expand rings until the ring bound certifies the minimum.
struct SegmentGrid {
    cells: Vec<Vec<u32>>,
    segs: Vec<([f64; 2], [f64; 2])>,
    dim: usize,
    cell: f64,
}

impl SegmentGrid {
    fn build(l: &Lamination, dim: usize) -> Self {
        let cell = 2.0 / dim as f64;
        let mut cells = vec![Vec::new(); dim * dim];
        let segs: Vec<_> = l.chords().iter().map(|c| c.endpoints()).collect();
        for (id, (a, b)) in segs.iter().enumerate() {
            let (lo_x, hi_x) = (a[0].min(b[0]), a[0].max(b[0]));
            let (lo_y, hi_y) = (a[1].min(b[1]), a[1].max(b[1]));
            let cx0 = Self::coord(lo_x, dim, cell);
            let cx1 = Self::coord(hi_x, dim, cell);
            let cy0 = Self::coord(lo_y, dim, cell);
            let cy1 = Self::coord(hi_y, dim, cell);
            for cx in cx0..=cx1 {
                for cy in cy0..=cy1 {
                    cells[cx * dim + cy].push(id as u32);
                }
            }
        }
        Self {
            cells,
            segs,
            dim,
            cell,
        }
    }

    fn coord(v: f64, dim: usize, cell: f64) -> usize {
        (((v + 1.0) / cell).floor() as isize).clamp(0, dim as isize - 1) as usize
    }

    /// Minimum distance from `x` to any segment; may return early with an
    /// exact value once the ring bound exceeds `stop_above` (the caller's
    /// current maximum cannot be raised by a smaller value).
    fn min_distance(&self, x: [f64; 2], _stop_above: f64) -> f64 {
        if self.segs.is_empty() {
            return f64::INFINITY;
        }
        let cx = Self::coord(x[0], self.dim, self.cell) as isize;
        let cy = Self::coord(x[1], self.dim, self.cell) as isize;
        let mut best = f64::INFINITY;
        let max_ring = self.dim as isize;
        for ring in 0..=max_ring {
            // once every unscanned segment is provably farther, stop
            if best <= (ring - 1).max(0) as f64 * self.cell {
                break;
            }
            let lo_x = (cx - ring).max(0);
            let hi_x = (cx + ring).min(self.dim as isize - 1);
            let lo_y = (cy - ring).max(0);
            let hi_y = (cy + ring).min(self.dim as isize - 1);
            for gx in lo_x..=hi_x {
                for gy in lo_y..=hi_y {
                    if ring > 0
                        && (cx - gx).abs() != ring
                        && (cy - gy).abs() != ring
                    {
                        continue; // interior already scanned
                    }
                    for &id in &self.cells[gx as usize * self.dim + gy as usize] {
                        let (a, b) = self.segs[id as usize];
                        best = best.min(point_segment_distance(x, a, b));
                    }
                }
            }
        }
        best
    }
}

/// How chord endpoints are read off a sampled excursion path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExcursionMode {
    /// Pair `s` with the first `u > s` where the path drops to or below the
    /// left limit at `s` (cadlag paths with jumps).
    Cadlag,
    /// Pair `s` with the first `u > s` where the path returns to or below
    /// its value at `s` (continuous paths).
    Continuous,
}

/// Extracts the chord system of an excursion-shaped path sampled on a grid.
pub fn lam_of_excursion(p: &SampledPath, mode: ExcursionMode) -> Lamination {
    let v = p.values();
    let g = p.grid();
    let m = v.len();
    let mut chords = Vec::new();
    for i in 1..m - 1 {
        let level = match mode {
            ExcursionMode::Cadlag => v[i - 1],
            ExcursionMode::Continuous => v[i],
        };
        if matches!(mode, ExcursionMode::Cadlag) && v[i] <= level {
            continue; // no jump up at i, nothing opens here
        }
        if let Some(j) = (i + 1..m).find(|&j| v[j] <= level) {
            chords.push(Chord::new(g[i], g[j]));
        }
    }
    Lamination::new(0, chords)
}

/// Chords of the integer excursion walk of a conditioned tree, mapped to
/// the circle by `index / m`.
pub fn lam_of_walk(bbar: &[i64]) -> Result<Lamination> {
    let m = bbar.len();
    let pairs = chords_from_discrete_path(bbar)?;
    Ok(Lamination::new(
        m,
        pairs
            .into_iter()
            .map(|(i, j)| Chord::from_indices(m, i, j))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncp::tests::reference_partition_12;
    use crate::perm::tests::reference_factorization_12;

    fn chord_set(l: &Lamination) -> Vec<(usize, usize)> {
        l.chords()
            .iter()
            .map(|c| {
                let a = (c.s * l.n as f64).round() as usize;
                let b = (c.t * l.n as f64).round() as usize;
                (a, b)
            })
            .collect()
    }

    #[test]
    fn partition_picture_examples() {
        // singletons: empty
        let singles = NonCrossingPartition::from_blocks(4, (1..=4).map(|i| vec![i]).collect())
            .unwrap();
        assert!(lam_of_partition(&singles).is_empty());

        // a 2-block produces one chord, not two coincident ones
        let p = NonCrossingPartition::from_blocks(3, vec![vec![1, 2], vec![3]]).unwrap();
        let l = lam_of_partition(&p);
        assert_eq!(l.len(), 1);

        // reference picture: triangle on {1,3,5}, quadrilateral on
        // {6,7,11,12}, single edge {9,10}; label 12 sits at angle 0
        let l = lam_of_partition(&reference_partition_12());
        let got: std::collections::BTreeSet<(usize, usize)> = chord_set(&l).into_iter().collect();
        let expect: std::collections::BTreeSet<(usize, usize)> = [
            (1, 3),
            (3, 5),
            (1, 5),
            (6, 7),
            (7, 11),
            (0, 11),
            (0, 6),
            (9, 10),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, expect);
        assert!(l.is_noncrossing());
        // the (6,12) quadrilateral edge spans half the circle
        assert!((l.longest_chord() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn forest_picture() {
        let f = reference_factorization_12();
        let l = lam_of_forest(12, &f.factors()[..6]).unwrap();
        assert_eq!(l.len(), 6);
        assert!(l.is_noncrossing());
        assert!(lam_of_forest(4, &[]).unwrap().is_empty());
        let crossing = [
            Transposition::new(1, 3).unwrap(),
            Transposition::new(2, 4).unwrap(),
        ];
        assert!(matches!(
            lam_of_forest(4, &crossing),
            Err(Error::Crossing { .. })
        ));
    }

    #[test]
    fn touched_indices_match_between_pictures() {
        let f = reference_factorization_12();
        let forest = lam_of_forest(12, &f.factors()[..6]).unwrap();
        let partition = lam_of_partition(&reference_partition_12());
        assert_eq!(forest.touched_indices(), partition.touched_indices());
        let expect: BTreeSet<usize> = [1, 3, 5, 6, 7, 9, 10, 11, 12].into_iter().collect();
        assert_eq!(forest.touched_indices(), expect);
    }

    #[test]
    fn longest_chord_cases() {
        assert_eq!(Lamination::new(0, vec![]).longest_chord(), 0.0);
        let diameter = Lamination::new(2, vec![Chord::new(0.0, 0.5)]);
        assert!((diameter.longest_chord() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hausdorff_cases() {
        let f = reference_factorization_12();
        let forest = lam_of_forest(12, &f.factors()[..6]).unwrap();
        let partition = lam_of_partition(&reference_partition_12());
        assert_eq!(hausdorff(&forest, &forest, HausdorffOpts::default()), 0.0);

        // horizontal diameter vs the parallel chord through angles 1/8, 3/8:
        // distance sqrt(2 - sqrt 2) from the diameter endpoints
        let a = Lamination::new(0, vec![Chord::new(0.0, 0.5)]);
        let b = Lamination::new(0, vec![Chord::new(0.125, 0.375)]);
        let opts = HausdorffOpts {
            delta: 5e-4,
            include_circle: false,
        };
        let d = hausdorff(&a, &b, opts);
        let expect = (2.0f64 - std::f64::consts::SQRT_2).sqrt();
        assert!((d - expect).abs() < 1e-3, "d = {d}, expect {expect}");

        // the reference pictures are within the triangle-splitting bound
        let d = hausdorff(&forest, &partition, HausdorffOpts::default());
        assert!((d - 0.3366).abs() < 5e-3, "d = {d}");
    }

    #[test]
    fn excursion_chords() {
        // constant zero path: circle only
        let grid: Vec<f64> = (0..=3).map(|i| i as f64 / 3.0).collect();
        let zero = SampledPath::new(grid, vec![0.0; 4]).unwrap();
        assert!(lam_of_excursion(&zero, ExcursionMode::Cadlag).is_empty());

        let l = lam_of_walk(&[1, 0, -1]).unwrap();
        assert_eq!(l.len(), 2);
        assert!(l.is_noncrossing());
    }
}
