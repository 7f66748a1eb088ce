//! Permutations of `[n] = {1,..,n}`, transpositions, left-to-right products
//! and minimal factorizations of the cycle `(1,2,...,n)`.
//!
//! Products follow the left-to-right convention throughout: in `sigma * tau`
//! we apply `sigma` first and then `tau`.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ncp::SetPartition;
use crate::Result;

/// A permutation of `[n]`, stored as a dense 1-indexed image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    /// `image[i-1]` is the image of `i`; always a bijection of `[n]`.
    image: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its image array (`image[i-1] = sigma(i)`).
    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n + 1];
        for &v in &image {
            if v == 0 || v > n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
            if seen[v] {
                return Err(Error::NotAPartition {
                    n,
                    reason: format!("value {v} repeated in image array"),
                });
            }
            seen[v] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (1..=n).collect(),
        }
    }

    /// The cycle `(1,2,...,n)` mapping `i` to `i+1` and `n` to `1`.
    pub fn n_cycle(n: usize) -> Self {
        Self {
            image: (1..=n).map(|i| i % n + 1).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.image.len()];
        for (i, &v) in self.image.iter().enumerate() {
            image[v - 1] = i + 1;
        }
        Self { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// Cycles of the permutation, each rotated to start at its minimum and
    /// listed in increasing order of minima.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut visited = vec![false; n + 1];
        let mut out = Vec::new();
        for start in 1..=n {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !visited[x] {
                visited[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// The partition of `[n]` into orbits, blocks sorted by minimum.
    pub fn cycle_partition(&self) -> SetPartition {
        let blocks = self
            .cycles()
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        SetPartition::from_sorted_blocks(self.n(), blocks)
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }
}

/// Left-to-right product: apply `sigma` first, then `tau`.
pub fn compose_ltr(sigma: &Permutation, tau: &Permutation) -> Result<Permutation> {
    if sigma.n() != tau.n() {
        return Err(Error::SizeMismatch {
            left: sigma.n(),
            right: tau.n(),
        });
    }
    let image = (1..=sigma.n()).map(|x| tau.apply(sigma.apply(x))).collect();
    Ok(Permutation { image })
}

/// A transposition `(a b)`, stored normalized with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(usize, usize)", into = "(usize, usize)")]
pub struct Transposition {
    a: usize,
    b: usize,
}

impl Transposition {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::DegenerateTransposition);
        }
        Ok(Self {
            a: a.min(b),
            b: a.max(b),
        })
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn apply(&self, x: usize) -> usize {
        if x == self.a {
            self.b
        } else if x == self.b {
            self.a
        } else {
            x
        }
    }

    pub fn as_permutation(&self, n: usize) -> Result<Permutation> {
        if self.b > n {
            return Err(Error::IndexOutOfRange { index: self.b, n });
        }
        let mut p = Permutation::identity(n);
        p.image[self.a - 1] = self.b;
        p.image[self.b - 1] = self.a;
        Ok(p)
    }
}

impl TryFrom<(usize, usize)> for Transposition {
    type Error = Error;
    fn try_from(v: (usize, usize)) -> Result<Self> {
        Transposition::new(v.0, v.1)
    }
}

impl From<Transposition> for (usize, usize) {
    fn from(t: Transposition) -> Self {
        (t.a, t.b)
    }
}

/// Left-to-right product of a transposition sequence on `[n]`.
pub fn product_of(n: usize, factors: &[Transposition]) -> Result<Permutation> {
    // appending tau maps the current image through tau; tracking value
    // positions makes that a constant-time swap
    let mut image: Vec<usize> = (1..=n).collect();
    let mut pos: Vec<usize> = (0..n).collect();
    for t in factors {
        if t.b > n {
            return Err(Error::IndexOutOfRange { index: t.b, n });
        }
        let (pa, pb) = (pos[t.a - 1], pos[t.b - 1]);
        image.swap(pa, pb);
        pos.swap(t.a - 1, t.b - 1);
    }
    Ok(Permutation { image })
}

/// True iff `factors` has length `n-1` and multiplies (left to right) to the
/// `n`-cycle.
pub fn is_minimal_factorization(n: usize, factors: &[Transposition]) -> Result<bool> {
    if factors.len() != n.saturating_sub(1) {
        return Ok(false);
    }
    Ok(product_of(n, factors)? == Permutation::n_cycle(n))
}

/// An ordered sequence of `n-1` transpositions multiplying to the `n`-cycle.
///
/// `n = 1` admits the unique empty factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FactorizationRepr", into = "FactorizationRepr")]
pub struct Factorization {
    n: usize,
    factors: Vec<Transposition>,
}

#[derive(Serialize, Deserialize)]
struct FactorizationRepr {
    n: usize,
    factors: Vec<(usize, usize)>,
}

impl TryFrom<FactorizationRepr> for Factorization {
    type Error = Error;
    fn try_from(r: FactorizationRepr) -> Result<Self> {
        let factors = r
            .factors
            .into_iter()
            .map(|(a, b)| Transposition::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Factorization::new(r.n, factors)
    }
}

impl From<Factorization> for FactorizationRepr {
    fn from(f: Factorization) -> Self {
        FactorizationRepr {
            n: f.n,
            factors: f.factors.into_iter().map(Into::into).collect(),
        }
    }
}

impl Factorization {
    /// Validates the minimality condition on construction.
    pub fn new(n: usize, factors: Vec<Transposition>) -> Result<Self> {
        if !is_minimal_factorization(n, &factors)? {
            return Err(Error::NotMinimal { n });
        }
        Ok(Self { n, factors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[Transposition] {
        &self.factors
    }

    /// Left-to-right product of the first `k` factors; `k = 0` yields the
    /// identity, `k = n-1` the full cycle. The result has exactly `n-k`
    /// cycles.
    pub fn partial_product(&self, k: usize) -> Result<Permutation> {
        if k + 1 > self.n {
            return Err(Error::IndexOutOfRange {
                index: k,
                n: self.n,
            });
        }
        product_of(self.n, &self.factors[..k])
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn t(a: usize, b: usize) -> Transposition {
        Transposition::new(a, b).unwrap()
    }

    /// The size-12 reference factorization used across the test-suite.
    pub(crate) fn reference_factorization_12() -> Factorization {
        let pairs = [
            (1, 3),
            (6, 12),
            (1, 5),
            (7, 12),
            (9, 10),
            (11, 12),
            (2, 3),
            (4, 5),
            (1, 6),
            (8, 11),
            (9, 11),
        ];
        let factors = pairs.iter().map(|&(a, b)| t(a, b)).collect();
        Factorization::new(12, factors).unwrap()
    }

    #[test]
    fn compose_identity() {
        let sigma = Permutation::from_image(vec![2, 3, 1, 4]).unwrap();
        let id = Permutation::identity(4);
        assert_eq!(compose_ltr(&id, &sigma).unwrap(), sigma);
        assert_eq!(compose_ltr(&sigma, &id).unwrap(), sigma);
    }

    #[test]
    fn compose_left_to_right_convention() {
        // (1,2) then (1,3) gives the 3-cycle (1,2,3)
        let s = t(1, 2).as_permutation(3).unwrap();
        let u = t(1, 3).as_permutation(3).unwrap();
        let prod = compose_ltr(&s, &u).unwrap();
        assert_eq!(prod, Permutation::n_cycle(3));
    }

    #[test]
    fn compose_size_mismatch() {
        let a = Permutation::identity(3);
        let b = Permutation::identity(4);
        assert!(matches!(
            compose_ltr(&a, &b),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn reference_partial_product_cycles() {
        let f = reference_factorization_12();
        let p6 = f.partial_product(6).unwrap();
        assert_eq!(
            p6.cycles(),
            vec![
                vec![1, 3, 5],
                vec![2],
                vec![4],
                vec![6, 7, 11, 12],
                vec![8],
                vec![9, 10],
            ]
        );
        // k = 0 is the identity, k = n-1 the full cycle
        assert!(f.partial_product(0).unwrap().is_identity());
        assert_eq!(f.partial_product(11).unwrap(), Permutation::n_cycle(12));
        // cycle counts drop by one per factor
        for k in 0..=11 {
            assert_eq!(f.partial_product(k).unwrap().cycle_count(), 12 - k);
        }
    }

    #[test]
    fn cycle_partition_basics() {
        assert_eq!(
            Permutation::identity(4).cycle_partition().blocks(),
            &[vec![1], vec![2], vec![3], vec![4]]
        );
        assert_eq!(
            Permutation::n_cycle(3).cycle_partition().blocks(),
            &[vec![1, 2, 3]]
        );
        let f = reference_factorization_12();
        let part = f.partial_product(6).unwrap().cycle_partition();
        assert_eq!(
            part.blocks(),
            &[
                vec![1, 3, 5],
                vec![2],
                vec![4],
                vec![6, 7, 11, 12],
                vec![8],
                vec![9, 10],
            ]
        );
    }

    #[test]
    fn minimality_checks() {
        let f = reference_factorization_12();
        assert!(is_minimal_factorization(12, f.factors()).unwrap());
        assert!(is_minimal_factorization(2, &[t(1, 2)]).unwrap());
        // product of (1,3)(1,2) is (1,3,2), not the 3-cycle
        assert!(!is_minimal_factorization(3, &[t(1, 3), t(1, 2)]).unwrap());
        // out-of-range endpoints are an error, not `false`
        assert!(is_minimal_factorization(3, &[t(1, 4), t(1, 2)]).is_err());
        // n = 1 admits the empty factorization
        assert!(is_minimal_factorization(1, &[]).unwrap());
        assert!(Factorization::new(1, vec![]).is_ok());
    }

    #[test]
    fn partial_product_steps_compose() {
        let f = reference_factorization_12();
        for k in 0..11 {
            let step = f.factors()[k].as_permutation(12).unwrap();
            let lhs = f.partial_product(k + 1).unwrap();
            let rhs = compose_ltr(&f.partial_product(k).unwrap(), &step).unwrap();
            assert_eq!(lhs, rhs);
        }
        assert!(f.partial_product(12).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let f = reference_factorization_12();
        let js = serde_json::to_string(&f).unwrap();
        assert!(js.contains("\"factors\":[[1,3],"));
        let back: Factorization = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f);
        // a non-factorization is rejected at parse time
        let bad = r#"{"n":3,"factors":[[1,3],[1,2]]}"#;
        assert!(serde_json::from_str::<Factorization>(bad).is_err());
    }
}
