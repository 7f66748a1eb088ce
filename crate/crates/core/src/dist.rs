//! The offspring-law family `mu(i) = a * b^i * (i+1)^{i-1} / i!`, the power
//! series behind it, mean-matching parameter solves, random-walk pmfs and
//! the Borel law.
//!
//! Writing `F(z) = sum_k (k+1)^{k-1}/k! z^k` (radius of convergence `1/e`),
//! the law is normalized by `a = 1/F(b)` and its mean is
//! `G(b) = b F'(b)/F(b)`. `F` is tied to the tree function `T(z)` solving
//! `T = z e^T`: `F = e^T` and `G = T/(1-T)`, which gives machine-precision
//! evaluations arbitrarily close to the singularity where the raw series is
//! useless.

use statrs::function::gamma::ln_gamma;

use crate::error::Error;
use crate::Result;

pub const INV_E: f64 = 1.0 / std::f64::consts::E;

/// Terms cap for the direct series evaluation.
const SERIES_CAP: usize = 2_000_000;
/// Relative tail target for the certified series evaluation.
const SERIES_TAIL: f64 = 1e-14;

/// Solves `T = z e^T` on `[0, 1)` for `z` in `[0, 1/e)`.
///
/// Safeguarded Newton on `T e^{-T} - z`, which is increasing in `T` on the
/// bracket.
pub fn tree_value(z: f64) -> Result<f64> {
    if !(0.0..INV_E).contains(&z) {
        return Err(Error::Domain(format!("z = {z} outside [0, 1/e)")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut t = z; // T ~ z near 0
    for _ in 0..200 {
        let f = t * (-t).exp() - z;
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let df = (-t).exp() * (1.0 - t);
        let mut next = if df > 0.0 { t - f / df } else { 0.5 * (lo + hi) };
        if !(lo..=hi).contains(&next) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 1e-16 * t.max(1e-300) {
            return Ok(next);
        }
        t = next;
    }
    Ok(t)
}

/// Value of `F` and its first two derivatives at `z`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesEval {
    pub z: f64,
    pub f: f64,
    pub f_prime: f64,
    pub f_second: f64,
    /// Certified relative truncation bound (machine epsilon when the
    /// fixed-point route was used).
    pub tail_bound: f64,
    /// Number of series terms summed; 0 for the fixed-point route.
    pub terms: usize,
    /// Value of the tree function `T(z)`, for diagnostics.
    pub tree_value: f64,
}

/// Evaluates `F`, `F'`, `F''` by direct summation with adaptive truncation,
/// falling back to the `T = z e^T` fixed-point route when the series cannot
/// certify its tail near the singularity.
pub fn eval_f(z: f64) -> Result<SeriesEval> {
    if !(0.0..INV_E).contains(&z) {
        return Err(Error::Domain(format!("z = {z} outside [0, 1/e)")));
    }
    let t = tree_value(z)?;
    if z == 0.0 {
        return Ok(SeriesEval {
            z,
            f: 1.0,
            f_prime: 1.0,
            f_second: 3.0,
            tail_bound: 0.0,
            terms: 1,
            tree_value: 0.0,
        });
    }
    if let Some((f, df, ddf, tail, terms)) = series_f(z) {
        return Ok(SeriesEval {
            z,
            f,
            f_prime: df,
            f_second: ddf,
            tail_bound: tail,
            terms,
            tree_value: t,
        });
    }
    let (f, df, ddf) = derivatives_from_tree(z, t);
    Ok(SeriesEval {
        z,
        f,
        f_prime: df,
        f_second: ddf,
        tail_bound: f64::EPSILON,
        terms: 0,
        tree_value: t,
    })
}

/// `F`, `F'`, `F''` from `F = e^T`, `T' = T/(z(1-T))`,
/// `T'' = T^2 (2-T) / (z^2 (1-T)^3)`.
pub fn derivatives_from_tree(z: f64, t: f64) -> (f64, f64, f64) {
    let f = t.exp();
    let tp = t / (z * (1.0 - t));
    let tpp = t * t * (2.0 - t) / (z * z * (1.0 - t).powi(3));
    (f, f * tp, f * (tpp + tp * tp))
}

/// Direct summation; `None` when the tail cannot be certified below
/// [`SERIES_TAIL`] within [`SERIES_CAP`] terms.
fn series_f(z: f64) -> Option<(f64, f64, f64, f64, usize)> {
    let mut term = 1.0f64; // (k+1)^{k-1}/k! z^k at k = 0
    let mut f = 0.0f64;
    let mut df = 0.0f64;
    let mut ddf = 0.0f64;
    for k in 0..SERIES_CAP {
        let kf = k as f64;
        f += term;
        df += kf * term / z;
        ddf += kf * (kf - 1.0) * term / (z * z);
        // ratio of consecutive terms: z ((k+2)/(k+1))^k <= z e
        let ratio = z * ((kf + 2.0) / (kf + 1.0)).powf(kf);
        let next = term * ratio;
        // certify all three series with the worst-case derivative weight
        let rbound = (z * std::f64::consts::E).min(1.0 - 1e-12);
        if k >= 4 {
            let weight = ((kf + 1.0) * (kf + 2.0)) / (z * z).max(f64::MIN_POSITIVE);
            let tail = next * weight / (1.0 - rbound);
            if tail <= SERIES_TAIL * f {
                return Some((f, df, ddf, tail / f, k + 1));
            }
        }
        term = next;
    }
    None
}

/// Mean of the law with tilt `z`: `G(z) = z F'(z)/F(z) = T/(1-T)`.
pub fn mean_of_tilt(z: f64) -> Result<f64> {
    let t = tree_value(z)?;
    Ok(t / (1.0 - t))
}

/// Normalized offspring law `a b^i (i+1)^{i-1}/i!` with mean `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffspringParams {
    /// Normalizer `1/F(b)`.
    pub a: f64,
    /// Tilt in `(0, 1/e)`.
    pub b: f64,
    /// Target mean.
    pub mean: f64,
    /// Variance `b^2 F''(b)/F(b) + m - m^2`.
    pub variance: f64,
    ln_a: f64,
    ln_b: f64,
}

/// Solves `G(b) = m` for the tilt by bisection on `(0, 1/e)` and normalizes.
pub fn solve_params(m: f64) -> Result<OffspringParams> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("target mean {m} must be positive")));
    }
    let (mut lo, mut hi) = (1e-15f64, INV_E - 1e-15);
    if mean_of_tilt(lo)? > m || mean_of_tilt(hi)? < m {
        return Err(Error::Domain(format!(
            "target mean {m} not bracketed on (0, 1/e)"
        )));
    }
    let mut mid;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        if mean_of_tilt(mid)? < m {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid {
            break;
        }
    }
    let b = 0.5 * (lo + hi);
    let residual = (mean_of_tilt(b)? - m).abs();
    if residual > 1e-8 * m.max(1.0) {
        return Err(Error::NoConvergence {
            residual,
            iterations: 200,
        });
    }
    let t = tree_value(b)?;
    let (f, _, ddf) = derivatives_from_tree(b, t);
    let a = 1.0 / f;
    let variance = b * b * ddf / f + m - m * m;
    Ok(OffspringParams {
        a,
        b,
        mean: m,
        variance,
        ln_a: a.ln(),
        ln_b: b.ln(),
    })
}

impl OffspringParams {
    pub fn ln_a(&self) -> f64 {
        self.ln_a
    }

    pub fn ln_b(&self) -> f64 {
        self.ln_b
    }
}

/// `ln mu(i)`, computed with the log-gamma primitive to avoid overflow.
pub fn ln_pmf_mu(i: u64, p: &OffspringParams) -> f64 {
    let x = i as f64;
    p.ln_a + x * p.ln_b + (x - 1.0) * (x + 1.0).ln() - ln_gamma(x + 1.0)
}

/// `mu(i) = a b^i (i+1)^{i-1}/i!`.
pub fn pmf_mu(i: u64, p: &OffspringParams) -> f64 {
    ln_pmf_mu(i, p).exp()
}

/// Root-shifted law `mu~(i) = mu(i-1)` for `i >= 1`; zero at `i = 0`.
pub fn pmf_mu_tilde(i: u64, p: &OffspringParams) -> f64 {
    if i == 0 {
        0.0
    } else {
        pmf_mu(i - 1, p)
    }
}

/// `ln P(S_N = k)` for the `N`-fold convolution of `mu`, via the closed
/// form `a^N b^k N (N+k)^{k-1} / k!`.
///
/// The identity is not obvious; it is gated permanently by the convolution
/// oracle in the test-suite (and by the acceptance suite) before anything
/// downstream relies on it.
pub fn ln_walk_pmf(n_steps: u64, k: u64, p: &OffspringParams) -> f64 {
    if n_steps == 0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n_steps as f64;
    let kf = k as f64;
    nf * p.ln_a + kf * p.ln_b + nf.ln() + (kf - 1.0) * (nf + kf).ln() - ln_gamma(kf + 1.0)
}

/// `P(S_N = k)`; see [`ln_walk_pmf`].
pub fn walk_pmf(n_steps: u64, k: u64, p: &OffspringParams) -> f64 {
    ln_walk_pmf(n_steps, k, p).exp()
}

/// Borel law of parameter 1: `i^{i-2} e^{-i} / (i-1)!` for `i >= 1`.
pub fn borel_pmf(i: u64) -> Result<f64> {
    if i == 0 {
        return Err(Error::Domain("Borel law is supported on i >= 1".into()));
    }
    let x = i as f64;
    Ok(((x - 2.0) * x.ln() - ln_gamma(x) - x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_at_zero_and_small_values() {
        let e = eval_f(0.0).unwrap();
        assert_eq!(e.f, 1.0);
        assert_eq!(e.f_prime, 1.0);
        assert_eq!(e.f_second, 3.0);
        assert!(eval_f(-0.1).is_err());
        assert!(eval_f(INV_E).is_err());
    }

    #[test]
    fn f_near_singularity_approaches_e() {
        // F(1/e - z) = e - sqrt(2) e^{3/2} sqrt(z) + o(sqrt z)
        let e = eval_f(INV_E - 1e-8).unwrap();
        assert!((e.f - std::f64::consts::E).abs() < 1e-3, "F = {}", e.f);
    }

    #[test]
    fn series_and_fixed_point_agree() {
        for z in [0.05, 0.2, 0.3] {
            let ev = eval_f(z).unwrap();
            assert!(ev.terms > 0, "series route expected at z = {z}");
            let t = tree_value(z).unwrap();
            let (f, df, ddf) = derivatives_from_tree(z, t);
            assert!((ev.f - f).abs() <= 1e-12 * f);
            assert!((ev.f_prime - df).abs() <= 1e-11 * df);
            assert!((ev.f_second - ddf).abs() <= 1e-10 * ddf);
            assert!(ev.tail_bound <= 1e-14);
        }
    }

    #[test]
    fn tree_value_solves_fixed_point() {
        for z in [1e-12, 0.01, 0.2, INV_E - 1e-10] {
            let t = tree_value(z).unwrap();
            assert!((t * (-t).exp() - z).abs() <= 1e-15);
        }
    }

    #[test]
    fn solve_params_unit_mean() {
        // m = 1 forces T = 1/2, hence b = e^{-1/2}/2 and a = e^{-1/2}
        let p = solve_params(1.0).unwrap();
        assert!((p.b - 0.5 * (-0.5f64).exp()).abs() < 1e-12);
        assert!((p.a - (-0.5f64).exp()).abs() < 1e-12);
        // variance has the closed form m (1+m)^2
        assert!((p.variance - 4.0).abs() < 1e-9);
    }

    #[test]
    fn solve_params_small_mean() {
        let p = solve_params(1e-8).unwrap();
        assert!(p.b < 2e-8);
        assert!((p.a - 1.0).abs() < 1e-7);
    }

    #[test]
    fn solve_params_residuals() {
        for m in [0.01, 0.1, 1.0, 5.0, 50.0] {
            let p = solve_params(m).unwrap();
            let g = mean_of_tilt(p.b).unwrap();
            assert!(
                (g - m).abs() <= 1e-10 * m.max(1.0),
                "residual {} at m = {m}",
                (g - m).abs()
            );
            assert!((p.variance - m * (1.0 + m) * (1.0 + m)).abs() <= 1e-8 * p.variance);
        }
    }

    #[test]
    fn variance_matches_asymptotic_regime() {
        // m = (K+1)/(n-K) with K = floor(sqrt n), n = 10^6: variance ~ K/n
        let n = 1_000_000.0f64;
        let k = 1000.0f64;
        let p = solve_params((k + 1.0) / (n - k)).unwrap();
        let ratio = p.variance / (k / n);
        assert!((ratio - 1.0).abs() < 0.05, "ratio = {ratio}");
    }

    #[test]
    fn mean_is_strictly_increasing_in_tilt() {
        let mut prev = -1.0;
        for i in 1..200 {
            let z = INV_E * i as f64 / 200.0;
            let g = mean_of_tilt(z).unwrap();
            assert!(g > prev);
            prev = g;
        }
    }

    #[test]
    fn pmf_values_and_normalization() {
        let p = solve_params(1.0).unwrap();
        assert!((pmf_mu(0, &p) - p.a).abs() < 1e-15);
        assert!((pmf_mu(1, &p) - p.a * p.b).abs() < 1e-15);
        let total: f64 = (0..=200).map(|i| pmf_mu(i, &p)).sum();
        assert!((total - 1.0).abs() < 1e-10, "total = {total}");
        // mean check against the solve target
        let mean: f64 = (0..=400).map(|i| i as f64 * pmf_mu(i, &p)).sum();
        assert!((mean - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tilde_law_shifts_by_one() {
        let p = solve_params(0.7).unwrap();
        assert_eq!(pmf_mu_tilde(0, &p), 0.0);
        assert!((pmf_mu_tilde(1, &p) - p.a).abs() < 1e-15);
        assert!((pmf_mu_tilde(2, &p) - p.a * p.b).abs() < 1e-15);
        let total: f64 = (1..=200).map(|i| pmf_mu_tilde(i, &p)).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn walk_pmf_against_convolution() {
        // the permanent pre-use gate for the closed form
        for m in [0.4, 1.0, 2.5] {
            let p = solve_params(m).unwrap();
            let support = 160usize;
            let base: Vec<f64> = (0..support).map(|i| pmf_mu(i as u64, &p)).collect();
            let mut conv = base.clone();
            for n_steps in 1..=6u64 {
                if n_steps > 1 {
                    let mut next = vec![0.0; support];
                    for (i, &x) in conv.iter().enumerate() {
                        for (j, &y) in base.iter().enumerate().take(support - i) {
                            next[i + j] += x * y;
                        }
                    }
                    conv = next;
                }
                for k in 0..=10u64 {
                    let direct = conv[k as usize];
                    let closed = walk_pmf(n_steps, k, &p);
                    assert!(
                        (direct - closed).abs() <= 1e-10 * closed,
                        "m={m} N={n_steps} k={k}: {direct} vs {closed}"
                    );
                }
            }
        }
    }

    #[test]
    fn walk_pmf_edge_cases() {
        let p = solve_params(1.0).unwrap();
        assert_eq!(walk_pmf(0, 0, &p), 1.0);
        assert_eq!(walk_pmf(0, 3, &p), 0.0);
        for k in 0..6 {
            assert!((walk_pmf(1, k, &p) - pmf_mu(k, &p)).abs() < 1e-15);
        }
        // k = 0: all N summands are zero
        assert!((walk_pmf(5, 0, &p) - p.a.powi(5)).abs() < 1e-15);
        // N = 2, k = 2: convolution gives 4 a^2 b^2
        let expect = 4.0 * p.a * p.a * p.b * p.b;
        assert!((walk_pmf(2, 2, &p) - expect).abs() < 1e-14);
    }

    #[test]
    fn borel_values() {
        assert!((borel_pmf(1).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
        assert!((borel_pmf(2).unwrap() - (-2.0f64).exp()).abs() < 1e-12);
        assert!(borel_pmf(0).is_err());
        // heavy tail: the partial sum to 10^4 is still about 0.8% short of 1
        let partial: f64 = (1..=10_000).map(|i| borel_pmf(i).unwrap()).sum();
        assert!((partial - 0.992021).abs() < 1e-4, "partial = {partial}");
        let further: f64 = (1..=1_000_000).map(|i| borel_pmf(i).unwrap()).sum();
        assert!(further > partial && further < 1.0 + 1e-9);
    }
}
