//! The spectrally positive Levy process with inverse-Gaussian ladder: exact
//! increments, densities, bridge and excursion construction, a discrete
//! Brownian excursion, and chord extraction from excursion-shaped walks.
//!
//! The process `X` has Laplace exponent
//! `Phi(lambda) = -c^2 (1 - sqrt(1 + 2 lambda / c)) - lambda c`, so
//! `Y_t = X_t + c t` is the inverse-Gaussian subordinator with
//! `Y_dt ~ IG(mean = c dt, shape = c^3 dt^2)` and `X_t` has the shifted
//! density `d_t`.

use crate::error::Error;
use crate::rng::RngStream;
use crate::Result;

/// A cadlag path sampled on a grid over `[0, 1]` (step interpolation
/// between grid points).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl SampledPath {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(Error::Domain(
                "grid and values must match, length >= 2".into(),
            ));
        }
        if grid[0] != 0.0 || (grid[grid.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("grid must span [0, 1]".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("path values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Step evaluation: value at the last grid point `<= t`.
    pub fn value_at(&self, t: f64) -> f64 {
        match self.grid.binary_search_by(|g| g.partial_cmp(&t).unwrap()) {
            Ok(i) => self.values[i],
            Err(0) => self.values[0],
            Err(i) => self.values[i - 1],
        }
    }
}

/// One increment of the subordinator `Y = X + ct` over `dt`: inverse
/// Gaussian with mean `c dt` and shape `c^3 dt^2`, sampled by the
/// transform-with-rejection method (one normal, one uniform).
pub fn ig_increment(dt: f64, c: f64, rng: &mut RngStream) -> Result<f64> {
    if !(dt > 0.0) || !(c > 0.0) {
        return Err(Error::Domain(format!(
            "need dt > 0 and c > 0, got {dt}, {c}"
        )));
    }
    let mu = c * dt;
    let lambda = c.powi(3) * dt * dt;
    let v = rng.standard_normal();
    let y = mu * v * v;
    let x = mu + mu / (2.0 * lambda) * (y - (4.0 * lambda * y + y * y).sqrt());
    let u = rng.uniform();
    Ok(if u <= mu / (mu + x) { x } else { mu * mu / x })
}

/// Density of `X_t`:
/// `sqrt(c^3 t^2 / (2 pi (x + ct)^3)) exp(-c x^2 / (2 (x + ct)))` for
/// `x >= -ct`, zero below.
pub fn density_d(t: f64, x: f64, c: f64) -> f64 {
    if x <= -c * t {
        return 0.0;
    }
    let y = x + c * t;
    (c.powi(3) * t * t / (2.0 * std::f64::consts::PI * y.powi(3))).sqrt()
        * (-c * x * x / (2.0 * y)).exp()
}

/// Density of the subordinator marginal:
/// `sqrt(u^2 c^3 / (2 pi x^3)) exp(-c (x - uc)^2 / (2x))` for `x > 0`.
pub fn density_q(u: f64, x: f64, c: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (u * u * c.powi(3) / (2.0 * std::f64::consts::PI * x.powi(3))).sqrt()
        * (-c * (x - u * c) * (x - u * c) / (2.0 * x)).exp()
}

/// `sup_x d_t(x)`, from the stationary point of the log-density.
pub fn density_d_sup(t: f64, c: f64) -> f64 {
    // with y = x + ct: y^2 + (3/c) y - c^2 t^2 = 0
    let y = 0.5 * (-3.0 / c + (9.0 / (c * c) + 4.0 * c * c * t * t).sqrt());
    density_d(t, y - c * t, c)
}

/// How a bridge path is generated.
#[derive(Debug, Clone, Copy)]
pub enum BridgeMode {
    /// Scaled walk of a conditioned tree code: exact in law for its own `n`.
    Discrete { n: usize, k: usize },
    /// Free increments accepted by a density-ratio rejection at the final
    /// grid point; approximate at finite grid resolution.
    Rejection { max_attempts: usize },
}

/// Samples an approximate bridge of `X` from 0 to 0 on a uniform grid of
/// `m` points.
pub fn levy_bridge(m: usize, c: f64, mode: BridgeMode, rng: &mut RngStream) -> Result<SampledPath> {
    if m < 3 {
        return Err(Error::Domain("need at least 3 grid points".into()));
    }
    let grid: Vec<f64> = (0..m).map(|j| j as f64 / (m - 1) as f64).collect();
    match mode {
        BridgeMode::Discrete { n, k } => {
            let walk = crate::sample::sample_conditioned_bridge_walk(n, k, rng)?;
            let len = walk.len();
            let values: Vec<f64> = grid
                .iter()
                .map(|&u| {
                    let idx = (u * len as f64).floor() as usize;
                    if idx == 0 {
                        0.0
                    } else {
                        c * walk[idx.min(len) - 1] as f64 / n as f64
                    }
                })
                .collect();
            SampledPath::new(grid, values)
        }
        BridgeMode::Rejection { max_attempts } => {
            let dt = 1.0 / (m - 1) as f64;
            let bound = density_d_sup(dt, c);
            for _ in 0..max_attempts {
                let mut values = Vec::with_capacity(m);
                values.push(0.0);
                let mut x = 0.0;
                for _ in 1..m - 1 {
                    x += ig_increment(dt, c, rng)? - c * dt;
                    values.push(x);
                }
                // bridge reweighting at the final step
                let w = density_d(dt, -x, c) / bound;
                if rng.uniform() < w {
                    values.push(0.0);
                    return SampledPath::new(grid, values);
                }
            }
            Err(Error::RejectionBudget {
                attempts: max_attempts,
            })
        }
    }
}

/// Vervaat transform of a bridge path: cyclic shift at the right-most
/// minimum, re-based to start at 0; the output is nonnegative.
pub fn vervaat_continuous(p: &SampledPath) -> Result<SampledPath> {
    let v = p.values();
    let m = v.len();
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if (v[m - 1] - v[0]).abs() > 1e-9 * scale.max(1.0) {
        return Err(Error::NotABridge {
            sum: (v[m - 1] - v[0]).round() as i64,
        });
    }
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    // right-most time where the path or its left limit attains the minimum
    let mut idx = 0;
    for j in 0..m {
        let left = if j == 0 { v[0] } else { v[j - 1] };
        if v[j] == min || left == min {
            idx = j;
        }
    }
    let mut values = Vec::with_capacity(m);
    for i in 0..m {
        values.push(v[(idx + i) % m] - min);
    }
    // an excursion returns to 0 at time 1
    values[m - 1] = 0.0;
    SampledPath::new(p.grid().to_vec(), values)
}

/// Simple-random-walk bridge of length `2n` (exactly `n` up and `n` down
/// steps), Vervaat-shifted to an excursion and scaled by `1/sqrt(2n)`.
pub fn brownian_excursion_discrete(n: usize, rng: &mut RngStream) -> Result<SampledPath> {
    if n < 2 {
        return Err(Error::Domain("need n >= 2".into()));
    }
    let len = 2 * n;
    let mut steps = vec![-1i64; len];
    for i in rng.subset(len, n) {
        steps[i] = 1;
    }
    let mut walk = Vec::with_capacity(len + 1);
    let mut s = 0i64;
    walk.push(0);
    for &st in &steps {
        s += st;
        walk.push(s);
    }
    debug_assert_eq!(s, 0);
    let mut idx = 0usize;
    let mut best = i64::MAX;
    for (j, &v) in walk.iter().enumerate() {
        if v < best {
            best = v;
            idx = j;
        }
    }
    let scale = 1.0 / (len as f64).sqrt();
    let grid: Vec<f64> = (0..=len).map(|j| j as f64 / len as f64).collect();
    let values: Vec<f64> = (0..=len)
        .map(|j| {
            let w = if idx + j <= len {
                walk[idx + j]
            } else {
                walk[idx + j - len]
            };
            (w - best) as f64 * scale
        })
        .collect();
    SampledPath::new(grid, values)
}

/// For each position `i` of an excursion-shaped integer walk (nonnegative
/// before ending at `-1`), the first later position where the walk drops
/// strictly below its value at `i`. These pairs index the discrete chords
/// of the lamination.
pub fn chords_from_discrete_path(bbar: &[i64]) -> Result<Vec<(usize, usize)>> {
    let m = bbar.len();
    if m == 0 || bbar[m - 1] != -1 {
        return Err(Error::NotAnExcursion("walk must end at -1".into()));
    }
    if bbar[..m - 1].iter().any(|&v| v < 0) {
        return Err(Error::NotAnExcursion(
            "walk must stay nonnegative before the end".into(),
        ));
    }
    // down-steps are unit, so the first drop below level v hits v - 1
    // exactly; a monotone stack matches every position in one pass
    let mut out = Vec::with_capacity(m.saturating_sub(1));
    let mut stack: Vec<usize> = Vec::new();
    for k in 1..=m {
        let v = bbar[k - 1];
        while let Some(&i) = stack.last() {
            if bbar[i - 1] == v + 1 {
                stack.pop();
                out.push((i, k));
            } else {
                break;
            }
        }
        if k < m {
            stack.push(k);
        }
    }
    debug_assert!(stack.is_empty());
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ig_increment_mean_and_positivity() {
        let mut rng = RngStream::new(2);
        let (dt, c) = (0.01, 5.0);
        let n = 200_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = ig_increment(dt, c, &mut rng).unwrap();
            assert!(x >= 0.0);
            sum += x;
        }
        let mean = sum / n as f64;
        assert!((mean - c * dt).abs() < 0.01 * c * dt, "mean = {mean}");
        assert!(ig_increment(0.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn ig_marginal_matches_density() {
        // KS distance between 10^5 draws of Y_1 and the closed-form density
        let mut rng = RngStream::new(4);
        let c = 2.0;
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n)
            .map(|_| ig_increment(1.0, c, &mut rng).unwrap())
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cdf = crate::verify::NumericCdf::new(|x| density_q(1.0, x, c), 0.0, 60.0, 200_000);
        let mut ks: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = cdf.eval(x);
            ks = ks.max((f - i as f64 / n as f64).abs());
            ks = ks.max((f - (i + 1) as f64 / n as f64).abs());
        }
        assert!(ks < 0.01, "ks = {ks}");
    }

    #[test]
    fn density_values() {
        let c = 1.0;
        assert!((density_d(1.0, 0.0, c) - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert_eq!(density_d(1.0, -2.0, c), 0.0);
        assert!((density_q(1.0, c, c) - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert_eq!(density_q(1.0, 0.0, c), 0.0);
        assert_eq!(density_q(1.0, -1.0, c), 0.0);
        for &(t, cc) in &[(1.0, 1.0), (0.25, 5.0), (0.5, 0.3)] {
            let sup = density_d_sup(t, cc);
            for i in 0..4000 {
                let x = -cc * t + i as f64 * 0.01;
                assert!(density_d(t, x, cc) <= sup * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn density_shift_identity() {
        // q_{1-u}(x + c(1-u)) = d_{1-u}(x)
        let c = 3.0;
        for u in [0.1, 0.5, 0.9] {
            for i in 0..200 {
                let x = -c * (1.0 - u) + i as f64 * 0.05;
                let lhs = density_q(1.0 - u, x + c * (1.0 - u), c);
                let rhs = density_d(1.0 - u, x, c);
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
            }
        }
    }

    #[test]
    fn bridge_discrete_mode_is_scaled_walk() {
        let mut rng = RngStream::new(9);
        let (n, k) = (400, 20);
        let p = levy_bridge(101, 1.0, BridgeMode::Discrete { n, k }, &mut rng).unwrap();
        assert_eq!(p.len(), 101);
        assert_eq!(p.values()[0], 0.0);
        // endpoint of the conditioned walk is -1, scaled by c/n
        let end = p.values()[100];
        assert!((end + 1.0 / n as f64).abs() < 1e-12, "end = {end}");
    }

    #[test]
    fn bridge_rejection_mode_ends_at_zero() {
        let mut rng = RngStream::new(10);
        let p = levy_bridge(
            51,
            5.0,
            BridgeMode::Rejection {
                max_attempts: 10_000,
            },
            &mut rng,
        )
        .unwrap();
        assert_eq!(p.values()[0], 0.0);
        assert_eq!(p.values()[50], 0.0);
    }

    #[test]
    fn vervaat_basics() {
        let grid: Vec<f64> = (0..=4).map(|i| i as f64 / 4.0).collect();
        let zero = SampledPath::new(grid.clone(), vec![0.0; 5]).unwrap();
        let v = vervaat_continuous(&zero).unwrap();
        assert_eq!(v.values(), &[0.0; 5]);

        // single dip: the shift lands on the minimum
        let p = SampledPath::new(grid.clone(), vec![0.0, 1.0, -1.0, 0.5, 0.0]).unwrap();
        let v = vervaat_continuous(&p).unwrap();
        assert_eq!(v.values()[0], 0.0);
        assert!(v.values().iter().all(|&x| x >= 0.0));
        assert_eq!(
            v.values().iter().cloned().fold(f64::INFINITY, f64::min),
            0.0
        );

        let bad = SampledPath::new(grid, vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(vervaat_continuous(&bad).is_err());
    }

    #[test]
    fn brownian_excursion_shape() {
        let mut rng = RngStream::new(21);
        let e = brownian_excursion_discrete(200, &mut rng).unwrap();
        assert_eq!(e.values()[0], 0.0);
        assert_eq!(*e.values().last().unwrap(), 0.0);
        assert!(e.values().iter().all(|&x| x >= 0.0));
        assert!(brownian_excursion_discrete(1, &mut rng).is_err());
    }

    #[test]
    fn chord_extraction_examples() {
        assert!(chords_from_discrete_path(&[-1]).unwrap().is_empty());
        assert_eq!(
            chords_from_discrete_path(&[1, 0, -1]).unwrap(),
            vec![(1, 2), (2, 3)]
        );
        assert!(chords_from_discrete_path(&[1, -2, -1]).is_err());
        assert!(chords_from_discrete_path(&[0, 0]).is_err());
        // two positions at the same level close at the same drop
        assert_eq!(
            chords_from_discrete_path(&[1, 1, 0, -1]).unwrap(),
            vec![(1, 3), (2, 3), (3, 4)]
        );
    }
}
