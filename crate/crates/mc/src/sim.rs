use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub paths: usize,
    /// Steps over the whole window.
    pub steps: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl SimConfig {
    pub fn new(paths: usize, steps: usize, seed: u64) -> Self {
        SimConfig { paths, steps, seed, antithetic: true }
    }

    pub fn validate(&self) -> Result<(), McError> {
        if self.paths == 0 {
            return Err(McError::Config("paths must be >= 1".into()));
        }
        if self.steps == 0 {
            return Err(McError::Config("steps must be >= 1".into()));
        }
        if self.antithetic && self.paths % 2 == 1 {
            return Err(McError::Config(format!(
                "antithetic sampling needs an even path count, got {}",
                self.paths
            )));
        }
        Ok(())
    }

    /// Independent sampling units: antithetic pairs or single paths.
    fn units(&self) -> usize {
        if self.antithetic {
            self.paths / 2
        } else {
            self.paths
        }
    }
}

/// Sample mean with its standard error over independent sampling units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub paths: usize,
}

impl OracleEstimate {
    pub fn contains(&self, x: f64, n_se: f64) -> bool {
        (self.mean - x).abs() <= n_se * self.std_error
    }
}

#[derive(Default)]
pub(crate) struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub(crate) fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub(crate) fn mean(&self) -> f64 {
        self.mean
    }

    pub(crate) fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub(crate) fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Per-unit random sources. Unit `j` draws normals from ChaCha stream 2j and
/// uniforms from stream 2j+1, so results do not depend on execution order.
pub(crate) struct UnitRng {
    base: ChaCha8Rng,
}

impl UnitRng {
    pub(crate) fn new(seed: u64) -> Self {
        UnitRng { base: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn stream(&self, s: u64) -> ChaCha8Rng {
        let mut r = self.base.clone();
        r.set_stream(s);
        r.set_word_pos(0);
        r
    }

    pub(crate) fn normals(&self, unit: usize, out: &mut [f64]) {
        let mut r = self.stream(2 * unit as u64);
        for z in out.iter_mut() {
            *z = r.sample(StandardNormal);
        }
    }

    pub(crate) fn uniforms(&self, unit: usize) -> ChaCha8Rng {
        self.stream(2 * unit as u64 + 1)
    }
}

/// Uniform on (0, 1].
pub(crate) fn open_uniform(r: &mut ChaCha8Rng) -> f64 {
    1.0 - r.random::<f64>()
}

/// Runs `sample(normals, uniforms)` per path and averages. With antithetic
/// sampling the partner path sees negated normals and a replay of the same
/// uniforms; the pair mean is the sampling unit.
pub(crate) fn run<F>(cfg: &SimConfig, n_normals: usize, mut sample: F) -> Result<OracleEstimate, McError>
where
    F: FnMut(&[f64], &mut ChaCha8Rng) -> f64,
{
    cfg.validate()?;
    let rng = UnitRng::new(cfg.seed);
    let mut z = vec![0.0; n_normals];
    let mut acc = Welford::default();
    for unit in 0..cfg.units() {
        rng.normals(unit, &mut z);
        let mut u = rng.uniforms(unit);
        let a = sample(&z, &mut u);
        if cfg.antithetic {
            z.iter_mut().for_each(|v| *v = -*v);
            let mut u = rng.uniforms(unit);
            let b = sample(&z, &mut u);
            acc.push(0.5 * (a + b));
        } else {
            acc.push(a);
        }
    }
    Ok(OracleEstimate { mean: acc.mean(), std_error: acc.std_error(), paths: cfg.paths })
}

/// Breadth-first Brownian bridge construction on a uniform grid of `steps`
/// intervals over [0, horizon]. The first normal fixes the terminal value;
/// with power-of-two step counts the coarse grid is a subset of every
/// refinement driven by the same normals.
#[derive(Debug, Clone)]
pub struct LevyGrid {
    horizon: f64,
    steps: usize,
    terminal_sd: f64,
    // (left, mid, right, left weight, right weight, conditional sd)
    plan: Vec<(usize, usize, usize, f64, f64, f64)>,
}

impl LevyGrid {
    pub fn new(horizon: f64, steps: usize) -> Self {
        let h = horizon / steps as f64;
        let mut plan = Vec::with_capacity(steps.saturating_sub(1));
        let mut queue = VecDeque::from([(0usize, steps)]);
        while let Some((l, r)) = queue.pop_front() {
            if r - l < 2 {
                continue;
            }
            let m = (l + r) / 2;
            let (tl, tm, tr) = (l as f64 * h, m as f64 * h, r as f64 * h);
            let span = tr - tl;
            plan.push((l, m, r, (tr - tm) / span, (tm - tl) / span, ((tm - tl) * (tr - tm) / span).sqrt()));
            queue.push_back((l, m));
            queue.push_back((m, r));
        }
        LevyGrid { horizon, steps, terminal_sd: horizon.sqrt(), plan }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    /// Fills `w` (length steps + 1) from `z` (length steps).
    pub fn build(&self, z: &[f64], w: &mut [f64]) {
        debug_assert_eq!(z.len(), self.steps);
        debug_assert_eq!(w.len(), self.steps + 1);
        w[0] = 0.0;
        w[self.steps] = self.terminal_sd * z[0];
        for (j, &(l, m, r, wl, wr, sd)) in self.plan.iter().enumerate() {
            w[m] = wl * w[l] + wr * w[r] + sd * z[j + 1];
        }
    }
}

/// Exact draw of the maximum of a Brownian bridge from `a` to `b` over a
/// step of variance `h`, given `u` uniform on (0, 1].
pub fn bridge_max(a: f64, b: f64, h: f64, u: f64) -> f64 {
    let d = b - a;
    0.5 * (a + b + (d * d - 2.0 * h * u.ln()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0, 4, 1).validate().is_err());
        assert!(SimConfig::new(4, 0, 1).validate().is_err());
        assert!(SimConfig::new(3, 4, 1).validate().is_err());
        assert!(SimConfig { antithetic: false, ..SimConfig::new(3, 4, 1) }.validate().is_ok());
    }

    #[test]
    fn levy_grid_has_brownian_covariance() {
        let g = LevyGrid::new(2.0, 8);
        let rng = UnitRng::new(7);
        let mut z = vec![0.0; 8];
        let mut w = vec![0.0; 9];
        let (mut s3, mut s6, mut s36) = (Welford::default(), Welford::default(), Welford::default());
        for unit in 0..200_000 {
            rng.normals(unit, &mut z);
            g.build(&z, &mut w);
            s3.push(w[3] * w[3]);
            s6.push(w[6] * w[6]);
            s36.push(w[3] * w[6]);
        }
        // Var W(t) = t, Cov(W(s), W(t)) = min(s, t)
        assert_abs_diff_eq!(s3.mean(), 0.75, epsilon = 5.0 * s3.std_error());
        assert_abs_diff_eq!(s6.mean(), 1.5, epsilon = 5.0 * s6.std_error());
        assert_abs_diff_eq!(s36.mean(), 0.75, epsilon = 5.0 * s36.std_error());
    }

    #[test]
    fn refinement_keeps_coarse_points() {
        let coarse = LevyGrid::new(1.0, 4);
        let fine = LevyGrid::new(1.0, 8);
        let z: Vec<f64> = (0..8).map(|k| (k as f64 * 0.7).sin()).collect();
        let (mut wc, mut wf) = (vec![0.0; 5], vec![0.0; 9]);
        coarse.build(&z[..4], &mut wc);
        fine.build(&z, &mut wf);
        for k in 0..5 {
            assert_abs_diff_eq!(wc[k], wf[2 * k], epsilon = 1e-15);
        }
    }

    #[test]
    fn odd_step_counts_fill_every_point() {
        let g = LevyGrid::new(1.0, 7);
        let z = vec![1.0; 7];
        let mut w = vec![f64::NAN; 8];
        g.build(&z, &mut w);
        assert!(w.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn bridge_max_law() {
        // P(max > m) = exp(-2 (m - a)(m - b) / h) for a bridge from a to b
        let (a, b, h, m) = (0.0, 0.3, 0.5, 0.6);
        let mut r = UnitRng::new(3).uniforms(0);
        let n = 200_000;
        let hits = (0..n).filter(|_| bridge_max(a, b, h, open_uniform(&mut r)) > m).count();
        let p = (-2.0 * (m - a) * (m - b) / h).exp();
        let freq = hits as f64 / n as f64;
        assert!((freq - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "{freq} {p}");
        assert_eq!(bridge_max(0.2, 0.1, 1.0, 1.0), 0.2);
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = SimConfig::new(1000, 4, 42);
        let f = |z: &[f64], u: &mut ChaCha8Rng| z[0] * z[1] + open_uniform(u);
        let a = run(&cfg, 4, f).unwrap();
        let b = run(&cfg, 4, f).unwrap();
        assert_eq!(a, b);
        let c = run(&SimConfig::new(1000, 4, 43), 4, f).unwrap();
        assert_ne!(a.mean, c.mean);
    }
}
