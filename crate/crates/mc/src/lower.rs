use crate::sim::{bridge_max, open_uniform, run, LevyGrid, McError, OracleEstimate, SimConfig};
use rand_chacha::ChaCha8Rng;

/// Global maximum of x(t) = W(t) + drift·t on the grid, with each step's
/// maximum drawn from the bridge law. Returns (argmax, max) with the argmax
/// placed at the midpoint of the winning step.
fn extremum(grid: &LevyGrid, w: &[f64], drift: f64, u: &mut ChaCha8Rng) -> (f64, f64) {
    let h = grid.dt();
    let (mut best, mut k_best) = (f64::NEG_INFINITY, 0);
    let mut a = 0.0;
    for k in 0..grid.steps() {
        let b = w[k + 1] + drift * grid.time(k + 1);
        let m = bridge_max(a, b, h, open_uniform(u));
        if m > best {
            best = m;
            k_best = k;
        }
        a = b;
    }
    ((k_best as f64 + 0.5) * h, best)
}

/// Feeds (argmax, max) of a drifted Brownian motion over [0, horizon] to
/// `visit`, one call per simulated path.
pub fn sample_drifted_extremum<F: FnMut(f64, f64)>(
    drift: f64,
    horizon: f64,
    cfg: &SimConfig,
    mut visit: F,
) -> Result<(), McError> {
    if !(horizon > 0.0) {
        return Err(McError::Domain(format!("horizon must be > 0, got {horizon}")));
    }
    let grid = LevyGrid::new(horizon, cfg.steps);
    let mut w = vec![0.0; cfg.steps + 1];
    run(cfg, cfg.steps, |z, u| {
        grid.build(z, &mut w);
        let (theta, y) = extremum(&grid, &w, drift, u);
        visit(theta, y);
        0.0
    })?;
    Ok(())
}

/// Brute-force `pi_lower`: on a unit changed clock, flow i is valued at the
/// first time θ the last flow peaks, exp(Σ_i(x(θ) - (Σ_i - Σ_N)θ/2)) with
/// x(t) = W(t) - Σ_N t/2.
pub fn mc_pi_lower(sigma_i: f64, sigma_n: f64, cfg: &SimConfig) -> Result<OracleEstimate, McError> {
    if !(sigma_i >= 0.0 && sigma_i <= sigma_n) {
        return Err(McError::Domain(format!(
            "need 0 <= sigma_i <= sigma_n, got ({sigma_i}, {sigma_n})"
        )));
    }
    let grid = LevyGrid::new(1.0, cfg.steps);
    let mut w = vec![0.0; cfg.steps + 1];
    run(cfg, cfg.steps, |z, u| {
        grid.build(z, &mut w);
        let (theta, x) = extremum(&grid, &w, -0.5 * sigma_n, u);
        (sigma_i * (x - 0.5 * (sigma_i - sigma_n) * theta)).exp()
    })
}
