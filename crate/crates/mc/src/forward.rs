use crate::sim::{bridge_max, open_uniform, run, LevyGrid, McError, OracleEstimate, SimConfig};
use illiquid_core::VolBundle;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwardMax {
    /// Running maximum of Σ w_i B̄_i(t)/B̄_i(t0) over the window.
    pub estimate: OracleEstimate,
    /// Share of paths whose bond maximum falls in the step where the last
    /// flow peaks.
    pub argmax_coincidence: f64,
}

/// Expected running maximum of a weighted basket of forward zero-coupons
/// driven by one Brownian motion on the changed clock.
///
/// Within each step the maximum of the driver is drawn exactly from the
/// bridge law; the basket is evaluated there at the step midpoint.
pub fn simulate_max_forward(
    bundle: &VolBundle,
    weights: &[f64],
    cfg: &SimConfig,
) -> Result<ForwardMax, McError> {
    cfg.validate()?;
    let zetas = &bundle.zetas;
    if zetas.is_empty() || weights.len() != zetas.len() {
        return Err(McError::Domain(format!(
            "{} weights for {} flows",
            weights.len(),
            zetas.len()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(McError::Domain("weights must be finite and >= 0".into()));
    }
    let zn = *zetas.last().expect("non-empty");
    if zetas.iter().any(|&z| !(z >= 0.0 && z <= zn)) {
        return Err(McError::Domain("the last flow must carry the largest volatility".into()));
    }
    let clock = bundle.clock;
    let grid = LevyGrid::new(clock, cfg.steps);
    let h = grid.dt();
    let slack = zetas.iter().map(|&z| (zn - z) * clock / 2.0).fold(0.0, f64::max);
    let times: Vec<f64> = (0..=cfg.steps).map(|k| grid.time(k)).collect();
    let drift: Vec<f64> = zetas.iter().map(|&z| z * (zn - z) / 2.0).collect();
    let basket = |t: f64, m: f64| -> f64 {
        weights
            .iter()
            .zip(zetas)
            .zip(&drift)
            .map(|((w, z), d)| w * (z * m + d * t).exp())
            .sum()
    };

    let mut w = vec![0.0; cfg.steps + 1];
    let mut maxima = vec![0.0; cfg.steps];
    let mut coincide = 0usize;
    let estimate = run(cfg, cfg.steps, |z, u| {
        grid.build(z, &mut w);
        let (mut y_star, mut k_star) = (f64::NEG_INFINITY, 0);
        for k in 0..cfg.steps {
            let a = w[k] - zn * times[k] / 2.0;
            let b = w[k + 1] - zn * times[k + 1] / 2.0;
            let m = bridge_max(a, b, h, open_uniform(u));
            maxima[k] = m;
            if m > y_star {
                y_star = m;
                k_star = k;
            }
        }
        let (mut best, mut k_best) = (f64::NEG_INFINITY, 0);
        for k in 0..cfg.steps {
            if maxima[k] >= y_star - slack {
                let v = basket(0.5 * (times[k] + times[k + 1]), maxima[k]);
                if v > best {
                    best = v;
                    k_best = k;
                }
            }
        }
        if k_best == k_star {
            coincide += 1;
        }
        best
    })?;
    Ok(ForwardMax {
        estimate,
        argmax_coincidence: coincide as f64 / cfg.paths as f64,
    })
}
