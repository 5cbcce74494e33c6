use crate::sim::{run, McError, OracleEstimate, SimConfig, UnitRng, Welford};
use illiquid_core::HwParams;

/// Exact OU transition x' = e^{-a h} x + sd·z with trapezoid ∫x over [0, τ].
struct OuIntegrator {
    decay: f64,
    sd: f64,
    h: f64,
}

impl OuIntegrator {
    fn new(p: &HwParams, ttl: f64, steps: usize) -> Self {
        let h = ttl / steps as f64;
        let a = p.a_hat;
        let var = if a * h < 1e-8 {
            h
        } else {
            -(-2.0 * a * h).exp_m1() / (2.0 * a)
        };
        OuIntegrator { decay: (-a * h).exp(), sd: p.sigma_hat * var.sqrt(), h }
    }

    fn integral(&self, z: &[f64]) -> f64 {
        let (mut x, mut acc) = (0.0, 0.0);
        for &e in z {
            let next = self.decay * x + self.sd * e;
            acc += 0.5 * self.h * (x + next);
            x = next;
        }
        acc
    }
}

fn check(p: &HwParams, ttl: f64) -> Result<(), McError> {
    p.validate().map_err(|e| McError::Domain(e.to_string()))?;
    if !(ttl > 0.0 && ttl.is_finite()) {
        return Err(McError::Domain(format!("time-to-liquidate must be > 0, got {ttl}")));
    }
    Ok(())
}

/// E[exp(-∫λ)] with λ = ψ + γ x, x the OU factor, for a given ∫ψ over [0, τ].
pub fn oracle_survival(
    p: &HwParams,
    psi_integral: f64,
    ttl: f64,
    cfg: &SimConfig,
) -> Result<OracleEstimate, McError> {
    check(p, ttl)?;
    let ou = OuIntegrator::new(p, ttl, cfg.steps);
    let base = (-psi_integral).exp();
    run(cfg, cfg.steps, |z, _| base * (-p.gamma_hat * ou.integral(z)).exp())
}

/// Monte-Carlo -ln(B̄/B) over [0, τ]: the defaultable rate r + λ loads the
/// whole factor x while r loads (1 - γ)x, so the ratio depends on ∫ψ and on
/// the law of ∫x only. Both expectations share the same paths; the standard
/// error follows from the delta method.
pub fn oracle_zeta_extraction(
    p: &HwParams,
    psi_integral: f64,
    ttl: f64,
    cfg: &SimConfig,
) -> Result<OracleEstimate, McError> {
    check(p, ttl)?;
    cfg.validate()?;
    let ou = OuIntegrator::new(p, ttl, cfg.steps);
    let rng = UnitRng::new(cfg.seed);
    let mut z = vec![0.0; cfg.steps];
    let units = if cfg.antithetic { cfg.paths / 2 } else { cfg.paths };
    let (mut da, mut db, mut dd) = (Welford::default(), Welford::default(), Welford::default());
    let g = 1.0 - p.gamma_hat;
    let mut samples = Vec::with_capacity(units);
    for unit in 0..units {
        rng.normals(unit, &mut z);
        let i1 = ou.integral(&z);
        let (a, b) = if cfg.antithetic {
            z.iter_mut().for_each(|v| *v = -*v);
            let i2 = ou.integral(&z);
            (0.5 * ((-i1).exp() + (-i2).exp()), 0.5 * ((-g * i1).exp() + (-g * i2).exp()))
        } else {
            ((-i1).exp(), (-g * i1).exp())
        };
        da.push(a);
        db.push(b);
        samples.push((a, b));
    }
    let (ma, mb) = (da.mean(), db.mean());
    // linearised per-unit contribution of ln(ma) - ln(mb)
    for &(a, b) in &samples {
        dd.push(a / ma - b / mb);
    }
    Ok(OracleEstimate {
        mean: psi_integral - ma.ln() + mb.ln(),
        std_error: dd.std_error(),
        paths: cfg.paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use illiquid_core::integral_sigma_sq;

    #[test]
    fn no_credit_loading_is_deterministic() {
        let p = HwParams::new(0.1294, 0.0126, 0.0).unwrap();
        let r = oracle_survival(&p, 0.01, 0.5, &SimConfig::new(100, 10, 1)).unwrap();
        assert_eq!(r.mean, (-0.01f64).exp());
        assert_eq!(r.std_error, 0.0);
        let q = HwParams::new(0.1294, 0.0, 0.3).unwrap();
        let s = oracle_survival(&q, 0.01, 0.5, &SimConfig::new(100, 10, 1)).unwrap();
        assert_eq!(s.mean, (-0.01f64).exp());
    }

    #[test]
    fn trapezoid_variance_matches_closed_form() {
        let p = HwParams::new(0.3, 0.1, 0.0).unwrap();
        let ou = OuIntegrator::new(&p, 2.0, 400);
        let rng = UnitRng::new(4);
        let mut z = vec![0.0; 400];
        let mut acc = Welford::default();
        for unit in 0..40_000 {
            rng.normals(unit, &mut z);
            let i = ou.integral(&z);
            acc.push(i * i);
        }
        let target = integral_sigma_sq(&p, 2.0);
        assert!((acc.mean() - target).abs() < 4.0 * acc.std_error(), "{} {target}", acc.mean());
    }

    #[test]
    fn rejects_bad_ttl() {
        let p = HwParams::default();
        assert!(oracle_survival(&p, 0.0, 0.0, &SimConfig::new(10, 4, 1)).is_err());
        assert!(oracle_zeta_extraction(&p, 0.0, -1.0, &SimConfig::new(10, 4, 1)).is_err());
    }
}
