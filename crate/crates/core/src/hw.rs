//! One-factor defaultable Hull–White volatility structure.
//!
//! The defaultable short rate is driven by a single Ornstein–Uhlenbeck factor
//! `dx = -a x dt + σ dW`, split between the risk-free rate (fraction 1 - γ)
//! and the default intensity (fraction γ). All times are Act/365 year
//! fractions from the settlement date.

use crate::termstructure::IssuerCurve;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    Params(String),
    #[error("time ordering violated: {0}")]
    Ordering(String),
    #[error("payment time {time} precedes the time-to-liquidate {ttl}")]
    FlowBeforeTtl { time: f64, ttl: f64 },
}

/// Mean reversion `a_hat` (1/y), volatility `sigma_hat` and credit fraction `gamma_hat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HwParams {
    pub a_hat: f64,
    pub sigma_hat: f64,
    pub gamma_hat: f64,
}

impl Default for HwParams {
    /// Swaption-calibrated values for the Euro market, September 2015.
    fn default() -> Self {
        Self {
            a_hat: 0.1294,
            sigma_hat: 0.0126,
            gamma_hat: 0.0007,
        }
    }
}

impl HwParams {
    pub fn new(a_hat: f64, sigma_hat: f64, gamma_hat: f64) -> Result<Self, ModelError> {
        let p = Self { a_hat, sigma_hat, gamma_hat };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.a_hat.is_finite() && self.a_hat > 0.0) {
            return Err(ModelError::Params(format!("a_hat must be > 0, got {}", self.a_hat)));
        }
        if !(self.sigma_hat.is_finite() && self.sigma_hat >= 0.0) {
            return Err(ModelError::Params(format!("sigma_hat must be >= 0, got {}", self.sigma_hat)));
        }
        if !(0.0..=1.0).contains(&self.gamma_hat) {
            return Err(ModelError::Params(format!("gamma_hat must lie in [0, 1], got {}", self.gamma_hat)));
        }
        Ok(())
    }

    /// (1 - e^{-a h}) / a, stable as a -> 0.
    fn decay_integral(&self, h: f64) -> f64 {
        -(-self.a_hat * h).exp_m1() / self.a_hat
    }
}

/// σ̄(t, T) = (σ/a)(1 - e^{-a(T - t)}).
pub fn zc_volatility(p: &HwParams, t: f64, maturity: f64) -> Result<f64, ModelError> {
    if t > maturity {
        return Err(ModelError::Ordering(format!("t = {t} > T = {maturity}")));
    }
    Ok(p.sigma_hat * p.decay_integral(maturity - t))
}

/// Length of the changed clock ∫_0^τ ν²(s) ds = (1 - e^{-2aτ}) / (2a).
pub fn changed_clock(p: &HwParams, ttl: f64) -> f64 {
    -(-2.0 * p.a_hat * ttl).exp_m1() / (2.0 * p.a_hat)
}

/// Per-flow volatility scales on the separable structure v(t; τ, t_i) = ζ_i ν(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolBundle {
    pub ttl: f64,
    pub times: Vec<f64>,
    /// ζ_i = (σ/a)(1 - e^{-a(t_i - τ)}).
    pub zetas: Vec<f64>,
    /// Cumulated volatility Σ_i(τ) = ζ_i sqrt(clock).
    pub sigmas: Vec<f64>,
    /// ∫_0^τ ν² ds.
    pub clock: f64,
}

pub fn vol_bundle(p: &HwParams, ttl: f64, times: &[f64]) -> Result<VolBundle, ModelError> {
    if !(ttl > 0.0) {
        return Err(ModelError::Ordering(format!("time-to-liquidate must be > 0, got {ttl}")));
    }
    if let Some(&bad) = times.iter().find(|&&t| t < ttl) {
        return Err(ModelError::FlowBeforeTtl { time: bad, ttl });
    }
    let clock = changed_clock(p, ttl);
    let zetas: Vec<f64> = times.iter().map(|&t| p.sigma_hat * p.decay_integral(t - ttl)).collect();
    let sigmas = zetas.iter().map(|z| z * clock.sqrt()).collect();
    Ok(VolBundle {
        ttl,
        times: times.to_vec(),
        zetas,
        sigmas,
        clock,
    })
}

/// ∫_0^τ σ̄²(s, τ) ds = (σ/a)² [τ - 2(1 - e^{-aτ})/a + (1 - e^{-2aτ})/(2a)].
pub fn integral_sigma_sq(p: &HwParams, ttl: f64) -> f64 {
    if ttl <= 0.0 || p.sigma_hat == 0.0 {
        return 0.0;
    }
    let a = p.a_hat;
    let x = a * ttl;
    // bracket [x - 2(1-e^-x) + (1-e^-2x)/2] cancels to O(x^3); use its series for small x
    let bracket = if x < 1.0 {
        // Σ_{n>=3} (-1)^{n+1} (2^{n-1} - 2) x^n / n!
        let mut sum = 0.0;
        let mut xn_fact = x * x / 2.0; // x^2/2!
        let mut pow2 = 2.0; // 2^{n-1} at n = 2
        for n in 3..60 {
            xn_fact *= x / n as f64;
            pow2 *= 2.0;
            let term = (pow2 - 2.0) * xn_fact;
            sum += if n % 2 == 1 { term } else { -term };
            if term < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        x - 2.0 * (1.0 - (-x).exp()) + 0.5 * (1.0 - (-2.0 * x).exp())
    };
    p.sigma_hat * p.sigma_hat / (a * a * a) * bracket
}

/// Survival probability to the time-to-liquidate.
///
/// The deterministic intensity integral is backed out of the market curves:
/// −ln(B̄/B) over (0, τ) equals ∫ψ − γ(1 − γ/2)∫σ̄², hence
/// P = exp(−Z(τ)τ − γ(1 − γ)∫σ̄²).
pub fn survival_probability(p: &HwParams, issuer: &IssuerCurve, ttl: f64) -> f64 {
    if ttl <= 0.0 {
        return 1.0;
    }
    let z = issuer.zeta_time(ttl);
    (-z * ttl - p.gamma_hat * (1.0 - p.gamma_hat) * integral_sigma_sq(p, ttl)).exp()
}

/// ∫_0^τ ψ ds implied by the issuer curve under the model.
pub fn intensity_integral(p: &HwParams, issuer: &IssuerCurve, ttl: f64) -> f64 {
    issuer.zeta_time(ttl) * ttl + p.gamma_hat * (1.0 - 0.5 * p.gamma_hat) * integral_sigma_sq(p, ttl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dates::MarketDate;
    use crate::math::GaussLegendre;
    use crate::termstructure::DiscountCurve;
    use approx::assert_abs_diff_eq;

    fn cal() -> HwParams {
        HwParams::default()
    }

    #[test]
    fn param_validation() {
        assert!(HwParams::new(0.0, 0.01, 0.0).is_err());
        assert!(HwParams::new(0.1, -0.01, 0.0).is_err());
        assert!(HwParams::new(0.1, 0.01, 1.5).is_err());
        assert!(HwParams::new(0.1, 0.0, 1.0).is_ok());
    }

    #[test]
    fn zc_volatility_examples() {
        let p = cal();
        assert_eq!(zc_volatility(&p, 3.0, 3.0).unwrap(), 0.0);
        let v = zc_volatility(&p, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(v, (0.0126 / 0.1294) * (1.0 - (-0.1294f64).exp()), epsilon = 1e-16);
        assert_abs_diff_eq!(v, 0.011_818_834_443_774, epsilon = 1e-12);
        // series cross-check σ h (1 - a h/2 + (a h)^2/6 - (a h)^3/24 + (a h)^4/120)
        let series = 0.0126 * (1.0 - 0.1294 / 2.0 + 0.1294f64.powi(2) / 6.0 - 0.1294f64.powi(3) / 24.0 + 0.1294f64.powi(4) / 120.0);
        assert_abs_diff_eq!(v, series, epsilon = 1e-8);
        let tiny = HwParams { a_hat: 1e-12, ..p };
        assert_abs_diff_eq!(zc_volatility(&tiny, 0.0, 2.5).unwrap(), 0.0126 * 2.5, epsilon = 1e-9);
        assert!(zc_volatility(&p, 2.0, 1.0).is_err());
    }

    #[test]
    fn vol_bundle_examples() {
        let p = cal();
        let b = vol_bundle(&p, 2.0 / 12.0, &[2.0 / 12.0, 5.0]).unwrap();
        assert_eq!(b.zetas[0], 0.0);
        assert_eq!(b.sigmas[0], 0.0);
        assert_abs_diff_eq!(b.zetas[1], 0.045_275_331_491_017, epsilon = 1e-12);
        assert_abs_diff_eq!(b.sigmas[1], 0.018_286_041_642_169, epsilon = 1e-12);
        // quadrature of ∫ v² over (0, τ), v = ζ ν
        let gl = GaussLegendre::new(40).unwrap();
        let tau = 2.0 / 12.0;
        let quad = gl.integrate(0.0, tau, |s| {
            let v = zc_volatility(&p, s, 5.0).unwrap() - zc_volatility(&p, s, tau).unwrap();
            v * v
        });
        assert_abs_diff_eq!(b.sigmas[1].powi(2), quad, epsilon = 1e-16);

        let flat = vol_bundle(&HwParams { sigma_hat: 0.0, ..p }, 0.5, &[1.0, 3.0]).unwrap();
        assert!(flat.sigmas.iter().all(|&s| s == 0.0));
        assert!(matches!(vol_bundle(&p, 0.5, &[0.4]), Err(ModelError::FlowBeforeTtl { .. })));
    }

    #[test]
    fn integral_sigma_sq_matches_quadrature() {
        let gl = GaussLegendre::new(64).unwrap();
        for &a in &[1e-6, 0.01, 0.1294, 0.3, 2.0] {
            for &s in &[0.005, 0.0126, 0.04] {
                for &tau in &[1.0 / 365.0, 14.0 / 365.0, 2.0 / 12.0, 1.0, 5.0, 20.0] {
                    let p = HwParams { a_hat: a, sigma_hat: s, gamma_hat: 0.0 };
                    let quad = gl.integrate(0.0, tau, |u| zc_volatility(&p, u, tau).unwrap().powi(2));
                    let closed = integral_sigma_sq(&p, tau);
                    assert!((closed - quad).abs() < 1e-12, "a={a} s={s} tau={tau}: {closed} vs {quad}");
                    assert!((closed - quad).abs() <= 1e-12 * quad.max(1e-300) + 1e-18);
                }
            }
        }
        assert_eq!(integral_sigma_sq(&cal(), 0.0), 0.0);
        assert_eq!(integral_sigma_sq(&HwParams { sigma_hat: 0.0, ..cal() }, 1.0), 0.0);
    }

    #[test]
    fn calibrated_two_month_integral() {
        let p = cal();
        let tau = 2.0 / 12.0;
        let gl = GaussLegendre::new(32).unwrap();
        let quad = gl.integrate(0.0, tau, |u| zc_volatility(&p, u, tau).unwrap().powi(2));
        assert_abs_diff_eq!(integral_sigma_sq(&p, tau), quad, epsilon = 1e-14);
    }

    #[test]
    fn separability() {
        let p = cal();
        let tau = 0.3;
        for &ti in &[0.3, 0.5, 2.0, 9.7] {
            let zeta = p.sigma_hat * p.decay_integral(ti - tau);
            for k in 0..=20 {
                let t = tau * k as f64 / 20.0;
                let lhs = zc_volatility(&p, t, ti).unwrap() - zc_volatility(&p, t, tau).unwrap();
                let rhs = zeta * (-p.a_hat * (tau - t)).exp();
                assert!((lhs - rhs).abs() < 1e-14);
            }
        }
    }

    fn anchor() -> MarketDate {
        "2015-09-14".parse().unwrap()
    }

    #[test]
    fn survival_examples() {
        let zero = IssuerCurve::flat("X", DiscountCurve::flat(anchor(), 0.0).unwrap(), 0.0).unwrap();
        let p0 = HwParams { gamma_hat: 0.0, ..cal() };
        assert_eq!(survival_probability(&p0, &zero, 0.5), 1.0);
        let flat = IssuerCurve::flat("X", DiscountCurve::flat(anchor(), 0.01).unwrap(), 0.0033).unwrap();
        assert_abs_diff_eq!(survival_probability(&p0, &flat, 0.5), (-0.0033f64 * 0.5).exp(), epsilon = 1e-16);
        assert_eq!(survival_probability(&cal(), &flat, 0.0), 1.0);
    }

    #[test]
    fn gamma_enters_at_second_order() {
        let flat = IssuerCurve::flat("X", DiscountCurve::flat(anchor(), 0.0).unwrap(), 0.004).unwrap();
        for &g in &[0.0, 0.0007, 0.01, 0.2, 0.5, 1.0] {
            for &tau in &[0.05, 0.5, 3.0] {
                let p = HwParams { gamma_hat: g, sigma_hat: 0.02, ..cal() };
                let i = integral_sigma_sq(&p, tau);
                let pg = survival_probability(&p, &flat, tau);
                let p_zero = survival_probability(&HwParams { gamma_hat: 0.0, ..p }, &flat, tau);
                assert!((pg - p_zero * (-g * i).exp()).abs() <= g * g * i + 1e-16);
            }
        }
    }

    #[test]
    fn survival_non_increasing_for_nonnegative_nondecreasing_z() {
        let disc = DiscountCurve::flat(anchor(), 0.0).unwrap();
        let d = |s: &str| s.parse::<MarketDate>().unwrap();
        let c = IssuerCurve::new("X", disc, &[(d("2016-09-14"), 0.002), (d("2020-09-14"), 0.01)]).unwrap();
        let p = cal();
        let mut prev = 1.0;
        for k in 1..200 {
            let s = survival_probability(&p, &c, k as f64 * 0.05);
            assert!(s <= prev);
            prev = s;
        }
    }

    proptest::proptest! {
        #[test]
        fn sigma_increasing_in_time_and_ttl(a in 0.01f64..0.5, s in 0.001f64..0.05, tau in 0.01f64..0.5, dt in 0.05f64..5.0) {
            let p = HwParams { a_hat: a, sigma_hat: s, gamma_hat: 0.0 };
            let b = vol_bundle(&p, tau, &[tau + dt, tau + dt + 0.5]).unwrap();
            proptest::prop_assert!(b.sigmas[1] > b.sigmas[0]);
            // fixed payment time: longer ttl accumulates more variance while t_i > 3 tau
            let ti = tau + dt;
            proptest::prop_assume!(ti > 3.0 * tau);
            let b2 = vol_bundle(&p, tau * 0.5, &[ti]).unwrap();
            proptest::prop_assert!(b.sigmas[0] > b2.sigmas[0]);
        }
    }
}
