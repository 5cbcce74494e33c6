//! Sheer liquidity premium bounds, illiquid prices and liquidity spreads.
//!
//! The premium is bounded by evaluating every forward zero-coupon either at
//! its own running maximum (upper, factor `pi_upper`) or at the first time
//! the last forward zero-coupon peaks (lower, factor `pi_lower`). Flows paid
//! before the time-to-liquidate are stripped and priced as liquid.

use crate::hw::{survival_probability, vol_bundle, HwParams, ModelError};
use crate::math::{brent, norm_cdf, GaussLegendre};
use crate::termstructure::{BondSpec, IssuerCurve, TermStructureError};
use crate::dates::MarketDate;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

/// Gauss–Legendre order for the `pi_lower` integral after η = sin²u.
pub const PI_LOWER_ORDER: usize = 96;

/// Yield search bracket, per annum.
pub const YIELD_BRACKET: (f64, f64) = (-0.5, 2.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("bond {0}: every flow is paid before the time-to-liquidate")]
    NoRetainedFlows(String),
    #[error("bond {bond}: illiquid price {price} is not positive (parameters outside model validity)")]
    Degenerate { bond: String, price: f64 },
    #[error("price {price} has no yield in [{lo}, {hi}]")]
    YieldOutOfRange { price: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    TermStructure(#[from] TermStructureError),
}

/// Expected running maximum of a driftless unit-start GBM with total
/// log-volatility `sigma` over the window.
pub fn pi_upper(sigma: f64) -> Result<f64, EngineError> {
    if !(sigma >= 0.0) {
        return Err(EngineError::Domain(format!("cumulated volatility must be >= 0, got {sigma}")));
    }
    let s2 = sigma * sigma;
    Ok(0.5 * (4.0 + s2) * norm_cdf(0.5 * sigma) + sigma / (2.0 * PI).sqrt() * (-s2 / 8.0).exp())
}

fn default_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PI_LOWER_ORDER).expect("positive order"))
}

/// Expected value of flow `i` at the first time the last flow peaks.
///
/// Requires `0 <= sigma_i <= sigma_n`. The η-integral has 1/sqrt(η(1-η))
/// endpoint singularities; with η = sin²u the measure becomes (2/π) du.
pub fn pi_lower(sigma_i: f64, sigma_n: f64) -> Result<f64, EngineError> {
    pi_lower_with_rule(sigma_i, sigma_n, default_rule())
}

pub fn pi_lower_with_order(sigma_i: f64, sigma_n: f64, order: usize) -> Result<f64, EngineError> {
    let rule = GaussLegendre::new(order).map_err(|e| EngineError::Domain(e.to_string()))?;
    pi_lower_with_rule(sigma_i, sigma_n, &rule)
}

fn pi_lower_with_rule(sigma_i: f64, sigma_n: f64, rule: &GaussLegendre) -> Result<f64, EngineError> {
    if !(sigma_i >= 0.0 && sigma_n >= 0.0) {
        return Err(EngineError::Domain(format!(
            "cumulated volatilities must be >= 0, got ({sigma_i}, {sigma_n})"
        )));
    }
    if sigma_i > sigma_n {
        return Err(EngineError::Domain(format!(
            "flow volatility {sigma_i} exceeds last-flow volatility {sigma_n}"
        )));
    }
    // a flow without volatility is worth its forward at any time
    if sigma_i == 0.0 {
        return Ok(1.0);
    }
    let (si, sn) = (sigma_i, sigma_n);
    let d = 2.0 * si - sn;
    let root_half_pi = (0.5 * PI).sqrt();
    let pref = (-sn * sn / 8.0).exp();
    let integral = rule.integrate(0.0, 0.5 * PI, |u| {
        let (s, c) = u.sin_cos();
        let eta = s * s;
        let last = 1.0 + root_half_pi * c * sn * (c * c * sn * sn / 8.0).exp() * norm_cdf(0.5 * c * sn);
        let this = 1.0 + root_half_pi * s * d * (eta * d * d / 8.0).exp() * norm_cdf(0.5 * s * d);
        (-0.5 * eta * si * (si - sn)).exp() * last * this
    });
    Ok(pref * 2.0 / PI * integral)
}

/// Per-flow ingredients of the premium bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowFactors {
    pub date: MarketDate,
    pub time: f64,
    pub amount: f64,
    pub defaultable_df: f64,
    pub sigma: f64,
    pub pi_upper: f64,
    pub pi_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PremiumBounds {
    pub ttl: f64,
    pub survival: f64,
    /// Flows paid after the time-to-liquidate, in payment order.
    pub retained: Vec<FlowFactors>,
    /// Liquid value of flows paid up to the time-to-liquidate.
    pub stripped_value: f64,
    pub lower: f64,
    pub upper: f64,
    /// upper - lower, accumulated flow by flow.
    pub gap: f64,
}

impl PremiumBounds {
    /// Σ c_i B̄(t0, t_i) over the retained flows.
    pub fn retained_value(&self) -> f64 {
        self.retained.iter().map(|f| f.amount * f.defaultable_df).sum()
    }
}

/// Lower and upper bounds of the sheer liquidity premium per 100 face.
pub fn premium_bounds(
    bond: &BondSpec,
    issuer: &IssuerCurve,
    p: &HwParams,
    ttl: f64,
) -> Result<PremiumBounds, EngineError> {
    p.validate()?;
    if !(ttl >= 0.0 && ttl.is_finite()) {
        return Err(EngineError::Domain(format!("time-to-liquidate must be >= 0, got {ttl}")));
    }
    let flows = bond.cash_flows(issuer.anchor())?;
    let (stripped, kept): (Vec<_>, Vec<_>) = flows.into_iter().partition(|f| f.time <= ttl);
    if kept.is_empty() {
        return Err(EngineError::NoRetainedFlows(bond.id()));
    }
    let stripped_value = stripped
        .iter()
        .map(|f| f.amount * issuer.defaultable_df_time(f.time))
        .sum();

    if ttl == 0.0 {
        let retained = kept
            .iter()
            .map(|f| FlowFactors {
                date: f.date,
                time: f.time,
                amount: f.amount,
                defaultable_df: issuer.defaultable_df_time(f.time),
                sigma: 0.0,
                pi_upper: 1.0,
                pi_lower: 1.0,
            })
            .collect();
        return Ok(PremiumBounds {
            ttl,
            survival: 1.0,
            retained,
            stripped_value,
            lower: 0.0,
            upper: 0.0,
            gap: 0.0,
        });
    }

    let times: Vec<f64> = kept.iter().map(|f| f.time).collect();
    let vols = vol_bundle(p, ttl, &times)?;
    let sigma_n = *vols.sigmas.last().expect("non-empty");
    let survival = survival_probability(p, issuer, ttl);
    let mut retained = Vec::with_capacity(kept.len());
    let (mut lower, mut upper, mut gap) = (0.0, 0.0, 0.0);
    let last = kept.len() - 1;
    for (i, (f, &sigma)) in kept.iter().zip(&vols.sigmas).enumerate() {
        let df = issuer.defaultable_df_time(f.time);
        let pu = pi_upper(sigma)?;
        // the two factors coincide for the last flow; use the exact one
        let pl = if i == last { pu } else { pi_lower(sigma.min(sigma_n), sigma_n)? };
        let w = f.amount * df;
        lower += w * (pl - survival);
        upper += w * (pu - survival);
        gap += w * (pu - pl);
        retained.push(FlowFactors {
            date: f.date,
            time: f.time,
            amount: f.amount,
            defaultable_df: df,
            sigma,
            pi_upper: pu,
            pi_lower: pl,
        });
    }
    Ok(PremiumBounds {
        ttl,
        survival,
        retained,
        stripped_value,
        lower,
        upper,
        gap,
    })
}

/// Illiquid invoice price: stripped flows at liquid value, retained flows
/// scaled by 1 + P - π^U. Equals the liquid price minus the upper bound.
pub fn illiquid_price(
    bond: &BondSpec,
    issuer: &IssuerCurve,
    p: &HwParams,
    ttl: f64,
) -> Result<f64, EngineError> {
    illiquid_price_from_bounds(bond, &premium_bounds(bond, issuer, p, ttl)?)
}

fn illiquid_price_from_bounds(bond: &BondSpec, b: &PremiumBounds) -> Result<f64, EngineError> {
    let price = b.stripped_value
        + b.retained
            .iter()
            .map(|f| f.amount * f.defaultable_df * (1.0 + b.survival - f.pi_upper))
            .sum::<f64>();
    if !(price > 0.0) {
        return Err(EngineError::Degenerate { bond: bond.id(), price });
    }
    Ok(price)
}

fn spread_from_factor(survival: f64, pi_up: f64, time: f64) -> Result<f64, EngineError> {
    let arg = 1.0 + survival - pi_up;
    if !(arg > 0.0) {
        return Err(EngineError::Domain(format!(
            "1 + P - pi_upper = {arg} is not positive (parameters outside model validity)"
        )));
    }
    Ok(-arg.ln() / time)
}

/// Sheer liquidity spread of the zero-coupon paid `t_i` years after the anchor.
pub fn sheer_spread(
    issuer: &IssuerCurve,
    p: &HwParams,
    ttl: f64,
    t_i: f64,
) -> Result<f64, EngineError> {
    if !(t_i > ttl) {
        return Err(EngineError::Domain(format!("payment time {t_i} must exceed ttl {ttl}")));
    }
    if ttl == 0.0 {
        return Ok(0.0);
    }
    let vols = vol_bundle(p, ttl, &[t_i])?;
    let pu = pi_upper(vols.sigmas[0])?;
    spread_from_factor(survival_probability(p, issuer, ttl), pu, t_i)
}

/// Continuously-compounded yield y with price = Σ c_i exp(-y t_i).
pub fn bond_yield(price: f64, flows: &[crate::termstructure::CashFlow]) -> Result<f64, EngineError> {
    if !(price > 0.0) {
        return Err(EngineError::Domain(format!("price must be > 0, got {price}")));
    }
    let pv = |y: f64| flows.iter().map(|f| f.amount * (-y * f.time).exp()).sum::<f64>() - price;
    let (lo, hi) = YIELD_BRACKET;
    brent(pv, lo, hi, 1e-17, 300).map_err(|_| EngineError::YieldOutOfRange { price, lo, hi })
}

/// Yield of the illiquid price minus yield of the liquid price.
pub fn liquidity_yield_spread(
    bond: &BondSpec,
    issuer: &IssuerCurve,
    p: &HwParams,
    ttl: f64,
) -> Result<f64, EngineError> {
    let r = liquidity_report(bond, issuer, p, ttl)?;
    Ok(r.liquidity_yield_spread)
}

/// One (bond, ttl) row of results; money per 100 face, rates decimal per annum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiquidityReport {
    pub bond_id: String,
    pub issuer: String,
    pub maturity: MarketDate,
    pub ttl: f64,
    pub survival: f64,
    pub delta_lower: f64,
    pub delta_upper: f64,
    pub bound_gap: f64,
    pub liquid_price: f64,
    pub illiquid_price: f64,
    pub liquid_yield: f64,
    pub illiquid_yield: f64,
    pub liquidity_yield_spread: f64,
    /// (payment date, sheer spread) for each retained flow.
    pub sheer_spreads: Vec<(MarketDate, f64)>,
}

pub fn liquidity_report(
    bond: &BondSpec,
    issuer: &IssuerCurve,
    p: &HwParams,
    ttl: f64,
) -> Result<LiquidityReport, EngineError> {
    let bounds = premium_bounds(bond, issuer, p, ttl)?;
    let flows = bond.cash_flows(issuer.anchor())?;
    let liquid = bounds.stripped_value + bounds.retained_value();
    let illiquid = illiquid_price_from_bounds(bond, &bounds)?;
    let liquid_yield = bond_yield(liquid, &flows)?;
    let illiquid_yield = bond_yield(illiquid, &flows)?;
    let sheer_spreads = bounds
        .retained
        .iter()
        .map(|f| {
            let s = if ttl == 0.0 { 0.0 } else { spread_from_factor(bounds.survival, f.pi_upper, f.time)? };
            Ok((f.date, s))
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok(LiquidityReport {
        bond_id: bond.id(),
        issuer: bond.issuer.clone(),
        maturity: bond.maturity,
        ttl,
        survival: bounds.survival,
        delta_lower: bounds.lower,
        delta_upper: bounds.upper,
        bound_gap: bounds.gap,
        liquid_price: liquid,
        illiquid_price: illiquid,
        liquid_yield,
        illiquid_yield,
        liquidity_yield_spread: illiquid_yield - liquid_yield,
        sheer_spreads,
    })
}
