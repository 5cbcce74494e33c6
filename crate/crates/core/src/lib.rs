//! Closed-form pricing of illiquid corporate coupon bonds.
//!
//! An illiquid bond is priced against liquid bonds of the same issuer: the
//! difference (the sheer liquidity premium) is the value of being able to
//! sell at the running maximum of the forward bond price during the
//! time-to-liquidate, which is bounded above and below in closed form under
//! a one-factor Hull–White defaultable short rate.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dates;
pub mod hw;
pub mod liquidity;
pub mod math;
pub mod termstructure;

pub use dates::{year_fraction, DateError, DayCount, MarketDate};
pub use hw::{
    changed_clock, integral_sigma_sq, survival_probability, vol_bundle, zc_volatility, HwParams,
    ModelError, VolBundle,
};
pub use liquidity::{
    bond_yield, illiquid_price, liquidity_yield_spread, pi_lower, pi_upper, premium_bounds,
    liquidity_report, sheer_spread, EngineError, FlowFactors, LiquidityReport, PremiumBounds,
};
pub use termstructure::{
    accrued_interest, bootstrap_discount, bootstrap_zeta, defaultable_discount, invoice_price,
    price_liquid_bond, BondSpec, CashFlow, DiscountCurve, IssuerCurve, OisQuote,
    TermStructureError,
};
