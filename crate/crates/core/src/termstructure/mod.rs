//! Market-observable inputs: the risk-free discount curve, the issuer's
//! Zeta-spread curve and plain liquid bond pricing.

mod bond;
mod discount;
mod issuer;

pub use bond::{accrued_interest, invoice_price, BondSpec, CashFlow};
pub use discount::{bootstrap_discount, DiscountCurve, OisQuote};
pub use issuer::{bootstrap_zeta, defaultable_discount, price_liquid_bond, IssuerCurve};

use crate::dates::{DateError, MarketDate};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TermStructureError {
    #[error(transparent)]
    Date(#[from] DateError),
    #[error("input error: {0}")]
    Input(String),
    #[error("bond {bond}: settlement {settle} is not before maturity {maturity}")]
    Lifecycle {
        bond: String,
        settle: MarketDate,
        maturity: MarketDate,
    },
    #[error("calibration failed for {instrument}: {reason}")]
    Calibration { instrument: String, reason: String },
}

/// Act/365 time in years from the curve anchor.
pub(crate) fn act365(anchor: MarketDate, date: MarketDate) -> Result<f64, TermStructureError> {
    Ok(crate::dates::year_fraction(anchor, date, crate::dates::DayCount::Act365)?)
}
