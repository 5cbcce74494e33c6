use super::{act365, TermStructureError};
use crate::dates::{year_fraction, DayCount, MarketDate};
use serde::{Deserialize, Serialize};

/// A fixed-rate annual bullet bond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondSpec {
    pub issuer: String,
    pub maturity: MarketDate,
    /// Coupon rate, decimal per annum.
    pub coupon: f64,
    pub face: f64,
    /// Remaining payment dates after settlement; the last one is the maturity.
    pub payment_dates: Vec<MarketDate>,
    /// Coupon date preceding the first remaining payment.
    pub previous_coupon: MarketDate,
    /// Clean price per 100 face, present for calibration instruments.
    pub clean_price: Option<f64>,
}

/// One dated flow and its Act/365 time from the pricing anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CashFlow {
    pub date: MarketDate,
    pub time: f64,
    pub amount: f64,
}

impl BondSpec {
    /// Builds the annual schedule rolled back from `maturity` as seen from `settle`.
    pub fn annual(
        issuer: impl Into<String>,
        maturity: MarketDate,
        coupon: f64,
        settle: MarketDate,
        clean_price: Option<f64>,
    ) -> Result<Self, TermStructureError> {
        let issuer = issuer.into();
        if settle >= maturity {
            return Err(TermStructureError::Lifecycle {
                bond: format!("{issuer} {maturity}"),
                settle,
                maturity,
            });
        }
        let mut dates = vec![maturity];
        let mut k = 1;
        let previous_coupon = loop {
            let d = maturity.add_years(-k)?;
            if d <= settle {
                break d;
            }
            dates.push(d);
            k += 1;
        };
        dates.reverse();
        let bond = Self {
            issuer,
            maturity,
            coupon,
            face: 100.0,
            payment_dates: dates,
            previous_coupon,
            clean_price,
        };
        bond.validate()?;
        Ok(bond)
    }

    pub fn validate(&self) -> Result<(), TermStructureError> {
        let bad = |why: &str| Err(TermStructureError::Input(format!("bond {}: {why}", self.id())));
        if !(self.coupon.is_finite() && self.coupon >= 0.0) {
            return bad("coupon rate must be a non-negative number");
        }
        if self.payment_dates.last() != Some(&self.maturity) {
            return bad("last payment date must equal the maturity");
        }
        if self.payment_dates.windows(2).any(|w| w[0] >= w[1]) {
            return bad("payment dates must be strictly increasing");
        }
        if self.previous_coupon >= self.payment_dates[0] {
            return bad("previous coupon date must precede the first payment");
        }
        Ok(())
    }

    /// Human-readable identifier, e.g. `BNPP 2.875 2017-11-27`.
    pub fn id(&self) -> String {
        format!("{} {} {}", self.issuer, trim_pct(self.coupon * 100.0), self.maturity)
    }

    /// Flows after the anchor: ActAct-accrued coupons, face added to the last.
    pub fn cash_flows(&self, anchor: MarketDate) -> Result<Vec<CashFlow>, TermStructureError> {
        let mut prev = self.previous_coupon;
        let n = self.payment_dates.len();
        let mut flows = Vec::with_capacity(n);
        for (i, &date) in self.payment_dates.iter().enumerate() {
            let accrual = year_fraction(prev, date, DayCount::ActAct)?;
            let mut amount = self.coupon * self.face * accrual;
            if i + 1 == n {
                amount += self.face;
            }
            prev = date;
            if date > anchor {
                flows.push(CashFlow { date, time: act365(anchor, date)?, amount });
            }
        }
        Ok(flows)
    }
}

fn trim_pct(v: f64) -> String {
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Accrued interest per 100 face at `settle` (ActAct within the current period).
pub fn accrued_interest(bond: &BondSpec, settle: MarketDate) -> Result<f64, TermStructureError> {
    if settle >= bond.maturity {
        return Err(TermStructureError::Lifecycle {
            bond: bond.id(),
            settle,
            maturity: bond.maturity,
        });
    }
    let mut start = bond.previous_coupon;
    for &d in &bond.payment_dates {
        if d > settle {
            let elapsed = start.days_until(settle) as f64;
            let period = start.days_until(d) as f64;
            if elapsed < 0.0 {
                return Err(TermStructureError::Lifecycle {
                    bond: bond.id(),
                    settle,
                    maturity: bond.maturity,
                });
            }
            return Ok(bond.coupon * bond.face * elapsed / period);
        }
        start = d;
    }
    unreachable!("settle before maturity implies a future payment")
}

/// Clean price plus accrued interest.
pub fn invoice_price(bond: &BondSpec, settle: MarketDate) -> Result<f64, TermStructureError> {
    let clean = bond
        .clean_price
        .ok_or_else(|| TermStructureError::Input(format!("bond {} has no clean price", bond.id())))?;
    Ok(clean + accrued_interest(bond, settle)?)
}
