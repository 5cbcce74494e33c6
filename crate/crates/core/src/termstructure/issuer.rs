use super::bond::{invoice_price, BondSpec, CashFlow};
use super::{act365, DiscountCurve, TermStructureError};
use crate::dates::MarketDate;
use crate::math::brent;
use serde::{Deserialize, Serialize};

const ZETA_BRACKET: (f64, f64) = (-0.10, 1.00);

/// Zeta-spread term structure of one issuer over a risk-free curve.
///
/// Z is constant up to the first knot, linear between knots and flat after
/// the last one; B̄(t0,T) = B(t0,T) exp(-Z(T)(T - t0)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssuerCurve {
    issuer: String,
    discount: DiscountCurve,
    dates: Vec<MarketDate>,
    times: Vec<f64>,
    spreads: Vec<f64>,
}

impl IssuerCurve {
    pub fn new(
        issuer: impl Into<String>,
        discount: DiscountCurve,
        knots: &[(MarketDate, f64)],
    ) -> Result<Self, TermStructureError> {
        let issuer = issuer.into();
        if knots.is_empty() {
            return Err(TermStructureError::Input(format!("issuer {issuer}: no Zeta-spread knots")));
        }
        let anchor = discount.anchor();
        let mut curve = Self {
            issuer,
            discount,
            dates: Vec::with_capacity(knots.len()),
            times: Vec::with_capacity(knots.len()),
            spreads: Vec::with_capacity(knots.len()),
        };
        for &(date, z) in knots {
            if !z.is_finite() {
                return Err(TermStructureError::Input(format!("non-finite Zeta spread at {date}")));
            }
            if curve.dates.last().is_some_and(|&last| date <= last) || date <= anchor {
                return Err(TermStructureError::Input(format!(
                    "Zeta knot {date} out of order for issuer {}",
                    curve.issuer
                )));
            }
            curve.times.push(act365(anchor, date)?);
            curve.dates.push(date);
            curve.spreads.push(z);
        }
        Ok(curve)
    }

    /// Flat Zeta spread `z` over `discount`.
    pub fn flat(
        issuer: impl Into<String>,
        discount: DiscountCurve,
        z: f64,
    ) -> Result<Self, TermStructureError> {
        let knot = discount.anchor().add_years(1)?;
        Self::new(issuer, discount, &[(knot, z)])
    }

    pub fn issuer(&self) -> &str {
        &self.issuer
    }

    pub fn anchor(&self) -> MarketDate {
        self.discount.anchor()
    }

    pub fn discount(&self) -> &DiscountCurve {
        &self.discount
    }

    pub fn knots(&self) -> Vec<(MarketDate, f64)> {
        self.dates.iter().copied().zip(self.spreads.iter().copied()).collect()
    }

    /// Z at `t` years from the anchor.
    pub fn zeta_time(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.spreads[0];
        }
        if t >= self.times[n - 1] {
            return self.spreads[n - 1];
        }
        let i = self.times.partition_point(|&x| x < t);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (z0, z1) = (self.spreads[i - 1], self.spreads[i]);
        z0 + (z1 - z0) * (t - t0) / (t1 - t0)
    }

    pub fn zeta(&self, date: MarketDate) -> Result<f64, TermStructureError> {
        Ok(self.zeta_time(act365(self.anchor(), date)?))
    }

    /// B̄(t0, t) at `t` years from the anchor.
    pub fn defaultable_df_time(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        self.discount.df_time(t) * (-self.zeta_time(t) * t).exp()
    }
}

/// B̄(t0, T) = B(t0, T) exp(-Z(T)(T - t0)), Act/365 time.
pub fn defaultable_discount(curve: &IssuerCurve, date: MarketDate) -> Result<f64, TermStructureError> {
    let t = act365(curve.anchor(), date)?;
    Ok(curve.defaultable_df_time(t))
}

fn pv_flows(curve: &IssuerCurve, flows: &[CashFlow]) -> f64 {
    flows.iter().map(|f| f.amount * curve.defaultable_df_time(f.time)).sum()
}

/// Invoice price Σ c_i B̄(t0, t_i) of the flows remaining after the curve anchor.
pub fn price_liquid_bond(bond: &BondSpec, curve: &IssuerCurve) -> Result<f64, TermStructureError> {
    Ok(pv_flows(curve, &bond.cash_flows(curve.anchor())?))
}

/// Sequential knot-by-knot Zeta bootstrap from liquid bond invoice prices.
///
/// Each bond adds one knot at its maturity; flows between the previous
/// knot and that maturity see the knot through the linear rule.
pub fn bootstrap_zeta(
    bonds: &[BondSpec],
    disc: &DiscountCurve,
    t0: MarketDate,
) -> Result<IssuerCurve, TermStructureError> {
    if bonds.is_empty() {
        return Err(TermStructureError::Input("no bonds to bootstrap".into()));
    }
    if disc.anchor() != t0 {
        return Err(TermStructureError::Input(format!(
            "discount curve anchored at {} but bootstrap date is {t0}",
            disc.anchor()
        )));
    }
    let issuer = bonds[0].issuer.clone();
    for w in bonds.windows(2) {
        if w[1].maturity <= w[0].maturity {
            return Err(TermStructureError::Input(format!(
                "bonds must be sorted by strictly increasing maturity ({} then {})",
                w[0].id(),
                w[1].id()
            )));
        }
    }
    let mut knots: Vec<(MarketDate, f64)> = Vec::with_capacity(bonds.len());
    for bond in bonds {
        if bond.issuer != issuer {
            return Err(TermStructureError::Input(format!(
                "bond {} does not belong to issuer {issuer}",
                bond.id()
            )));
        }
        let target = invoice_price(bond, t0)?;
        let flows = bond.cash_flows(t0)?;
        let objective = |z: f64| {
            let mut trial = knots.clone();
            trial.push((bond.maturity, z));
            let curve = IssuerCurve::new(issuer.clone(), disc.clone(), &trial)
                .expect("knots validated by construction");
            pv_flows(&curve, &flows) - target
        };
        let z = brent(objective, ZETA_BRACKET.0, ZETA_BRACKET.1, 1e-16, 200).map_err(|e| {
            TermStructureError::Calibration {
                instrument: bond.id(),
                reason: e.to_string(),
            }
        })?;
        knots.push((bond.maturity, z));
    }
    IssuerCurve::new(issuer, disc.clone(), &knots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(s: &str) -> MarketDate {
        s.parse().unwrap()
    }

    fn t0() -> MarketDate {
        d("2015-09-14")
    }

    #[test]
    fn defaultable_discount_examples() {
        let disc = DiscountCurve::flat(t0(), 0.0).unwrap();
        let c = IssuerCurve::flat("X", disc.clone(), 0.01).unwrap();
        assert_eq!(defaultable_discount(&c, t0()).unwrap(), 1.0);
        assert_abs_diff_eq!(c.defaultable_df_time(2.0), (-0.02f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.defaultable_df_time(2.0), 0.980199, epsilon = 1e-6);
        let risky = DiscountCurve::flat(t0(), 0.02).unwrap();
        let zero = IssuerCurve::flat("X", risky.clone(), 0.0).unwrap();
        let when = d("2019-01-01");
        assert_abs_diff_eq!(
            defaultable_discount(&zero, when).unwrap(),
            risky.df(when).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn constant_then_linear_then_flat() {
        let disc = DiscountCurve::flat(t0(), 0.0).unwrap();
        let c = IssuerCurve::new("X", disc, &[(d("2016-09-13"), 0.01), (d("2017-09-13"), 0.03)]).unwrap();
        assert_eq!(c.zeta_time(0.2), 0.01);
        assert_abs_diff_eq!(c.zeta_time(1.5), 0.02, epsilon = 1e-15);
        assert_eq!(c.zeta_time(7.0), 0.03);
    }

    #[test]
    fn single_flow_inversion() {
        let disc = DiscountCurve::flat(t0(), 0.01).unwrap();
        let bond = BondSpec::annual("X", d("2017-09-14"), 0.0, t0(), Some(95.0)).unwrap();
        let c = bootstrap_zeta(&[bond], &disc, t0()).unwrap();
        let t = act365(t0(), d("2017-09-14")).unwrap();
        let expected = -(95.0 / (100.0 * disc.df_time(t))).ln() / t;
        assert_abs_diff_eq!(c.knots()[0].1, expected, epsilon = 1e-13);
    }

    #[test]
    fn flat_curve_zero_coupon_prices_face() {
        let disc = DiscountCurve::flat(t0(), 0.0).unwrap();
        let c = IssuerCurve::flat("X", disc, 0.0).unwrap();
        let bond = BondSpec::annual("X", d("2020-09-14"), 0.0, t0(), None).unwrap();
        assert_abs_diff_eq!(price_liquid_bond(&bond, &c).unwrap(), 100.0, epsilon = 1e-12);
    }

    #[test]
    fn bracket_failure_names_the_bond() {
        let disc = DiscountCurve::flat(t0(), 0.0).unwrap();
        // price far above undiscounted flows: needs Z below the bracket
        let bond = BondSpec::annual("X", d("2025-09-14"), 0.01, t0(), Some(400.0)).unwrap();
        match bootstrap_zeta(&[bond], &disc, t0()) {
            Err(TermStructureError::Calibration { instrument, .. }) => {
                assert_eq!(instrument, "X 1 2025-09-14")
            }
            other => panic!("expected calibration error, got {other:?}"),
        }
    }
}
