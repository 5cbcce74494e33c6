use super::{act365, TermStructureError};
use crate::dates::MarketDate;
use crate::math::brent;
use serde::{Deserialize, Serialize};

/// An OIS quote: maturity date and rate in decimal per annum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OisQuote {
    pub maturity: MarketDate,
    pub rate: f64,
}

/// Risk-free discount factors B(t0, T).
///
/// Log-linear interpolation between knots (the anchor carries B = 1) and
/// flat-forward extrapolation beyond the last knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountCurve {
    anchor: MarketDate,
    dates: Vec<MarketDate>,
    times: Vec<f64>,
    log_dfs: Vec<f64>,
    negative_forwards: bool,
}

impl DiscountCurve {
    /// Builds a curve from explicit knots (strictly increasing, after the anchor).
    pub fn from_knots(
        anchor: MarketDate,
        knots: &[(MarketDate, f64)],
    ) -> Result<Self, TermStructureError> {
        let mut curve = Self::anchored(anchor);
        for &(date, df) in knots {
            curve.push_knot(date, df)?;
        }
        Ok(curve)
    }

    /// Flat continuously-compounded zero rate, one knot per year out to 50y.
    pub fn flat(anchor: MarketDate, rate: f64) -> Result<Self, TermStructureError> {
        let knots = (1..=50)
            .map(|y| {
                let d = anchor.add_years(y)?;
                Ok((d, (-rate * act365(anchor, d)?).exp()))
            })
            .collect::<Result<Vec<_>, TermStructureError>>()?;
        Self::from_knots(anchor, &knots)
    }

    fn anchored(anchor: MarketDate) -> Self {
        Self {
            anchor,
            dates: vec![anchor],
            times: vec![0.0],
            log_dfs: vec![0.0],
            negative_forwards: false,
        }
    }

    fn push_knot(&mut self, date: MarketDate, df: f64) -> Result<(), TermStructureError> {
        let last = *self.dates.last().expect("anchor knot");
        if date <= last {
            return Err(TermStructureError::Input(format!(
                "discount knot {date} is not after {last}"
            )));
        }
        if !(df.is_finite() && df > 0.0) {
            return Err(TermStructureError::Input(format!(
                "discount factor at {date} must be positive, got {df}"
            )));
        }
        let ln = df.ln();
        if ln > *self.log_dfs.last().expect("anchor knot") {
            self.negative_forwards = true;
        }
        self.times.push(act365(self.anchor, date)?);
        self.dates.push(date);
        self.log_dfs.push(ln);
        Ok(())
    }

    pub fn anchor(&self) -> MarketDate {
        self.anchor
    }

    /// Knots excluding the anchor.
    pub fn knots(&self) -> Vec<(MarketDate, f64)> {
        self.dates
            .iter()
            .zip(&self.log_dfs)
            .skip(1)
            .map(|(d, l)| (*d, l.exp()))
            .collect()
    }

    /// True when some knot-to-knot forward rate is negative, i.e. the
    /// discount factors are not monotone.
    pub fn has_negative_forwards(&self) -> bool {
        self.negative_forwards
    }

    pub fn df(&self, date: MarketDate) -> Result<f64, TermStructureError> {
        let t = act365(self.anchor, date)?;
        Ok(self.df_time(t))
    }

    /// Discount factor at `t` years (Act/365) from the anchor.
    pub fn df_time(&self, t: f64) -> f64 {
        self.log_df_time(t).exp()
    }

    fn log_df_time(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= 0.0 {
            return 0.0;
        }
        if n == 1 {
            return 0.0;
        }
        let idx = match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return self.log_dfs[i],
            Err(i) => i,
        };
        let (i0, i1) = if idx >= n { (n - 2, n - 1) } else { (idx - 1, idx) };
        let (t0, t1) = (self.times[i0], self.times[i1]);
        let (l0, l1) = (self.log_dfs[i0], self.log_dfs[i1]);
        l0 + (l1 - l0) * (t - t0) / (t1 - t0)
    }

    /// Continuously-compounded zero rate R(T).
    pub fn zero_rate_time(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.zero_rate_time(1e-8);
        }
        -self.log_df_time(t) / t
    }
}

/// Whether a quote is priced as a single-period simple-rate instrument.
fn is_short_end(t0: MarketDate, maturity: MarketDate) -> Result<bool, TermStructureError> {
    Ok(maturity <= t0.add_years(1)?)
}

/// Fixed-leg payment dates rolled back annually from maturity.
fn fixed_leg_dates(t0: MarketDate, maturity: MarketDate) -> Result<Vec<MarketDate>, TermStructureError> {
    let mut dates = vec![maturity];
    let mut k = 1;
    loop {
        let d = maturity.add_years(-k)?;
        if d <= t0 {
            break;
        }
        dates.push(d);
        k += 1;
    }
    dates.reverse();
    Ok(dates)
}

/// Par residual of an OIS quote against `curve` (per unit notional).
pub(crate) fn ois_par_residual(
    curve: &DiscountCurve,
    quote: &OisQuote,
) -> Result<f64, TermStructureError> {
    let t0 = curve.anchor();
    if is_short_end(t0, quote.maturity)? {
        let tau = act365(t0, quote.maturity)?;
        return Ok(curve.df(quote.maturity)? * (1.0 + quote.rate * tau) - 1.0);
    }
    let mut annuity = 0.0;
    let mut prev = t0;
    for d in fixed_leg_dates(t0, quote.maturity)? {
        annuity += (act365(prev, d)?) * curve.df(d)?;
        prev = d;
    }
    Ok(quote.rate * annuity + curve.df(quote.maturity)? - 1.0)
}

impl DiscountCurve {
    /// Residuals of every quote repriced on this curve.
    pub fn par_residuals(&self, quotes: &[OisQuote]) -> Result<Vec<f64>, TermStructureError> {
        quotes.iter().map(|q| ois_par_residual(self, q)).collect()
    }
}

/// Sequential bootstrap of OIS quotes into a discount curve.
///
/// Quotes up to one year are simple-rate single-period deposits; longer
/// quotes are par swaps with annual Act/365 fixed legs against a floating
/// leg worth 1 - B(t0, T).
pub fn bootstrap_discount(
    quotes: &[OisQuote],
    t0: MarketDate,
) -> Result<DiscountCurve, TermStructureError> {
    if quotes.is_empty() {
        return Err(TermStructureError::Input("no OIS quotes".into()));
    }
    for w in quotes.windows(2) {
        if w[1].maturity <= w[0].maturity {
            return Err(TermStructureError::Input(format!(
                "OIS quotes must have strictly increasing maturities ({} then {})",
                w[0].maturity, w[1].maturity
            )));
        }
    }
    let mut curve = DiscountCurve::anchored(t0);
    for q in quotes {
        if !q.rate.is_finite() {
            return Err(TermStructureError::Input(format!("non-finite OIS rate at {}", q.maturity)));
        }
        if q.maturity <= t0 {
            return Err(TermStructureError::Input(format!(
                "OIS maturity {} is not after the anchor {t0}",
                q.maturity
            )));
        }
        let t = act365(t0, q.maturity)?;
        let solve = |zero: f64| -> Result<f64, TermStructureError> {
            let mut trial = curve.clone();
            trial.push_knot(q.maturity, (-zero * t).exp())?;
            ois_par_residual(&trial, q)
        };
        let zero = if is_short_end(t0, q.maturity)? {
            (1.0 + q.rate * t).ln() / t
        } else {
            let mut failure = None;
            let root = brent(
                |z| match solve(z) {
                    Ok(v) => v,
                    Err(e) => {
                        failure = Some(e);
                        f64::NAN
                    }
                },
                -0.5,
                1.0,
                1e-16,
                200,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            root.map_err(|e| TermStructureError::Calibration {
                instrument: format!("OIS {}", q.maturity),
                reason: e.to_string(),
            })?
        };
        curve.push_knot(q.maturity, (-zero * t).exp())?;
    }
    Ok(curve)
}
