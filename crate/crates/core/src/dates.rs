//! Calendar dates, business-day shifts and day-count conventions.

use chrono::{Datelike, Months, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DateError {
    #[error("invalid date {0}")]
    Invalid(String),
    #[error("start date {start} is after end date {end}")]
    Ordering { start: MarketDate, end: MarketDate },
    #[error("date arithmetic overflow")]
    Overflow,
}

/// A Gregorian calendar date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MarketDate(NaiveDate);

impl MarketDate {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Result<Self, DateError> {
        NaiveDate::from_ymd_opt(year, month, day)
            .map(Self)
            .ok_or_else(|| DateError::Invalid(format!("{year:04}-{month:02}-{day:02}")))
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    pub fn month(&self) -> u32 {
        self.0.month()
    }

    pub fn day(&self) -> u32 {
        self.0.day()
    }

    /// Signed number of calendar days from `self` to `other`.
    pub fn days_until(&self, other: MarketDate) -> i64 {
        (other.0 - self.0).num_days()
    }

    pub fn add_days(&self, days: i64) -> Result<Self, DateError> {
        self.0
            .checked_add_signed(chrono::Duration::days(days))
            .map(Self)
            .ok_or(DateError::Overflow)
    }

    /// Calendar month advance; the day is clamped to the end of the target month.
    pub fn add_months(&self, months: i32) -> Result<Self, DateError> {
        let shifted = if months >= 0 {
            self.0.checked_add_months(Months::new(months as u32))
        } else {
            self.0.checked_sub_months(Months::new(months.unsigned_abs()))
        };
        shifted.map(Self).ok_or(DateError::Overflow)
    }

    pub fn add_years(&self, years: i32) -> Result<Self, DateError> {
        self.add_months(years * 12)
    }

    pub fn is_weekend(&self) -> bool {
        matches!(self.0.weekday(), Weekday::Sat | Weekday::Sun)
    }

    /// Advances by `n` business days, skipping Saturdays and Sundays only.
    pub fn add_business_days(&self, n: u32) -> Result<Self, DateError> {
        let mut d = *self;
        let mut left = n;
        while left > 0 {
            d = d.add_days(1)?;
            if !d.is_weekend() {
                left -= 1;
            }
        }
        Ok(d)
    }
}

impl fmt::Display for MarketDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%d"))
    }
}

impl FromStr for MarketDate {
    type Err = DateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
            .map(Self)
            .map_err(|_| DateError::Invalid(s.to_string()))
    }
}

impl TryFrom<String> for MarketDate {
    type Error = DateError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<MarketDate> for String {
    fn from(d: MarketDate) -> Self {
        d.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DayCount {
    /// Actual days / 365.
    Act365,
    /// Actual/Actual ISMA with annual reference periods ending at the end date.
    ActAct,
}

impl DayCount {
    pub fn year_fraction(&self, start: MarketDate, end: MarketDate) -> Result<f64, DateError> {
        year_fraction(start, end, *self)
    }
}

pub fn year_fraction(start: MarketDate, end: MarketDate, dc: DayCount) -> Result<f64, DateError> {
    if start > end {
        return Err(DateError::Ordering { start, end });
    }
    match dc {
        DayCount::Act365 => Ok(start.days_until(end) as f64 / 365.0),
        DayCount::ActAct => {
            // Whole annual periods rolled back from `end`, then the stub
            // measured against the length of its own reference year.
            let mut whole = 0;
            let mut anchor = end;
            loop {
                let prev = anchor.add_years(-1)?;
                if prev < start {
                    break;
                }
                whole += 1;
                anchor = prev;
            }
            let reference_start = anchor.add_years(-1)?;
            let stub = start.days_until(anchor) as f64 / reference_start.days_until(anchor) as f64;
            Ok(whole as f64 + stub)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(s: &str) -> MarketDate {
        s.parse().unwrap()
    }

    #[test]
    fn act365_examples() {
        let t0 = d("2015-09-14");
        assert_eq!(year_fraction(t0, t0, DayCount::Act365).unwrap(), 0.0);
        assert_abs_diff_eq!(
            year_fraction(t0, d("2016-09-14"), DayCount::Act365).unwrap(),
            366.0 / 365.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            year_fraction(t0, d("2015-09-28"), DayCount::Act365).unwrap(),
            14.0 / 365.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn ordering_error() {
        let err = year_fraction(d("2016-01-01"), d("2015-01-01"), DayCount::Act365).unwrap_err();
        assert!(matches!(err, DateError::Ordering { .. }));
    }

    #[test]
    fn actact_full_periods_are_whole_years() {
        assert_eq!(
            year_fraction(d("2015-09-14"), d("2016-09-14"), DayCount::ActAct).unwrap(),
            1.0
        );
        assert_eq!(
            year_fraction(d("2014-11-27"), d("2017-11-27"), DayCount::ActAct).unwrap(),
            3.0
        );
        let stub = year_fraction(d("2014-11-27"), d("2015-09-14"), DayCount::ActAct).unwrap();
        // reference year 2014-09-14 .. 2015-09-14
        assert_abs_diff_eq!(stub, 291.0 / 365.0, epsilon = 1e-15);
    }

    #[test]
    fn settlement_is_two_business_days_after_value_date() {
        // Thursday 10-Sep-2015 -> Monday 14-Sep-2015
        assert_eq!(d("2015-09-10").add_business_days(2).unwrap(), d("2015-09-14"));
        assert_eq!(d("2015-09-11").add_business_days(1).unwrap(), d("2015-09-14"));
    }

    #[test]
    fn month_advance_clamps() {
        assert_eq!(d("2015-09-14").add_months(2).unwrap(), d("2015-11-14"));
        assert_eq!(d("2016-01-31").add_months(1).unwrap(), d("2016-02-29"));
        assert_eq!(d("2016-02-29").add_years(-1).unwrap(), d("2015-02-28"));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("2015-13-01".parse::<MarketDate>().is_err());
        assert!("10/09/2015".parse::<MarketDate>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn act365_additive(a in 0i64..4000, b in 0i64..4000, c in 0i64..4000) {
            let mut v = [a, b, c];
            v.sort();
            let base = d("2010-01-01");
            let (x, y, z) = (base.add_days(v[0]).unwrap(), base.add_days(v[1]).unwrap(), base.add_days(v[2]).unwrap());
            let lhs = year_fraction(x, z, DayCount::Act365).unwrap();
            let rhs = year_fraction(x, y, DayCount::Act365).unwrap() + year_fraction(y, z, DayCount::Act365).unwrap();
            proptest::prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
