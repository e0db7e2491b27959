//! Calendar months (`YYYY-MM`), the time unit for graphs and spectra.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MonthError {
    #[error("invalid month `{0}`: expected YYYY-MM")]
    Invalid(String),
    #[error("invalid month range `{0}`: start is after end")]
    EmptyRange(String),
    #[error("timestamp {0} is out of range")]
    Timestamp(i64),
}

/// A calendar month such as `2016-01`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(try_from = "String", into = "String")]
pub struct Month {
    year: i32,
    month: u32,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Result<Self, MonthError> {
        if !(1..=12).contains(&month) || !(1..=9999).contains(&year) {
            return Err(MonthError::Invalid(format!("{year:04}-{month:02}")));
        }
        Ok(Month { year, month })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u32 {
        self.month
    }

    /// The month following this one.
    pub fn next(&self) -> Self {
        if self.month == 12 {
            Month { year: self.year + 1, month: 1 }
        } else {
            Month { year: self.year, month: self.month + 1 }
        }
    }

    /// Calendar month containing a unix timestamp (UTC seconds).
    pub fn from_timestamp(secs: i64) -> Result<Self, MonthError> {
        let dt = DateTime::from_timestamp(secs, 0).ok_or(MonthError::Timestamp(secs))?;
        Month::new(dt.year(), dt.month())
    }

    /// Inclusive range of consecutive months.
    pub fn range(start: Month, end: Month) -> Result<Vec<Month>, MonthError> {
        if start > end {
            return Err(MonthError::EmptyRange(format!("{start}..{end}")));
        }
        let mut months = Vec::new();
        let mut cur = start;
        while cur <= end {
            months.push(cur);
            cur = cur.next();
        }
        Ok(months)
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Month {
    type Err = MonthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MonthError::Invalid(s.to_string());
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        Month::new(year, month).map_err(|_| bad())
    }
}

impl TryFrom<String> for Month {
    type Error = MonthError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Month> for String {
    fn from(m: Month) -> String {
        m.to_string()
    }
}

/// Parse a month selection: a single month (`2016-01`), an inclusive range
/// (`2016-01..2016-09`), or a comma-separated list.
pub fn parse_month_spec(spec: &str) -> Result<Vec<Month>, MonthError> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once("..") {
        return Month::range(a.trim().parse()?, b.trim().parse()?);
    }
    let mut months: Vec<Month> = Vec::new();
    for part in spec.split(',') {
        let m: Month = part.trim().parse()?;
        if !months.contains(&m) {
            months.push(m);
        }
    }
    months.sort();
    Ok(months)
}
