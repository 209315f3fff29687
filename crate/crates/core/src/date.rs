//! Whole-day calendar arithmetic.
//!
//! Dates are held as days since 1970-01-01 so that every difference is an
//! exact integer number of days.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).unwrap()
}

/// A calendar date as days since the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Day(pub i32);

impl Day {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Option<Day> {
        NaiveDate::from_ymd_opt(year, month, day).map(Day::from)
    }

    /// Parses the `M/D/YY` column headers of the JHU time-series files.
    pub fn parse_mdy(s: &str) -> Result<Day, Error> {
        let bad = || Error::BadDate(s.to_string());
        let mut parts = s.trim().split('/');
        let (m, d, y) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(m), Some(d), Some(y), None) => (m, d, y),
            _ => return Err(bad()),
        };
        let m: u32 = m.parse().map_err(|_| bad())?;
        let d: u32 = d.parse().map_err(|_| bad())?;
        let y: i32 = y.parse().map_err(|_| bad())?;
        let y = if y < 100 { 2000 + y } else { y };
        Day::from_ymd(y, m, d).ok_or_else(bad)
    }

    pub fn to_naive(self) -> NaiveDate {
        epoch() + chrono::Duration::days(self.0 as i64)
    }

    /// `M/D/YY`, the inverse of [`Day::parse_mdy`].
    pub fn to_mdy(self) -> String {
        let d = self.to_naive();
        format!("{}/{}/{:02}", d.month(), d.day(), d.year() % 100)
    }

    pub fn day_of_month(self) -> u32 {
        use chrono::Datelike;
        self.to_naive().day()
    }

    /// Signed whole days from `earlier` to `self`.
    pub fn days_since(self, earlier: Day) -> i32 {
        self.0 - earlier.0
    }
}

impl From<NaiveDate> for Day {
    fn from(d: NaiveDate) -> Self {
        Day((d - epoch()).num_days() as i32)
    }
}

impl FromStr for Day {
    type Err = Error;

    /// ISO-8601 `YYYY-MM-DD`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
            .map(Day::from)
            .map_err(|_| Error::BadDate(s.to_string()))
    }
}

impl fmt::Display for Day {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_naive().format("%Y-%m-%d"))
    }
}

impl Add<i32> for Day {
    type Output = Day;
    fn add(self, rhs: i32) -> Day {
        Day(self.0 + rhs)
    }
}

impl Sub<i32> for Day {
    type Output = Day;
    fn sub(self, rhs: i32) -> Day {
        Day(self.0 - rhs)
    }
}

impl Sub<Day> for Day {
    type Output = i32;
    fn sub(self, rhs: Day) -> i32 {
        self.days_since(rhs)
    }
}

impl Serialize for Day {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Day {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
