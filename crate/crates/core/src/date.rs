//! Day-resolution dates stored as days since 1970-01-01.

use std::fmt;

use chrono::{Datelike, Months, NaiveDate};

/// A calendar day, counted from 1970-01-01. [`Day::UNDATED`] marks nodes with
/// no known publication date; it compares below every real date.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Day(pub i32);

const EPOCH_CE_DAYS: i32 = 719_163;

impl Day {
    pub const UNDATED: Day = Day(i32::MIN);

    pub fn from_ymd(year: i32, month: u32, day: u32) -> Option<Day> {
        NaiveDate::from_ymd_opt(year, month, day).map(Day::from_naive)
    }

    pub fn from_naive(date: NaiveDate) -> Day {
        Day(date.num_days_from_ce() - EPOCH_CE_DAYS)
    }

    /// Parses a strict `YYYY-MM-DD` string.
    pub fn parse(text: &str) -> Option<Day> {
        let b = text.as_bytes();
        if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
            return None;
        }
        let num = |r: std::ops::Range<usize>| -> Option<u32> {
            b[r].iter().try_fold(0u32, |acc, &c| {
                c.is_ascii_digit().then(|| acc * 10 + u32::from(c - b'0'))
            })
        };
        Day::from_ymd(num(0..4)? as i32, num(5..7)?, num(8..10)?)
    }

    pub fn is_dated(self) -> bool {
        self != Day::UNDATED
    }

    pub fn to_naive(self) -> Option<NaiveDate> {
        if !self.is_dated() {
            return None;
        }
        NaiveDate::from_num_days_from_ce_opt(self.0.checked_add(EPOCH_CE_DAYS)?)
    }

    pub fn year(self) -> Option<i32> {
        self.to_naive().map(|d| d.year())
    }

    /// Last day of the given calendar year.
    pub fn end_of_year(year: i32) -> Day {
        Day::from_ymd(year, 12, 31).expect("valid year")
    }

    /// Same month and day `years` later; Feb 29 clamps to Feb 28.
    pub fn add_years(self, years: u32) -> Option<Day> {
        let date = self.to_naive()?;
        date.checked_add_months(Months::new(years * 12)).map(Day::from_naive)
    }
}

impl fmt::Display for Day {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_naive() {
            Some(d) => write!(f, "{}", d.format("%Y-%m-%d")),
            None => Ok(()),
        }
    }
}
