//! Submission-interval calendar: contiguous, equal-length intervals of
//! trading days, with the quarterly grouping used for quarterly rankings.

use crate::error::{Error, Result};
use std::ops::Range;

/// Partition of `n_intervals * days_per_interval` trading days into
/// contiguous submission intervals. Day and interval indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalCalendar {
    n_intervals: usize,
    days_per_interval: usize,
}

impl IntervalCalendar {
    pub fn new(n_intervals: usize, days_per_interval: usize) -> Result<Self> {
        if n_intervals == 0 || days_per_interval == 0 {
            return Err(Error::Parameter(
                "calendar requires at least one interval of at least one day".into(),
            ));
        }
        Ok(Self { n_intervals, days_per_interval })
    }

    /// 12 intervals of 20 trading days: the competition-year layout.
    pub fn competition_year(days_per_interval: usize) -> Result<Self> {
        Self::new(12, days_per_interval)
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    pub fn days_per_interval(&self) -> usize {
        self.days_per_interval
    }

    pub fn n_days(&self) -> usize {
        self.n_intervals * self.days_per_interval
    }

    /// Interval containing day `t`.
    pub fn interval_of(&self, t: usize) -> usize {
        debug_assert!(t < self.n_days());
        t / self.days_per_interval
    }

    /// Day range of interval `m`.
    pub fn days(&self, m: usize) -> Range<usize> {
        debug_assert!(m < self.n_intervals);
        m * self.days_per_interval..(m + 1) * self.days_per_interval
    }

    /// Day range of intervals `m1..=m2` (inclusive).
    pub fn days_through(&self, m1: usize, m2: usize) -> Range<usize> {
        debug_assert!(m1 <= m2 && m2 < self.n_intervals);
        m1 * self.days_per_interval..(m2 + 1) * self.days_per_interval
    }

    /// Number of quarters (groups of 3 intervals); only the 12-interval
    /// competition calendar has them.
    pub fn n_quarters(&self) -> usize {
        if self.n_intervals == 12 {
            4
        } else {
            0
        }
    }

    /// Day range of quarter `q` (intervals 3q..3q+3).
    pub fn quarter_days(&self, q: usize) -> Range<usize> {
        debug_assert!(q < self.n_quarters());
        self.days_through(3 * q, 3 * q + 2)
    }
}
