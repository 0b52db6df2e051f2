//! Time-indexed real series.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Proleptic Gregorian calendar day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CalendarDate {
    pub year: i32,
    pub month: u8,
    pub day: u8,
}

impl fmt::Display for CalendarDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// A sample position: either an integer index or a calendar date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stamp {
    Index(i64),
    Date(CalendarDate),
}

impl fmt::Display for Stamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stamp::Index(i) => write!(f, "{i}"),
            Stamp::Date(d) => d.fmt(f),
        }
    }
}

/// Observations `y_t` on strictly increasing stamps, with no gaps in the values.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    times: Vec<Stamp>,
    values: Vec<f64>,
}

impl Series {
    /// Minimum number of samples any filter accepts.
    pub const MIN_LEN: usize = 3;

    pub fn new(times: Vec<Stamp>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        for (i, w) in times.windows(2).enumerate() {
            let ordered = match (w[0], w[1]) {
                (Stamp::Index(a), Stamp::Index(b)) => a < b,
                (Stamp::Date(a), Stamp::Date(b)) => a < b,
                _ => false,
            };
            if !ordered {
                return Err(Error::NonMonotoneTime { index: i + 1 });
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "must be finite",
            });
        }
        Ok(Self { times, values })
    }

    /// Series on the integer index `0..values.len()`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let times = (0..values.len() as i64).map(Stamp::Index).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[Stamp] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fails unless the series is long enough to be filtered.
    pub fn require_filterable(&self) -> Result<()> {
        if self.len() < Self::MIN_LEN {
            return Err(Error::LengthTooSmall {
                len: self.len(),
                min: Self::MIN_LEN,
            });
        }
        Ok(())
    }

    pub fn into_parts(self) -> (Vec<Stamp>, Vec<f64>) {
        (self.times, self.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_duplicate_stamp() {
        let t = vec![Stamp::Index(0), Stamp::Index(1), Stamp::Index(1)];
        let err = Series::new(t, vec![1.0, 2.0, 3.0]).unwrap_err();
        assert_eq!(err, Error::NonMonotoneTime { index: 2 });
    }

    #[test]
    fn rejects_mixed_stamp_kinds() {
        let d = CalendarDate { year: 2011, month: 1, day: 3 };
        let t = vec![Stamp::Index(0), Stamp::Date(d)];
        assert!(Series::new(t, vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn dates_order_lexicographically() {
        let a = CalendarDate { year: 2010, month: 12, day: 31 };
        let b = CalendarDate { year: 2011, month: 1, day: 3 };
        let s = Series::new(vec![Stamp::Date(a), Stamp::Date(b)], vec![1.0, 2.0]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.require_filterable().is_err());
    }
}
