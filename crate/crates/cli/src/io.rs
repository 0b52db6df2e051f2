//! CSV ingestion and emission.
//!
//! Input files carry a header and at least two columns: a time stamp (ISO
//! `YYYY-MM-DD` date or integer index) and one or more numeric columns.
//! Numbers are written rounded to 12 significant digits in their shortest
//! decimal form, so a written file re-ingests to exactly the values it shows.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use l1trend_core::{CalendarDate, Series, Stamp};

use crate::error::{CliError, CliResult};

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

/// Shortest decimal text of `round12(v)`.
pub fn format_number(v: f64) -> String {
    format!("{:?}", round12(v))
}

pub fn parse_stamp(text: &str) -> Option<Stamp> {
    if let Ok(i) = text.parse::<i64>() {
        return Some(Stamp::Index(i));
    }
    let d = NaiveDate::parse_from_str(text, "%Y-%m-%d").ok()?;
    Some(Stamp::Date(CalendarDate {
        year: d.year(),
        month: d.month() as u8,
        day: d.day() as u8,
    }))
}

fn same_kind(a: &Stamp, b: &Stamp) -> bool {
    matches!((a, b), (Stamp::Index(_), Stamp::Index(_)) | (Stamp::Date(_), Stamp::Date(_)))
}

/// Reads one numeric column (by header name, default the second column).
pub fn ingest_csv(path: &Path, column: Option<&str>) -> CliResult<Series> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers().map_err(|e| CliError::io(path, e))?.clone();
    if headers.len() < 2 {
        return Err(CliError::data(format!(
            "{}: header must name a time column and a value column",
            path.display()
        )));
    }
    let col = match column {
        None => 1,
        Some(name) => headers.iter().position(|h| h == name).ok_or_else(|| {
            CliError::data(format!("{}: no column named `{name}`", path.display()))
        })?,
    };

    let mut times: Vec<Stamp> = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::io(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let fail = |msg: String| CliError::data(format!("{}:{line}: {msg}", path.display()));
        let stamp_text = record.get(0).unwrap_or("");
        let stamp = parse_stamp(stamp_text)
            .ok_or_else(|| fail(format!("cannot parse time stamp `{stamp_text}`")))?;
        let text = record.get(col).unwrap_or("");
        if text.is_empty() {
            return Err(fail("missing value".into()));
        }
        let value: f64 = text.parse().map_err(|_| fail(format!("cannot parse value `{text}`")))?;
        if !value.is_finite() {
            return Err(fail(format!("non-finite value `{text}`")));
        }
        if let Some(prev) = times.last() {
            if !same_kind(prev, &stamp) {
                return Err(fail("mixes dates and integer indices".into()));
            }
            if *prev == stamp {
                return Err(fail(format!("duplicate time stamp {stamp}")));
            }
            if *prev > stamp {
                return Err(fail(format!("time stamp {stamp} is not after {prev}")));
            }
        }
        times.push(stamp);
        values.push(value);
    }
    if values.is_empty() {
        return Err(CliError::data(format!("{}: no data rows", path.display())));
    }
    Ok(Series::new(times, values)?)
}

/// Writes `header` then one row per stamp.
pub fn write_csv(path: &Path, header: &[&str], stamps: &[Stamp], columns: &[&[f64]]) -> CliResult<()> {
    let mut file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = String::with_capacity(stamps.len() * 16 * (columns.len() + 1));
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, stamp) in stamps.iter().enumerate() {
        out.push_str(&stamp.to_string());
        for c in columns {
            out.push(',');
            out.push_str(&format_number(c[i]));
        }
        out.push('\n');
    }
    file.write_all(out.as_bytes()).map_err(|e| CliError::io(path, e))
}

/// Writes a JSON document to `path`, or to stdout.
pub fn write_report<T: serde::Serialize>(path: Option<&Path>, report: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(report).expect("reports serialise");
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::data(format!("stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(format_number(101.5), "101.5");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.0 / 3.0 * 1e-20), "6.66666666667e-21");
        assert_eq!(format_number(0.0), "0.0");
        let x = 123456.789012345;
        assert_eq!(round12(round12(x)), round12(x));
    }

    #[test]
    fn stamps() {
        assert_eq!(parse_stamp("7"), Some(Stamp::Index(7)));
        assert_eq!(
            parse_stamp("2011-01-03"),
            Some(Stamp::Date(CalendarDate { year: 2011, month: 1, day: 3 }))
        );
        assert_eq!(parse_stamp("2011-02-30"), None);
        assert_eq!(parse_stamp("x"), None);
    }
}
