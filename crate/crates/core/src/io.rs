//! CSV ingestion and export, frequency conversion and bundled datasets.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{deflate, log_transform, DeflatorBase, Frequency, Period, Stamp, TimeIndex, TimeSeries};

/// Frequency of a CSV file's rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsvFrequency {
    Annual,
    Quarterly,
    Monthly,
    /// Explicit dates, one per row.
    Daily,
}

impl CsvFrequency {
    fn regular(self) -> Option<Frequency> {
        match self {
            Self::Annual => Some(Frequency::Annual),
            Self::Quarterly => Some(Frequency::Quarterly),
            Self::Monthly => Some(Frequency::Monthly),
            Self::Daily => None,
        }
    }
}

/// Layout of a CSV time-series file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSpec {
    pub date_column: String,
    /// Defaults to the second column.
    pub value_column: Option<String>,
    /// Inferred from the date spacing when absent.
    pub frequency: Option<CsvFrequency>,
    pub missing_markers: Vec<String>,
}

impl Default for CsvSpec {
    fn default() -> Self {
        Self {
            date_column: "DATE".into(),
            value_column: None,
            frequency: None,
            missing_markers: vec![".".into(), "NA".into(), String::new()],
        }
    }
}

fn months_since_epoch(d: NaiveDate) -> i64 {
    i64::from(d.year()) * 12 + i64::from(d.month0())
}

/// Guess the frequency from the spacing of the dates.
pub fn infer_frequency(dates: &[NaiveDate]) -> CsvFrequency {
    if dates.len() < 2 || dates.iter().any(|d| d.day() != 1) {
        return CsvFrequency::Daily;
    }
    let step = months_since_epoch(dates[1]) - months_since_epoch(dates[0]);
    let mostly = |k: i64| {
        let hits = dates
            .windows(2)
            .filter(|w| months_since_epoch(w[1]) - months_since_epoch(w[0]) == k)
            .count();
        2 * hits >= dates.len() - 1
    };
    match step {
        12 if mostly(12) => CsvFrequency::Annual,
        3 if mostly(3) => CsvFrequency::Quarterly,
        1 if mostly(1) => CsvFrequency::Monthly,
        _ => CsvFrequency::Daily,
    }
}

pub fn read_csv(path: impl AsRef<Path>, spec: &CsvSpec) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let s = parse_csv(file, spec)?;
    Ok(if s.label().is_empty() { s.with_label(label) } else { s })
}

/// Parse a headed CSV with an ISO-8601 date column and a numeric value column.
///
/// Rows holding a missing marker are dropped at either end of the file; a missing
/// value between two observations is an error.
pub fn parse_csv<R: Read>(reader: R, spec: &CsvSpec) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let date_col = find(&spec.date_column)
        .or_else(|| (spec.date_column == "DATE").then(|| find("observation_date")).flatten())
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("no date column named {:?}", spec.date_column),
        })?;
    let value_col = match &spec.value_column {
        Some(name) => find(name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("no value column named {name:?}"),
        })?,
        None => (0..headers.len()).find(|&i| i != date_col).ok_or_else(|| Error::Parse {
            line: 1,
            message: "file has no value column".into(),
        })?,
    };
    let label = headers.get(value_col).unwrap_or_default().to_string();

    let mut rows: Vec<(NaiveDate, Option<f64>)> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<&str> {
            record.get(i).ok_or_else(|| Error::Parse {
                line,
                message: format!("row has {} fields", record.len()),
            })
        };
        let date_text = field(date_col)?;
        let date = NaiveDate::parse_from_str(date_text, "%Y-%m-%d").map_err(|e| Error::Parse {
            line,
            message: format!("bad date {date_text:?}: {e}"),
        })?;
        let raw = field(value_col)?;
        let value = if spec.missing_markers.iter().any(|m| m == raw) {
            None
        } else {
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad number {raw:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite value {raw:?}"),
                });
            }
            Some(v)
        };
        rows.push((date, value));
    }

    if let Some(w) = rows.windows(2).find(|w| w[0].0 >= w[1].0) {
        return Err(Error::Parse {
            line: 0,
            message: format!("dates not increasing at {}", w[1].0),
        });
    }
    let first = rows.iter().position(|r| r.1.is_some()).ok_or(Error::Empty)?;
    let last = rows.iter().rposition(|r| r.1.is_some()).expect("has a value");
    let rows = &rows[first..=last];
    if let Some((d, _)) = rows.iter().find(|r| r.1.is_none()) {
        return Err(Error::Gap {
            date: d.format("%Y-%m-%d").to_string(),
        });
    }
    let dates: Vec<NaiveDate> = rows.iter().map(|r| r.0).collect();
    let values: Vec<f64> = rows.iter().map(|r| r.1.expect("checked")).collect();

    let freq = spec.frequency.unwrap_or_else(|| infer_frequency(&dates));
    let index = match freq.regular() {
        None => TimeIndex::Dates(dates),
        Some(f) => {
            let start = f.period_of(dates[0]);
            for (k, d) in dates.iter().enumerate() {
                let expected = start.offset(f, k as i64);
                if f.period_of(*d) != expected {
                    return Err(Error::Gap {
                        date: Stamp::Period {
                            frequency: f,
                            period: expected,
                        }
                        .to_string(),
                    });
                }
            }
            TimeIndex::Regular { frequency: f, start }
        }
    };
    TimeSeries::new(values, index, label)
}

/// Write `DATE,<label>` rows with ISO dates (first day of each period).
pub fn write_csv_to<W: Write>(writer: W, s: &TimeSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let label = if s.label().is_empty() { "VALUE" } else { s.label() };
    w.write_record(["DATE", label])?;
    for (stamp, v) in s.stamps().zip(s.values()) {
        w.write_record([stamp.first_day().format("%Y-%m-%d").to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(path: impl AsRef<Path>, s: &TimeSeries) -> Result<()> {
    write_csv_to(File::create(path)?, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Mean,
    Last,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregated {
    pub series: TimeSeries,
    /// Months in incomplete leading or trailing quarters.
    pub dropped_months: usize,
}

/// Aggregate a monthly series to complete calendar quarters.
pub fn monthly_to_quarterly(s: &TimeSeries, how: Aggregation) -> Result<Aggregated> {
    let TimeIndex::Regular {
        frequency: Frequency::Monthly,
        start,
    } = *s.index()
    else {
        return Err(Error::IncompatibleIndex("monthly input required".into()));
    };
    let lead = ((3 - (start.sub - 1) % 3) % 3) as usize;
    let full = (s.len().saturating_sub(lead)) / 3;
    if full == 0 {
        return Err(Error::InsufficientData {
            needed: 3 + lead,
            found: s.len(),
        });
    }
    let dropped = s.len() - 3 * full;
    if dropped > 0 {
        log::warn!("monthly_to_quarterly: dropped {dropped} months outside complete quarters");
    }
    let values: Vec<f64> = s.values()[lead..lead + 3 * full]
        .chunks_exact(3)
        .map(|q| match how {
            Aggregation::Mean => q.iter().sum::<f64>() / 3.0,
            Aggregation::Last => q[2],
        })
        .collect();
    let first_month = start.offset(Frequency::Monthly, lead as i64);
    let quarter = Period::new(first_month.year, (first_month.sub - 1) / 3 + 1);
    Ok(Aggregated {
        series: TimeSeries::regular(values, Frequency::Quarterly, quarter, s.label())?,
        dropped_months: dropped,
    })
}

/// Bundled datasets under a fixtures directory.
pub mod fixtures {
    use super::*;

    pub const NILE: &str = "nile.csv";
    pub const OILPRICE: &str = "oilprice_raw.csv";
    pub const GDPDEF: &str = "gdpdef.csv";

    /// `$BREAKSCAN_FIXTURES`, or `fixtures/` in the current directory.
    pub fn default_dir() -> PathBuf {
        std::env::var_os("BREAKSCAN_FIXTURES")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("fixtures"))
    }

    /// Annual Nile flow at Aswan, 1871–1970.
    pub fn nile(dir: &Path) -> Result<TimeSeries> {
        read_csv(dir.join(NILE), &CsvSpec::default())
    }

    /// Log real WTI price: monthly spot price averaged to quarters, deflated by the
    /// GDP deflator rebased to 2009 = 1, restricted to 1947(1)–2013(3).
    pub fn wti_log_real(dir: &Path) -> Result<TimeSeries> {
        let monthly = read_csv(dir.join(OILPRICE), &CsvSpec::default())?;
        let quarterly = match monthly.frequency() {
            Some(Frequency::Monthly) => monthly_to_quarterly(&monthly, Aggregation::Mean)?.series,
            _ => monthly,
        };
        let deflator = read_csv(dir.join(GDPDEF), &CsvSpec::default())?;
        let real = deflate(&quarterly, &deflator, DeflatorBase::Year(2009))?;
        let q = |y, s| Stamp::Period {
            frequency: Frequency::Quarterly,
            period: Period::new(y, s),
        };
        let window = real.window(&q(1947, 1), &q(2013, 3))?;
        log_transform(&window).map(|s| s.with_label("log real WTI"))
    }
}
