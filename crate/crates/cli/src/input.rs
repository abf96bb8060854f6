//! Loading the input series and applying the transform chain.

use std::path::Path;

use breakscan::io::{monthly_to_quarterly, read_csv, Aggregation, CsvSpec};
use breakscan::series::{deflate, log_transform, returns, DeflatorBase, ReturnKind};
use breakscan::{Frequency, Period, Stamp, TimeIndex, TimeSeries};
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeflateBase {
    First,
    /// Mean of the deflator over this calendar year.
    Year(i32),
}

impl std::str::FromStr for DeflateBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("first") {
            return Ok(Self::First);
        }
        s.parse::<i32>()
            .map(Self::Year)
            .map_err(|_| format!("expected `first` or a year, got `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ReturnsKind {
    Log,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum QuarterlyHow {
    Mean,
    Last,
}

/// One step of the transform chain, applied in recorded order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Transform {
    Log,
    Deflate { path: String, base: DeflateBase },
    Returns { kind: ReturnsKind },
    Quarterly { how: QuarterlyHow },
    Window { first: String, last: String },
}

/// Where the data come from and how they are transformed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSpec {
    pub path: String,
    pub column: Option<String>,
    pub transforms: Vec<Transform>,
}

impl InputSpec {
    pub fn load(&self) -> Result<TimeSeries, CliError> {
        let spec = CsvSpec {
            value_column: self.column.clone(),
            ..CsvSpec::default()
        };
        let mut series = read_csv(&self.path, &spec).map_err(|e| CliError::reading(&self.path, e))?;
        for t in &self.transforms {
            series = apply(&series, t)?;
        }
        Ok(series)
    }
}

fn apply(s: &TimeSeries, t: &Transform) -> Result<TimeSeries, CliError> {
    Ok(match t {
        Transform::Log => log_transform(s)?,
        Transform::Deflate { path, base } => {
            let deflator = read_csv(Path::new(path), &CsvSpec::default()).map_err(|e| CliError::reading(path, e))?;
            let base = match *base {
                DeflateBase::First => DeflatorBase::FirstPeriod,
                DeflateBase::Year(y) => DeflatorBase::Year(y),
            };
            deflate(s, &deflator, base)?
        }
        Transform::Returns { kind } => returns(
            s,
            match kind {
                ReturnsKind::Log => ReturnKind::LogReturn,
                ReturnsKind::Abs => ReturnKind::AbsLogReturn,
            },
        )?,
        Transform::Quarterly { how } => {
            let how = match how {
                QuarterlyHow::Mean => Aggregation::Mean,
                QuarterlyHow::Last => Aggregation::Last,
            };
            monthly_to_quarterly(s, how)?.series
        }
        Transform::Window { first, last } => {
            let a = parse_stamp(s, first)?;
            let b = parse_stamp(s, last)?;
            s.window(&a, &b)?
        }
    })
}

/// Parse a stamp in the notation matching the series' index:
/// `1898`, `1973(4)` or `1973Q4`, `1973-04` or `1973(4)` for months, ISO dates otherwise.
pub fn parse_stamp(s: &TimeSeries, text: &str) -> Result<Stamp, CliError> {
    let bad = || CliError::Usage(format!("cannot read `{text}` as a time stamp for this series"));
    let text = text.trim();
    match s.index() {
        TimeIndex::Dates(_) => NaiveDate::parse_from_str(text, "%Y-%m-%d")
            .map(Stamp::Date)
            .map_err(|_| bad()),
        TimeIndex::Regular { frequency, .. } => {
            let frequency = *frequency;
            let (year, sub) = match frequency {
                Frequency::Annual => (text.parse::<i32>().map_err(|_| bad())?, 1),
                Frequency::Quarterly | Frequency::Monthly => {
                    let (y, rest) = split_period(text, frequency).ok_or_else(bad)?;
                    (y.parse::<i32>().map_err(|_| bad())?, rest.parse::<u32>().map_err(|_| bad())?)
                }
            };
            if !(1..=frequency.per_year()).contains(&sub) {
                return Err(bad());
            }
            Ok(Stamp::Period {
                frequency,
                period: Period::new(year, sub),
            })
        }
    }
}

fn split_period(text: &str, frequency: Frequency) -> Option<(&str, &str)> {
    if let Some((y, rest)) = text.split_once('(') {
        return Some((y, rest.strip_suffix(')')?));
    }
    match frequency {
        Frequency::Quarterly => text.split_once(['Q', 'q']),
        _ => text.split_once('-'),
    }
}
