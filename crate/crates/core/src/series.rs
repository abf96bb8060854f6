//! Time-series value type, calendar index and elementwise transforms.

use std::fmt;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling frequency of a regularly spaced series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Annual,
    Quarterly,
    Monthly,
}

impl Frequency {
    pub const fn per_year(self) -> u32 {
        match self {
            Self::Annual => 1,
            Self::Quarterly => 4,
            Self::Monthly => 12,
        }
    }

    /// Period containing a calendar date.
    pub fn period_of(self, date: NaiveDate) -> Period {
        let months_per_period = 12 / self.per_year();
        Period {
            year: date.year(),
            sub: (date.month0() / months_per_period) + 1,
        }
    }
}

/// A (year, sub-period) pair; `sub` runs from 1 to the frequency's periods per year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Period {
    pub year: i32,
    pub sub: u32,
}

impl Period {
    pub const fn new(year: i32, sub: u32) -> Self {
        Self { year, sub }
    }

    fn ordinal(self, frequency: Frequency) -> i64 {
        i64::from(self.year) * i64::from(frequency.per_year()) + i64::from(self.sub) - 1
    }

    fn from_ordinal(ordinal: i64, frequency: Frequency) -> Self {
        let per = i64::from(frequency.per_year());
        Self {
            year: ordinal.div_euclid(per) as i32,
            sub: (ordinal.rem_euclid(per) + 1) as u32,
        }
    }

    /// The period `steps` periods after this one.
    pub fn offset(self, frequency: Frequency, steps: i64) -> Self {
        Self::from_ordinal(self.ordinal(frequency) + steps, frequency)
    }

    /// Number of periods from `self` to `other` (negative if `other` is earlier).
    pub fn periods_until(self, other: Self, frequency: Frequency) -> i64 {
        other.ordinal(frequency) - self.ordinal(frequency)
    }

    pub fn first_day(self, frequency: Frequency) -> NaiveDate {
        let month = (self.sub - 1) * (12 / frequency.per_year()) + 1;
        NaiveDate::from_ymd_opt(self.year, month, 1).expect("period maps to a valid date")
    }

    fn is_valid(self, frequency: Frequency) -> bool {
        (1..=frequency.per_year()).contains(&self.sub)
    }
}

/// Time stamps attached to the observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeIndex {
    /// Equally spaced periods starting at `start`.
    Regular { frequency: Frequency, start: Period },
    /// One explicit calendar date per observation (daily data).
    Dates(Vec<NaiveDate>),
}

/// The stamp of a single observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stamp {
    Period { frequency: Frequency, period: Period },
    Date(NaiveDate),
}

impl Stamp {
    pub fn first_day(&self) -> NaiveDate {
        match *self {
            Self::Period { frequency, period } => period.first_day(frequency),
            Self::Date(d) => d,
        }
    }
}

impl fmt::Display for Stamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Period {
                frequency: Frequency::Annual,
                period,
            } => write!(f, "{}", period.year),
            Self::Period {
                frequency: Frequency::Quarterly,
                period,
            } => write!(f, "{}({})", period.year, period.sub),
            Self::Period {
                frequency: Frequency::Monthly,
                period,
            } => write!(f, "{}-{:02}", period.year, period.sub),
            Self::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
        }
    }
}

/// Ordered, finite, real-valued observations with a time index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    index: TimeIndex,
    label: String,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, index: TimeIndex, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i + 1 });
        }
        match &index {
            TimeIndex::Regular { frequency, start } => {
                if !start.is_valid(*frequency) {
                    return Err(Error::InvalidParameter(format!(
                        "sub-period {} out of range for {frequency:?} data",
                        start.sub
                    )));
                }
            }
            TimeIndex::Dates(dates) => {
                if dates.len() != values.len() {
                    return Err(Error::IndexLength {
                        expected: values.len(),
                        found: dates.len(),
                    });
                }
                if let Some(pos) = dates.windows(2).position(|w| w[0] >= w[1]) {
                    return Err(Error::IndexNotIncreasing { position: pos + 2 });
                }
            }
        }
        Ok(Self {
            values,
            index,
            label: label.into(),
        })
    }

    /// Series indexed by observation number: stamp `i` is year `i`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(
            values,
            TimeIndex::Regular {
                frequency: Frequency::Annual,
                start: Period::new(1, 1),
            },
            "",
        )
    }

    pub fn regular(
        values: Vec<f64>,
        frequency: Frequency,
        start: Period,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::new(values, TimeIndex::Regular { frequency, start }, label)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index(&self) -> &TimeIndex {
        &self.index
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn frequency(&self) -> Option<Frequency> {
        match self.index {
            TimeIndex::Regular { frequency, .. } => Some(frequency),
            TimeIndex::Dates(_) => None,
        }
    }

    /// Stamp of the observation at 0-based position `pos`.
    pub fn stamp(&self, pos: usize) -> Stamp {
        match &self.index {
            TimeIndex::Regular { frequency, start } => Stamp::Period {
                frequency: *frequency,
                period: start.offset(*frequency, pos as i64),
            },
            TimeIndex::Dates(d) => Stamp::Date(d[pos]),
        }
    }

    pub fn stamps(&self) -> impl Iterator<Item = Stamp> + '_ {
        (0..self.len()).map(|i| self.stamp(i))
    }

    /// 0-based position of a stamp, if the series covers it.
    pub fn position_of(&self, stamp: &Stamp) -> Option<usize> {
        match (&self.index, stamp) {
            (
                TimeIndex::Regular { frequency, start },
                Stamp::Period {
                    frequency: f,
                    period,
                },
            ) if f == frequency => {
                let k = start.periods_until(*period, *frequency);
                (k >= 0 && (k as usize) < self.len()).then_some(k as usize)
            }
            (TimeIndex::Dates(d), Stamp::Date(date)) => d.binary_search(date).ok(),
            _ => None,
        }
    }

    /// Same index and label, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::IndexLength {
                expected: values.len(),
                found: self.len(),
            });
        }
        Self::new(values, self.index.clone(), self.label.clone())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Sub-series over the 0-based half-open range `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.len() {
            return Err(Error::InvalidParameter(format!(
                "range {range:?} is empty or outside a series of length {}",
                self.len()
            )));
        }
        let index = match &self.index {
            TimeIndex::Regular { frequency, start } => TimeIndex::Regular {
                frequency: *frequency,
                start: start.offset(*frequency, range.start as i64),
            },
            TimeIndex::Dates(d) => TimeIndex::Dates(d[range.clone()].to_vec()),
        };
        Self::new(self.values[range].to_vec(), index, self.label.clone())
    }

    /// Sub-series between two stamps, both inclusive.
    pub fn window(&self, first: &Stamp, last: &Stamp) -> Result<Self> {
        let lookup = |s: &Stamp| {
            self.position_of(s)
                .ok_or_else(|| Error::InvalidParameter(format!("stamp {s} not in series")))
        };
        let (a, b) = (lookup(first)?, lookup(last)?);
        self.slice(a..b + 1)
    }

    fn map_positive(&self, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v > 0.0 {
                    Ok(f(v))
                } else {
                    Err(Error::NonPositive {
                        index: i + 1,
                        value: v,
                    })
                }
            })
            .collect()
    }
}

/// Elementwise natural logarithm.
pub fn log_transform(s: &TimeSeries) -> Result<TimeSeries> {
    let logs = s.map_positive(f64::ln)?;
    s.with_values(logs)
}

/// Normalisation applied to the deflator before dividing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeflatorBase {
    /// The deflator value in the nominal series' first period becomes 1.
    FirstPeriod,
    /// The average deflator value over a calendar year becomes 1.
    Year(i32),
    /// Divide the deflator by this value.
    Value(f64),
}

/// Real values `nominal / (deflator / base)` matched stamp by stamp.
pub fn deflate(nominal: &TimeSeries, deflator: &TimeSeries, base: DeflatorBase) -> Result<TimeSeries> {
    if matches!(
        (nominal.index(), deflator.index()),
        (TimeIndex::Regular { .. }, TimeIndex::Dates(_)) | (TimeIndex::Dates(_), TimeIndex::Regular { .. })
    ) || nominal.frequency() != deflator.frequency()
    {
        return Err(Error::IncompatibleIndex(
            "nominal and deflator series must share the same frequency".into(),
        ));
    }
    if let Some(i) = deflator.values().iter().position(|&v| v <= 0.0) {
        return Err(Error::NonPositive {
            index: i + 1,
            value: deflator.values()[i],
        });
    }

    let mut missing = Vec::new();
    let mut aligned = Vec::with_capacity(nominal.len());
    for stamp in nominal.stamps() {
        match deflator.position_of(&stamp) {
            Some(p) => aligned.push(deflator.values()[p]),
            None => missing.push(stamp.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Alignment { missing });
    }

    let base_value = match base {
        DeflatorBase::FirstPeriod => aligned[0],
        DeflatorBase::Value(v) if v > 0.0 && v.is_finite() => v,
        DeflatorBase::Value(v) => {
            return Err(Error::InvalidParameter(format!("deflator base {v} must be positive")))
        }
        DeflatorBase::Year(year) => {
            let in_year: Vec<f64> = deflator
                .stamps()
                .zip(deflator.values())
                .filter(|(s, _)| s.first_day().year() == year)
                .map(|(_, &v)| v)
                .collect();
            if in_year.is_empty() {
                return Err(Error::Alignment {
                    missing: vec![format!("base year {year}")],
                });
            }
            in_year.iter().sum::<f64>() / in_year.len() as f64
        }
    };

    let real = nominal
        .values()
        .iter()
        .zip(&aligned)
        .map(|(&n, &d)| n / (d / base_value))
        .collect();
    nominal.with_values(real)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnKind {
    LogReturn,
    AbsLogReturn,
}

/// Log returns `log y_i - log y_{i-1}`, optionally in absolute value; one value shorter.
pub fn returns(s: &TimeSeries, kind: ReturnKind) -> Result<TimeSeries> {
    if s.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: s.len(),
        });
    }
    let logs = s.map_positive(f64::ln)?;
    let r: Vec<f64> = logs
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            match kind {
                ReturnKind::LogReturn => d,
                ReturnKind::AbsLogReturn => d.abs(),
            }
        })
        .collect();
    s.slice(1..s.len())?.with_values(r)
}

/// Least-squares AR(1) coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ar1Fit {
    pub intercept: f64,
    pub rho: f64,
}

/// Regress `y_i` on `(1, y_{i-1})` for `i = 2..T` by ordinary least squares.
pub fn fit_ar1(s: &TimeSeries) -> Result<Ar1Fit> {
    let y = s.values();
    if y.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            found: y.len(),
        });
    }
    let lagged = &y[..y.len() - 1];
    let current = &y[1..];
    let n = lagged.len() as f64;
    let mean_x = lagged.iter().sum::<f64>() / n;
    let mean_y = current.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&x, &yy) in lagged.iter().zip(current) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (yy - mean_y);
    }
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit("lagged regressor has zero variance".into()));
    }
    let rho = sxy / sxx;
    Ok(Ar1Fit {
        intercept: mean_y - rho * mean_x,
        rho,
    })
}
