//! Piecewise-constant segmentations shared by all dating methods.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dp,
    Wbs,
    Edivisive,
}

impl Method {
    pub const fn name(self) -> &'static str {
        match self {
            Self::Dp => "dp",
            Self::Wbs => "wbs",
            Self::Edivisive => "edivisive",
        }
    }
}

/// One entry of a method's selection trace.
///
/// `dp`: `(m, BIC(m))` for every candidate break count.
/// `wbs`: `(rank, statistic)` of the kept breaks, strongest first.
/// `edivisive`: `(m, p-value)` of the test that accepted the m-th break.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub m: usize,
    pub value: f64,
}

/// A partition of `1..=T` into contiguous segments with per-segment means.
///
/// Each break is the 1-based index of the last observation of the earlier segment,
/// so segment `j` covers `breaks[j-1]+1 ..= breaks[j]` with `breaks[-1] = 0` and
/// `breaks[m] = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    pub breaks: Vec<usize>,
    pub segment_means: Vec<f64>,
    pub rss_total: f64,
    pub method: Method,
    pub min_len: usize,
    pub n: usize,
    pub criterion_trace: Vec<TracePoint>,
}

impl Segmentation {
    /// Build a segmentation from break indices, computing means and RSS directly.
    pub fn from_breaks(values: &[f64], breaks: Vec<usize>, method: Method, min_len: usize) -> Result<Self> {
        let n = values.len();
        validate_breaks(n, &breaks, min_len)?;
        let mut means = Vec::with_capacity(breaks.len() + 1);
        let mut rss = 0.0;
        for (a, b) in segment_bounds(n, &breaks) {
            let seg = &values[a - 1..b];
            let mean = seg.iter().sum::<f64>() / seg.len() as f64;
            rss += seg.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
            means.push(mean);
        }
        Ok(Self {
            breaks,
            segment_means: means,
            rss_total: rss,
            method,
            min_len,
            n,
            criterion_trace: Vec::new(),
        })
    }

    pub fn num_breaks(&self) -> usize {
        self.breaks.len()
    }

    /// `(first, last)` 1-based inclusive bounds of each segment.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        segment_bounds(self.n, &self.breaks)
    }

    /// Per-observation fitted values: each segment's mean repeated over the segment.
    pub fn fitted(&self, s: &TimeSeries) -> Result<TimeSeries> {
        if s.len() != self.n {
            return Err(Error::InconsistentSegmentation(format!(
                "segmentation covers {} observations, series has {}",
                self.n,
                s.len()
            )));
        }
        let mut out = Vec::with_capacity(self.n);
        for ((a, b), &mu) in self.segments().zip(&self.segment_means) {
            out.extend(std::iter::repeat_n(mu, b - a + 1));
        }
        s.with_values(out)
    }
}

pub(crate) fn segment_bounds(n: usize, breaks: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    let starts = std::iter::once(0).chain(breaks.iter().copied());
    let ends = breaks.iter().copied().chain(std::iter::once(n));
    starts.zip(ends).map(|(a, b)| (a + 1, b))
}

fn validate_breaks(n: usize, breaks: &[usize], min_len: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut prev = 0;
    for &b in breaks.iter().chain(std::iter::once(&n)) {
        if b <= prev || b > n {
            return Err(Error::InconsistentSegmentation(format!(
                "break {b} out of order or outside 1..{n}"
            )));
        }
        if b - prev < min_len {
            return Err(Error::InconsistentSegmentation(format!(
                "segment {}..={b} shorter than minimum length {min_len}",
                prev + 1
            )));
        }
        prev = b;
    }
    Ok(())
}
