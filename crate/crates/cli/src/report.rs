//! JSON report layout. See `docs/formats.md`.

use breakscan::fluctuation::{FluctuationProcess, TestResult, VarianceEstimate};
use breakscan::{Segmentation, TimeIndex, TimeSeries, TracePoint};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::input::InputSpec;

pub const SCHEMA: &str = "breakscan.report/1";

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: Tool,
    pub input: InputSpec,
    pub series: SeriesSummary,
    pub config: RunConfig,
    pub result: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl Report {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// The parts of a report needed to run it again.
#[derive(Debug, Clone, Deserialize)]
pub struct Recorded {
    pub schema: String,
    pub input: InputSpec,
    pub config: RunConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for Tool {
    fn default() -> Self {
        Self {
            name: "breakscan",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesSummary {
    pub label: String,
    pub n: usize,
    /// `annual`, `quarterly`, `monthly` or `dates`.
    pub frequency: String,
    pub first: String,
    pub last: String,
}

impl SeriesSummary {
    pub fn of(s: &TimeSeries) -> Self {
        let frequency = match s.index() {
            TimeIndex::Regular { frequency, .. } => serde_json::to_value(frequency)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default(),
            TimeIndex::Dates(_) => "dates".into(),
        };
        Self {
            label: s.label().to_owned(),
            n: s.len(),
            frequency,
            first: s.stamp(0).to_string(),
            last: s.stamp(s.len() - 1).to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Test(TestOutcome),
    Segment(SegmentOutcome),
    Compare(CompareOutcome),
}

#[derive(Debug, Clone, Serialize)]
pub struct TestOutcome {
    pub test: TestResult,
    pub variance: VarianceEstimate,
    /// Number of points on the path, including the origin.
    pub points: usize,
    /// MOSUM window length in observations.
    pub window: Option<usize>,
    /// Where `|path|` (boundary-scaled for Rec-CUSUM) peaks.
    pub peak: PathPoint,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathPoint {
    pub k: usize,
    pub t: f64,
    pub value: f64,
    pub date: Option<String>,
}

/// Observation position (0-based) a path point belongs to.
pub fn path_stamp(p: &FluctuationProcess, k: usize) -> Option<usize> {
    use breakscan::fluctuation::ProcessKind;
    match p.kind {
        ProcessKind::OlsCusum => k.checked_sub(1),
        ProcessKind::RecCusum => Some(k),
        // End of the window.
        ProcessKind::Mosum => Some(k + p.window.unwrap_or(1) - 1),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentRow {
    pub first: usize,
    pub last: usize,
    pub first_date: String,
    pub last_date: String,
    pub length: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentOutcome {
    pub method: &'static str,
    pub num_breaks: usize,
    pub breaks: Vec<usize>,
    pub break_dates: Vec<String>,
    pub min_len: usize,
    pub rss_total: f64,
    pub segments: Vec<SegmentRow>,
    /// What the trace values are: `bic`, `cusum` or `p_value`.
    pub criterion: &'static str,
    pub criterion_trace: Vec<TracePoint>,
}

impl SegmentOutcome {
    pub fn new(s: &TimeSeries, seg: &Segmentation) -> Self {
        let date = |i: usize| s.stamp(i - 1).to_string();
        let segments = seg
            .segments()
            .zip(&seg.segment_means)
            .map(|((first, last), &mean)| SegmentRow {
                first,
                last,
                first_date: date(first),
                last_date: date(last),
                length: last + 1 - first,
                mean,
            })
            .collect();
        Self {
            method: seg.method.name(),
            num_breaks: seg.num_breaks(),
            breaks: seg.breaks.clone(),
            break_dates: seg.breaks.iter().map(|&b| date(b)).collect(),
            min_len: seg.min_len,
            rss_total: seg.rss_total,
            segments,
            criterion: match seg.method {
                breakscan::Method::Dp => "bic",
                breakscan::Method::Wbs => "cusum",
                breakscan::Method::Edivisive => "p_value",
            },
            criterion_trace: seg.criterion_trace.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareOutcome {
    pub runs: Vec<SegmentOutcome>,
    /// One row per break of any run; nearest partner break in every other run.
    pub table: Vec<AlignedRow>,
    pub distances: Vec<PairDistance>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlignedRow {
    /// Break per run (`None` where the run has no break within the row's cluster).
    pub breaks: Vec<Option<usize>>,
    pub dates: Vec<Option<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairDistance {
    pub a: usize,
    pub b: usize,
    /// Largest distance in periods from a break of either run to the nearest break of
    /// the other; `None` if exactly one of the runs has no breaks.
    pub max_abs_diff: Option<usize>,
}
