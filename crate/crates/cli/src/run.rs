//! Execution of resolved configurations.

use std::fmt::Write as _;
use std::time::Instant;

use breakscan::dating::{select_breaks_bic, RssTriangle};
use breakscan::edivisive::e_divisive;
use breakscan::fluctuation::{
    build_process, critical_value_test, long_run_variance, mosum_process, sup_abs_test, Bandwidth,
    FluctuationProcess, ProcessKind, TestResult, VarianceEstimate,
};
use breakscan::wbs::wbs_segment;
use breakscan::{Segmentation, TimeSeries};

use crate::config::{CompareConfig, RunConfig, SegmentConfig, TestConfig, TestMethod, VarianceChoice};
use crate::error::CliError;
use crate::input::InputSpec;
use crate::report::{
    path_stamp, AlignedRow, CompareOutcome, Outcome, PairDistance, PathPoint, Recorded, Report, SegmentOutcome,
    SeriesSummary, TestOutcome, Tool, SCHEMA,
};

/// A finished run: the report and the plot-ready CSV.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub plot: String,
}

pub fn execute(input: &InputSpec, config: &RunConfig, timing: bool) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let series = input.load()?;
    let (result, plot) = match config {
        RunConfig::Test(c) => run_test(&series, c)?,
        RunConfig::Segment(c) => {
            let seg = segment(&series, c)?;
            let plot = segment_plot(&series, &[&seg])?;
            (Outcome::Segment(SegmentOutcome::new(&series, &seg)), plot)
        }
        RunConfig::Compare(c) => run_compare(&series, c)?,
    };
    let runtime_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(RunOutput {
        report: Report {
            schema: SCHEMA,
            tool: Tool::default(),
            input: input.clone(),
            series: SeriesSummary::of(&series),
            config: config.clone(),
            result,
            runtime_ms,
        },
        plot,
    })
}

/// Run a report's recorded input and configuration again.
pub fn replay(report_json: &str, timing: bool) -> Result<RunOutput, CliError> {
    let rec: Recorded = serde_json::from_str(report_json)?;
    if rec.schema != SCHEMA {
        return Err(CliError::Usage(format!(
            "report schema `{}` is not supported (expected `{SCHEMA}`)",
            rec.schema
        )));
    }
    execute(&rec.input, &rec.config, timing)
}

pub fn variance(series: &TimeSeries, choice: VarianceChoice) -> Result<VarianceEstimate, CliError> {
    Ok(match choice {
        VarianceChoice::Plain => VarianceEstimate::plain(series)?,
        VarianceChoice::Recursive => VarianceEstimate::plain_recursive(series)?,
        VarianceChoice::LongRun { lags } => long_run_variance(series, Bandwidth::Lags(lags))?,
    })
}

fn run_test(series: &TimeSeries, c: &TestConfig) -> Result<(Outcome, String), CliError> {
    let scale = variance(series, c.variance)?;
    let (process, result): (FluctuationProcess, TestResult) = match c.method {
        TestMethod::Mosum => {
            let critical = c
                .critical
                .ok_or_else(|| CliError::Usage("MOSUM needs a critical value (--critical)".into()))?;
            let width = c
                .mosum_width
                .ok_or_else(|| CliError::Usage("MOSUM needs a window width".into()))?;
            let p = mosum_process(series, width, scale)?;
            let r = critical_value_test(&p, critical, c.level)?;
            (p, r)
        }
        TestMethod::OlsCusum | TestMethod::RecCusum => {
            let kind = if c.method == TestMethod::OlsCusum {
                ProcessKind::OlsCusum
            } else {
                ProcessKind::RecCusum
            };
            let p = build_process(series, kind, scale)?;
            let r = sup_abs_test(&p, c.level)?;
            (p, r)
        }
    };
    let weight = |k: usize| match process.kind {
        ProcessKind::RecCusum => 1.0 + 2.0 * process.time(k),
        _ => 1.0,
    };
    let (k, _) = process
        .path
        .iter()
        .enumerate()
        .fold((0, -1.0), |(bk, bv), (k, v)| {
            let a = v.abs() / weight(k);
            if a > bv {
                (k, a)
            } else {
                (bk, bv)
            }
        });
    let peak = PathPoint {
        k,
        t: process.time(k),
        value: process.path[k],
        date: path_stamp(&process, k).map(|i| series.stamp(i).to_string()),
    };
    let plot = test_plot(series, &process, &result);
    let outcome = TestOutcome {
        test: result,
        variance: scale,
        points: process.path.len(),
        window: process.window,
        peak,
    };
    Ok((Outcome::Test(outcome), plot))
}

pub fn segment(series: &TimeSeries, c: &SegmentConfig) -> Result<Segmentation, CliError> {
    Ok(match c {
        SegmentConfig::Dp(dp) => {
            let tri = RssTriangle::build(series, dp.min_len)?;
            select_breaks_bic(&tri, dp.max_breaks)?
        }
        SegmentConfig::Wbs(w) => wbs_segment(series, w)?,
        SegmentConfig::Edivisive(e) => e_divisive(series, e)?,
    })
}

fn run_compare(series: &TimeSeries, c: &CompareConfig) -> Result<(Outcome, String), CliError> {
    if c.methods.len() < 2 {
        return Err(CliError::Usage("compare needs at least two methods".into()));
    }
    let segs = c
        .methods
        .iter()
        .map(|m| segment(series, m))
        .collect::<Result<Vec<_>, _>>()?;
    let mut distances = Vec::new();
    for a in 0..segs.len() {
        for b in a + 1..segs.len() {
            distances.push(PairDistance {
                a,
                b,
                max_abs_diff: hausdorff(&segs[a].breaks, &segs[b].breaks),
            });
        }
    }
    let gap = segs.iter().map(|s| s.min_len).min().unwrap_or(1);
    let table = align(&segs, gap)
        .into_iter()
        .map(|row| AlignedRow {
            dates: row.iter().map(|b| b.map(|b| series.stamp(b - 1).to_string())).collect(),
            breaks: row,
        })
        .collect();
    let refs: Vec<&Segmentation> = segs.iter().collect();
    let plot = segment_plot(series, &refs)?;
    let outcome = CompareOutcome {
        runs: segs.iter().map(|s| SegmentOutcome::new(series, s)).collect(),
        table,
        distances,
    };
    Ok((Outcome::Compare(outcome), plot))
}

/// Largest distance from any break to the nearest break of the other set.
pub fn hausdorff(a: &[usize], b: &[usize]) -> Option<usize> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Some(0),
        (true, false) | (false, true) => None,
        _ => {
            let one_way = |x: &[usize], y: &[usize]| {
                x.iter()
                    .map(|&p| y.iter().map(|&q| p.abs_diff(q)).min().unwrap_or(0))
                    .max()
                    .unwrap_or(0)
            };
            Some(one_way(a, b).max(one_way(b, a)))
        }
    }
}

/// Group the breaks of all runs into rows of nearby dates, at most one per run.
fn align(segs: &[Segmentation], gap: usize) -> Vec<Vec<Option<usize>>> {
    let mut all: Vec<(usize, usize)> = segs
        .iter()
        .enumerate()
        .flat_map(|(r, s)| s.breaks.iter().map(move |&b| (b, r)))
        .collect();
    all.sort_unstable();
    let mut rows: Vec<(usize, Vec<Option<usize>>)> = Vec::new();
    for (b, r) in all {
        match rows.last_mut() {
            Some((anchor, row)) if row[r].is_none() && b - *anchor < gap => row[r] = Some(b),
            _ => {
                let mut row = vec![None; segs.len()];
                row[r] = Some(b);
                rows.push((b, row));
            }
        }
    }
    rows.into_iter().map(|(_, r)| r).collect()
}

fn test_plot(series: &TimeSeries, p: &FluctuationProcess, r: &TestResult) -> String {
    let mut out = String::from("date,t,value,boundary_upper,boundary_lower\n");
    for (k, &v) in p.path.iter().enumerate() {
        let t = p.time(k);
        let date = path_stamp(p, k)
            .map(|i| series.stamp(i).first_day().to_string())
            .unwrap_or_default();
        let upper = r.boundary.upper(t);
        writeln!(out, "{date},{t},{v},{upper},{}", -upper).expect("write to string");
    }
    out
}

fn segment_plot(series: &TimeSeries, segs: &[&Segmentation]) -> Result<String, CliError> {
    let fitted = segs
        .iter()
        .map(|s| s.fitted(series))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = String::from("date,value");
    if segs.len() == 1 {
        out.push_str(",fitted");
    } else {
        for (i, s) in segs.iter().enumerate() {
            write!(out, ",fitted_{}_{}", i + 1, s.method.name()).expect("write to string");
        }
    }
    out.push('\n');
    for (i, v) in series.values().iter().enumerate() {
        write!(out, "{},{v}", series.stamp(i).first_day()).expect("write to string");
        for f in &fitted {
            write!(out, ",{}", f.values()[i]).expect("write to string");
        }
        out.push('\n');
    }
    Ok(out)
}
