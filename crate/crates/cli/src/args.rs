use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, Parser, Subcommand, ValueEnum};

use crate::config::TestMethod;
use crate::input::{DeflateBase, QuarterlyHow, ReturnsKind, Transform};

#[derive(Debug, Parser)]
#[command(name = "breakscan", version, about = "Structural-change tests and change-point dating")]
pub struct Cli {
    /// More log output (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fluctuation test for a constant level.
    Test(TestArgs),
    /// Date level shifts with one method.
    Segment(SegmentArgs),
    /// Run several segmenters and compare their breaks.
    Compare(CompareArgs),
    /// Write a synthetic piecewise-constant signal.
    Synth(SynthArgs),
    /// Re-run a report from its recorded input and configuration.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file with a date column and a value column.
    pub input: PathBuf,
    /// Value column (default: the second column).
    #[arg(long)]
    pub column: Option<String>,
    /// Natural logarithm.
    #[arg(long)]
    pub log: bool,
    /// Divide by the deflator series in this CSV file.
    #[arg(long, value_name = "PATH")]
    pub deflate: Option<PathBuf>,
    /// Deflator base: `first` period or a calendar year.
    #[arg(long, value_name = "first|YEAR", default_value = "first")]
    pub deflate_base: DeflateBase,
    /// Log returns, or their absolute values.
    #[arg(long, value_enum)]
    pub returns: Option<ReturnsKind>,
    /// Aggregate a monthly series to quarters.
    #[arg(long, value_enum)]
    pub quarterly: Option<QuarterlyHow>,
    /// Keep only FIRST..=LAST, e.g. `1947(1):2013(3)`.
    #[arg(long, value_name = "FIRST:LAST")]
    pub window: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write plot-ready CSV here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Record the run time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VarianceArg {
    Plain,
    Recursive,
    LongRun,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long, value_enum, default_value = "ols-cusum")]
    pub method: TestMethod,
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    #[arg(long, value_enum, default_value = "plain")]
    pub variance: VarianceArg,
    /// Long-run variance lags, or `auto`.
    #[arg(long, default_value = "auto")]
    pub bandwidth: String,
    /// MOSUM window as a fraction of the sample.
    #[arg(long, default_value_t = 0.15)]
    pub mosum_width: f64,
    /// Constant boundary for MOSUM.
    #[arg(long)]
    pub critical: Option<f64>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SegmentMethod {
    Dp,
    Wbs,
    Edivisive,
}

#[derive(Debug, Args)]
pub struct SegmentOptions {
    /// Minimal segment length, as a count or a percentage of the sample (`10%`).
    #[arg(long)]
    pub min_seg: Option<String>,
    /// dp: largest number of breaks considered; wbs and edivisive: cap on breaks.
    #[arg(long)]
    pub max_breaks: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Distance exponent for edivisive.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Permutations per edivisive significance test.
    #[arg(long, default_value_t = 199)]
    pub permutations: usize,
    /// Significance level for edivisive.
    #[arg(long, default_value_t = 0.05)]
    pub sig_level: f64,
    /// Random intervals for wbs.
    #[arg(long, default_value_t = 5000)]
    pub intervals: usize,
    /// Threshold constant for wbs.
    #[arg(long, default_value_t = 1.3)]
    pub threshold_c: f64,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(long, value_enum)]
    pub method: SegmentMethod,
    #[command(flatten)]
    pub options: SegmentOptions,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Comma-separated methods, e.g. `dp,edivisive`.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub methods: Vec<SegmentMethod>,
    #[command(flatten)]
    pub options: SegmentOptions,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Gaussian,
    Ar1,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Comma-separated segment means.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub means: Vec<f64>,
    /// Comma-separated segment lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    pub lengths: Vec<usize>,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub noise: NoiseArg,
    /// AR(1) coefficient.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Header of the value column.
    #[arg(long, default_value = "y")]
    pub label: String,
    /// Signal CSV (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the true break indices to this CSV.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub report: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

const TRANSFORM_FLAGS: [&str; 5] = ["log", "deflate", "returns", "quarterly", "window"];

/// Transform flags in the order they appeared on the command line.
pub fn transform_chain(input: &InputArgs, matches: &ArgMatches) -> Result<Vec<Transform>, String> {
    let mut seen: Vec<(usize, &str)> = TRANSFORM_FLAGS
        .iter()
        .filter(|id| matches.value_source(id) == Some(ValueSource::CommandLine))
        .filter_map(|id| matches.index_of(id).map(|i| (i, *id)))
        .collect();
    seen.sort_unstable();
    seen.into_iter()
        .map(|(_, id)| {
            Ok(match id {
                "log" => Transform::Log,
                "deflate" => Transform::Deflate {
                    path: input.deflate.as_ref().expect("flag present").display().to_string(),
                    base: input.deflate_base,
                },
                "returns" => Transform::Returns {
                    kind: input.returns.expect("flag present"),
                },
                "quarterly" => Transform::Quarterly {
                    how: input.quarterly.expect("flag present"),
                },
                _ => {
                    let w = input.window.as_deref().expect("flag present");
                    let (first, last) = w
                        .rsplit_once(':')
                        .ok_or_else(|| format!("--window expects FIRST:LAST, got `{w}`"))?;
                    Transform::Window {
                        first: first.to_owned(),
                        last: last.to_owned(),
                    }
                }
            })
        })
        .collect()
}
