//! Command-line front end: tests, segmentations, comparisons and synthetic signals,
//! with JSON reports and plot-ready CSV output.

pub mod args;
pub mod config;
pub mod error;
pub mod input;
pub mod report;
pub mod run;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use breakscan::edivisive::EdivConfig;
use breakscan::fluctuation::Bandwidth;
use breakscan::io::write_csv_to;
use breakscan::synth::{Noise, SignalSpec};
use breakscan::wbs::WbsConfig;
use breakscan::TimeSeries;
use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command, InputArgs, OutputArgs, SegmentMethod, SegmentOptions, SynthArgs, VarianceArg};
use config::{CompareConfig, DpConfig, RunConfig, SegmentConfig, TestConfig, TestMethod, VarianceChoice};
pub use error::CliError;
use input::InputSpec;
use run::RunOutput;

/// Default minimal segment length for least-squares dating, as a fraction of the sample.
pub const DP_DEFAULT_TRIM: f64 = 0.15;

/// Parse arguments, run, print diagnostics; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    let sub = matches.subcommand().map(|(_, m)| m).expect("subcommand is required");
    match dispatch(&cli.command, sub) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command, matches: &clap::ArgMatches) -> Result<(), CliError> {
    match command {
        Command::Test(a) => {
            let input = input_spec(&a.input, matches)?;
            if a.method == TestMethod::Mosum && a.critical.is_none() {
                return Err(CliError::Usage(
                    "MOSUM p-values are not available; pass --critical".into(),
                ));
            }
            let series = input.load()?;
            let variance = match a.variance {
                VarianceArg::Plain => VarianceChoice::Plain,
                VarianceArg::Recursive => VarianceChoice::Recursive,
                VarianceArg::LongRun => VarianceChoice::LongRun {
                    lags: parse_bandwidth(&a.bandwidth)?.resolve(series.len()),
                },
            };
            let mosum = a.method == TestMethod::Mosum;
            let config = RunConfig::Test(TestConfig {
                method: a.method,
                level: a.level,
                variance,
                mosum_width: mosum.then_some(a.mosum_width),
                critical: if mosum { a.critical } else { None },
            });
            emit(run::execute(&input, &config, a.output.timing)?, &a.output)
        }
        Command::Segment(a) => {
            let input = input_spec(&a.input, matches)?;
            let n = input.load()?.len();
            let config = RunConfig::Segment(segment_config(a.method, &a.options, n)?);
            emit(run::execute(&input, &config, a.output.timing)?, &a.output)
        }
        Command::Compare(a) => {
            if a.methods.len() < 2 {
                return Err(CliError::Usage("compare needs at least two methods".into()));
            }
            let input = input_spec(&a.input, matches)?;
            let n = input.load()?.len();
            let methods = a
                .methods
                .iter()
                .map(|&m| segment_config(m, &a.options, n))
                .collect::<Result<_, _>>()?;
            let config = RunConfig::Compare(CompareConfig { methods });
            emit(run::execute(&input, &config, a.output.timing)?, &a.output)
        }
        Command::Synth(a) => synth(a),
        Command::Replay(a) => {
            let text = fs::read_to_string(&a.report)
                .map_err(|e| CliError::reading(&a.report.display().to_string(), breakscan::Error::Io(e)))?;
            emit(run::replay(&text, a.output.timing)?, &a.output)
        }
    }
}

fn input_spec(a: &InputArgs, matches: &clap::ArgMatches) -> Result<InputSpec, CliError> {
    Ok(InputSpec {
        path: a.input.display().to_string(),
        column: a.column.clone(),
        transforms: args::transform_chain(a, matches).map_err(CliError::Usage)?,
    })
}

fn parse_bandwidth(text: &str) -> Result<Bandwidth, CliError> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(Bandwidth::Auto);
    }
    text.parse()
        .map(Bandwidth::Lags)
        .map_err(|_| CliError::Usage(format!("--bandwidth expects `auto` or a lag count, got `{text}`")))
}

/// Minimal segment length from a count or a percentage (`10%` means `floor(0.1 T)`).
pub fn parse_min_seg(text: &str, n: usize) -> Result<usize, CliError> {
    let bad = || CliError::Usage(format!("--min-seg expects a count or a percentage, got `{text}`"));
    let text = text.trim();
    let len = match text.strip_suffix('%') {
        Some(p) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            if !(p > 0.0 && p <= 100.0) {
                return Err(bad());
            }
            (p / 100.0 * n as f64).floor() as usize
        }
        None => text.parse().map_err(|_| bad())?,
    };
    if len == 0 {
        return Err(CliError::Usage(format!("--min-seg `{text}` gives an empty segment for {n} observations")));
    }
    Ok(len)
}

/// Resolve every default for one segmenter on a series of length `n`.
pub fn segment_config(method: SegmentMethod, o: &SegmentOptions, n: usize) -> Result<SegmentConfig, CliError> {
    let min_seg = o.min_seg.as_deref().map(|t| parse_min_seg(t, n)).transpose()?;
    Ok(match method {
        SegmentMethod::Dp => {
            let min_len = match min_seg {
                Some(m) => m,
                None => ((DP_DEFAULT_TRIM * n as f64).floor() as usize).max(1),
            };
            let feasible = (n / min_len).saturating_sub(1);
            SegmentConfig::Dp(DpConfig {
                min_len,
                max_breaks: o.max_breaks.unwrap_or(feasible),
            })
        }
        SegmentMethod::Wbs => {
            let d = WbsConfig::default();
            SegmentConfig::Wbs(WbsConfig {
                num_intervals: o.intervals,
                threshold_constant: o.threshold_c,
                max_breaks: o.max_breaks,
                seed: o.seed,
                min_len: min_seg.unwrap_or(d.min_len),
            })
        }
        SegmentMethod::Edivisive => {
            let d = EdivConfig::default();
            SegmentConfig::Edivisive(EdivConfig {
                min_size: min_seg.unwrap_or(d.min_size),
                alpha: o.alpha,
                sig_level: o.sig_level,
                num_permutations: o.permutations,
                seed: o.seed,
                max_breaks: o.max_breaks,
            })
        }
    })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn emit(out: RunOutput, o: &OutputArgs) -> Result<(), CliError> {
    let json = out.report.to_json();
    match &o.out {
        Some(p) => write_file(p, json.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(json.as_bytes())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    if let Some(p) = &o.plot {
        write_file(p, out.plot.as_bytes())?;
    }
    Ok(())
}

fn synth(a: &SynthArgs) -> Result<(), CliError> {
    let spec = SignalSpec {
        means: a.means.clone(),
        lengths: a.lengths.clone(),
        noise: match a.noise {
            args::NoiseArg::Gaussian => Noise::Gaussian,
            args::NoiseArg::Ar1 => Noise::Ar1 { rho: a.rho },
        },
        sigma: a.sigma,
        seed: a.seed,
    };
    let signal = spec.generate().map_err(|e| CliError::Usage(e.to_string()))?;
    let series = TimeSeries::from_values(signal.values)?.with_label(a.label.clone());
    let mut csv = Vec::new();
    write_csv_to(&mut csv, &series)?;
    match &a.out {
        Some(p) => write_file(p, &csv)?,
        None => std::io::stdout()
            .lock()
            .write_all(&csv)
            .map_err(|source| CliError::Write {
                path: "<stdout>".into(),
                source,
            })?,
    }
    if let Some(p) = &a.truth {
        let mut text = String::from("break,date\n");
        for &b in &signal.breaks {
            text.push_str(&format!("{b},{}\n", series.stamp(b - 1).first_day()));
        }
        write_file(p, text.as_bytes())?;
    }
    Ok(())
}
