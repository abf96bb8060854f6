//! Python bindings: series handling, fluctuation tests and the three segmenters.

use std::path::PathBuf;

use breakscan::dating::{optimal_breaks, select_breaks_bic, RssTriangle};
use breakscan::edivisive::{e_divisive, EdivConfig};
use breakscan::fluctuation::{
    build_process, critical_value_test, kolmogorov_sf as sf, long_run_variance as lrv, mosum_process,
    sup_abs_test, Bandwidth, Boundary, ProcessKind, VarianceEstimate,
};
use breakscan::io::{monthly_to_quarterly, read_csv as read, write_csv, Aggregation, CsvSpec};
use breakscan::series::{deflate, fit_ar1 as ar1, log_transform, returns, DeflatorBase, ReturnKind};
use breakscan::synth::{Noise, SignalSpec};
use breakscan::wbs::{wbs_segment, WbsConfig};
use breakscan::{Error, Frequency, Period, Segmentation, TimeSeries};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn frequency(name: &str) -> PyResult<Frequency> {
    match name {
        "annual" => Ok(Frequency::Annual),
        "quarterly" => Ok(Frequency::Quarterly),
        "monthly" => Ok(Frequency::Monthly),
        _ => Err(PyValueError::new_err(format!(
            "frequency must be annual, quarterly or monthly, got {name:?}"
        ))),
    }
}

fn frequency_name(f: Frequency) -> &'static str {
    match f {
        Frequency::Annual => "annual",
        Frequency::Quarterly => "quarterly",
        Frequency::Monthly => "monthly",
    }
}

/// A univariate series with its time index.
#[pyclass(name = "Series", module = "pybreakscan", frozen)]
struct PySeries {
    inner: TimeSeries,
}

impl PySeries {
    fn wrap(inner: TimeSeries) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PySeries {
    /// Regular series; `start` is `(year, sub-period)`, year 1 annual by default.
    #[new]
    #[pyo3(signature = (values, frequency = "annual", start = (1, 1), label = ""))]
    fn new(values: Vec<f64>, frequency: &str, start: (i32, u32), label: &str) -> PyResult<Self> {
        let f = self::frequency(frequency)?;
        if !(1..=f.per_year()).contains(&start.1) {
            return Err(PyValueError::new_err(format!("sub-period {} out of range for {frequency}", start.1)));
        }
        TimeSeries::regular(values, f, Period::new(start.0, start.1), label)
            .map(Self::wrap)
            .map_err(err)
    }

    /// Read a two-column CSV file (date, value).
    #[staticmethod]
    #[pyo3(signature = (path, column = None))]
    fn read_csv(path: PathBuf, column: Option<String>) -> PyResult<Self> {
        let spec = CsvSpec {
            value_column: column,
            ..CsvSpec::default()
        };
        read(&path, &spec).map(Self::wrap).map_err(err)
    }

    fn to_csv(&self, path: PathBuf) -> PyResult<()> {
        write_csv(&path, &self.inner).map_err(err)
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_owned()
    }

    /// `annual`, `quarterly`, `monthly`, or None for dated observations.
    #[getter]
    fn frequency(&self) -> Option<&'static str> {
        self.inner.frequency().map(frequency_name)
    }

    /// Stamps as printed in reports: `1898`, `1973(4)`, `2000-03` or ISO dates.
    fn stamps(&self) -> Vec<String> {
        self.inner.stamps().map(|s| s.to_string()).collect()
    }

    /// First calendar day of every observation, ISO formatted.
    fn dates(&self) -> Vec<String> {
        self.inner.stamps().map(|s| s.first_day().to_string()).collect()
    }

    fn log(&self) -> PyResult<Self> {
        log_transform(&self.inner).map(Self::wrap).map_err(err)
    }

    #[pyo3(signature = (absolute = false))]
    fn returns(&self, absolute: bool) -> PyResult<Self> {
        let kind = if absolute {
            ReturnKind::AbsLogReturn
        } else {
            ReturnKind::LogReturn
        };
        returns(&self.inner, kind).map(Self::wrap).map_err(err)
    }

    /// Divide by `deflator`, normalised to 1 in the first period or over `base_year`.
    #[pyo3(signature = (deflator, base_year = None))]
    fn deflate(&self, deflator: &PySeries, base_year: Option<i32>) -> PyResult<Self> {
        let base = base_year.map_or(DeflatorBase::FirstPeriod, DeflatorBase::Year);
        deflate(&self.inner, &deflator.inner, base).map(Self::wrap).map_err(err)
    }

    /// Monthly to quarterly by `mean` or `last`.
    #[pyo3(signature = (how = "mean"))]
    fn to_quarterly(&self, how: &str) -> PyResult<Self> {
        let how = match how {
            "mean" => Aggregation::Mean,
            "last" => Aggregation::Last,
            _ => return Err(PyValueError::new_err(format!("how must be mean or last, got {how:?}"))),
        };
        monthly_to_quarterly(&self.inner, how).map(|a| Self::wrap(a.series)).map_err(err)
    }

    /// Observations `start..stop` (0-based, half open).
    fn slice(&self, start: usize, stop: usize) -> PyResult<Self> {
        if start > stop || stop > self.inner.len() {
            return Err(PyValueError::new_err(format!("bad slice {start}..{stop} of {}", self.inner.len())));
        }
        self.inner.slice(start..stop).map(Self::wrap).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        let n = self.inner.len();
        if n == 0 {
            return "Series([])".into();
        }
        format!(
            "Series(n={n}, {}..{}, label={:?})",
            self.inner.stamp(0),
            self.inner.stamp(n - 1),
            self.inner.label()
        )
    }
}

/// Outcome of a fluctuation test together with its path.
#[pyclass(name = "TestResult", module = "pybreakscan", frozen, get_all)]
struct PyTestResult {
    method: &'static str,
    statistic: f64,
    p_value: Option<f64>,
    crossed: bool,
    level: f64,
    /// `bridge_constant`, `linear_brownian` or `user_constant`.
    boundary: &'static str,
    /// Critical constant, or `λ` for the linear boundary.
    critical: f64,
    variance: f64,
    path: Vec<f64>,
    window: Option<usize>,
}

#[pymethods]
impl PyTestResult {
    fn __repr__(&self) -> String {
        format!(
            "TestResult(method={:?}, statistic={:.6}, p_value={:?}, crossed={})",
            self.method, self.statistic, self.p_value, self.crossed
        )
    }
}

fn scale(s: &TimeSeries, variance: &str, lags: Option<usize>) -> PyResult<VarianceEstimate> {
    match variance {
        "plain" => VarianceEstimate::plain(s),
        "recursive" => VarianceEstimate::plain_recursive(s),
        "long-run" => lrv(s, lags.map_or(Bandwidth::Auto, Bandwidth::Lags)),
        _ => {
            return Err(PyValueError::new_err(format!(
                "variance must be plain, recursive or long-run, got {variance:?}"
            )))
        }
    }
    .map_err(err)
}

/// Test for a constant level with `ols-cusum`, `rec-cusum` or `mosum`.
///
/// MOSUM has no p-value and needs `critical`.
#[pyfunction]
#[pyo3(signature = (series, method = "ols-cusum", level = 0.05, variance = "plain", lags = None, width = 0.15, critical = None))]
fn fluctuation_test(
    series: &PySeries,
    method: &str,
    level: f64,
    variance: &str,
    lags: Option<usize>,
    width: f64,
    critical: Option<f64>,
) -> PyResult<PyTestResult> {
    let s = &series.inner;
    let v = scale(s, variance, lags)?;
    let (p, r, method) = match method {
        "ols-cusum" | "rec-cusum" => {
            let (kind, name) = if method == "ols-cusum" {
                (ProcessKind::OlsCusum, "ols-cusum")
            } else {
                (ProcessKind::RecCusum, "rec-cusum")
            };
            let p = build_process(s, kind, v).map_err(err)?;
            let r = sup_abs_test(&p, level).map_err(err)?;
            (p, r, name)
        }
        "mosum" => {
            let c = critical.ok_or_else(|| PyValueError::new_err("mosum needs a critical value"))?;
            let p = mosum_process(s, width, v).map_err(err)?;
            let r = critical_value_test(&p, c, level).map_err(err)?;
            (p, r, "mosum")
        }
        _ => {
            return Err(PyValueError::new_err(format!(
                "method must be ols-cusum, rec-cusum or mosum, got {method:?}"
            )))
        }
    };
    let (boundary, critical) = match r.boundary {
        Boundary::BridgeConstant { critical } => ("bridge_constant", critical),
        Boundary::LinearBrownian { lambda } => ("linear_brownian", lambda),
        Boundary::UserConstant { critical } => ("user_constant", critical),
    };
    Ok(PyTestResult {
        method,
        statistic: r.statistic,
        p_value: r.p_value,
        crossed: r.crossed,
        level: r.level,
        boundary,
        critical,
        variance: v.value,
        path: p.path,
        window: p.window,
    })
}

/// Bartlett long-run variance; `lags=None` picks `floor(4 (T/100)^(2/9))`.
#[pyfunction]
#[pyo3(signature = (series, lags = None))]
fn long_run_variance(series: &PySeries, lags: Option<usize>) -> PyResult<f64> {
    lrv(&series.inner, lags.map_or(Bandwidth::Auto, Bandwidth::Lags))
        .map(|v| v.value)
        .map_err(err)
}

/// `(intercept, rho)` of a least-squares AR(1) fit.
#[pyfunction]
fn fit_ar1(series: &PySeries) -> PyResult<(f64, f64)> {
    ar1(&series.inner).map(|f| (f.intercept, f.rho)).map_err(err)
}

/// `P(sup |B⁰(t)| > x)` for a Brownian bridge.
#[pyfunction]
fn kolmogorov_sf(x: f64) -> f64 {
    sf(x)
}

/// Piecewise-constant fit returned by every segmenter.
#[pyclass(name = "Segmentation", module = "pybreakscan", frozen)]
struct PySegmentation {
    inner: Segmentation,
}

#[pymethods]
impl PySegmentation {
    /// 1-based index of the last observation before each break.
    #[getter]
    fn breaks(&self) -> Vec<usize> {
        self.inner.breaks.clone()
    }

    #[getter]
    fn segment_means(&self) -> Vec<f64> {
        self.inner.segment_means.clone()
    }

    #[getter]
    fn rss_total(&self) -> f64 {
        self.inner.rss_total
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.name()
    }

    #[getter]
    fn min_len(&self) -> usize {
        self.inner.min_len
    }

    /// `(m, value)`: BIC for dp, statistics for wbs, p-values for edivisive.
    #[getter]
    fn criterion_trace(&self) -> Vec<(usize, f64)> {
        self.inner.criterion_trace.iter().map(|t| (t.m, t.value)).collect()
    }

    /// Stamps of the last observation before each break.
    fn break_stamps(&self, series: &PySeries) -> PyResult<Vec<String>> {
        self.check(series)?;
        Ok(self.inner.breaks.iter().map(|&b| series.inner.stamp(b - 1).to_string()).collect())
    }

    /// Fitted segment means as a series on the same index.
    fn fitted(&self, series: &PySeries) -> PyResult<PySeries> {
        self.inner.fitted(&series.inner).map(PySeries::wrap).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.num_breaks()
    }

    fn __repr__(&self) -> String {
        format!("Segmentation(method={:?}, breaks={:?})", self.inner.method.name(), self.inner.breaks)
    }
}

impl PySegmentation {
    fn check(&self, series: &PySeries) -> PyResult<()> {
        if series.inner.len() != self.inner.n {
            return Err(PyValueError::new_err(format!(
                "segmentation covers {} observations, series has {}",
                self.inner.n,
                series.inner.len()
            )));
        }
        Ok(())
    }
}

/// Least-squares dating: BIC over `0..=max_breaks`, or exactly `breaks` when given.
#[pyfunction]
#[pyo3(signature = (series, min_len, max_breaks = 5, breaks = None))]
fn dp(py: Python<'_>, series: &PySeries, min_len: usize, max_breaks: usize, breaks: Option<usize>) -> PyResult<PySegmentation> {
    let s = series.inner.clone();
    py.detach(move || {
        let tri = RssTriangle::build(&s, min_len)?;
        match breaks {
            Some(m) => optimal_breaks(&tri, m),
            None => select_breaks_bic(&tri, max_breaks),
        }
    })
    .map(|inner| PySegmentation { inner })
    .map_err(err)
}

/// Wild binary segmentation.
#[pyfunction]
#[pyo3(signature = (series, num_intervals = 5000, threshold_constant = 1.3, min_len = 2, max_breaks = None, seed = 0))]
fn wbs(
    py: Python<'_>,
    series: &PySeries,
    num_intervals: usize,
    threshold_constant: f64,
    min_len: usize,
    max_breaks: Option<usize>,
    seed: u64,
) -> PyResult<PySegmentation> {
    let s = series.inner.clone();
    let cfg = WbsConfig {
        num_intervals,
        threshold_constant,
        max_breaks,
        seed,
        min_len,
    };
    py.detach(move || wbs_segment(&s, &cfg))
        .map(|inner| PySegmentation { inner })
        .map_err(err)
}

/// Divisive segmentation by energy statistics with permutation tests.
#[pyfunction]
#[pyo3(signature = (series, min_size = 30, alpha = 1.0, sig_level = 0.05, num_permutations = 199, seed = 0, max_breaks = None))]
#[allow(clippy::too_many_arguments)]
fn edivisive(
    py: Python<'_>,
    series: &PySeries,
    min_size: usize,
    alpha: f64,
    sig_level: f64,
    num_permutations: usize,
    seed: u64,
    max_breaks: Option<usize>,
) -> PyResult<PySegmentation> {
    let s = series.inner.clone();
    let cfg = EdivConfig {
        min_size,
        alpha,
        sig_level,
        num_permutations,
        seed,
        max_breaks,
    };
    py.detach(move || e_divisive(&s, &cfg))
        .map(|inner| PySegmentation { inner })
        .map_err(err)
}

/// Piecewise-constant signal plus noise; returns `(series, true_breaks)`.
#[pyfunction]
#[pyo3(signature = (means, lengths, sigma = 1.0, seed = 0, ar1 = None))]
fn synth(means: Vec<f64>, lengths: Vec<usize>, sigma: f64, seed: u64, ar1: Option<f64>) -> PyResult<(PySeries, Vec<usize>)> {
    let spec = SignalSpec {
        means,
        lengths,
        noise: ar1.map_or(Noise::Gaussian, |rho| Noise::Ar1 { rho }),
        sigma,
        seed,
    };
    let signal = spec.generate().map_err(err)?;
    let series = TimeSeries::from_values(signal.values).map_err(err)?;
    Ok((PySeries::wrap(series), signal.breaks))
}

#[pymodule]
fn pybreakscan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySeries>()?;
    m.add_class::<PyTestResult>()?;
    m.add_class::<PySegmentation>()?;
    m.add_function(wrap_pyfunction!(fluctuation_test, m)?)?;
    m.add_function(wrap_pyfunction!(long_run_variance, m)?)?;
    m.add_function(wrap_pyfunction!(fit_ar1, m)?)?;
    m.add_function(wrap_pyfunction!(kolmogorov_sf, m)?)?;
    m.add_function(wrap_pyfunction!(dp, m)?)?;
    m.add_function(wrap_pyfunction!(wbs, m)?)?;
    m.add_function(wrap_pyfunction!(edivisive, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    Ok(())
}
