//! Empirical fluctuation processes and boundary-crossing tests for a constant level.
//!
//! Residual partial sums (recursive or OLS) and moving sums of OLS residuals are
//! scaled by `sigma * sqrt(T)` and compared with Brownian-motion or Brownian-bridge
//! boundaries. Under serial dependence the scale is a Bartlett long-run variance.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    RecCusum,
    OlsCusum,
    Mosum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Bartlett,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum VarianceKind {
    /// Sample variance of OLS residuals (divisor `T - 1`).
    Plain,
    /// Sample variance of the recursive residuals (divisor `T - 2`).
    PlainRecursive,
    LongRun { kernel: Kernel, bandwidth: usize },
    /// Supplied by the caller.
    Fixed,
}

/// A variance used to scale a fluctuation process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub value: f64,
    pub kind: VarianceKind,
    /// Set when a long-run estimate was raised to its numerical floor.
    pub floored: bool,
}

impl VarianceEstimate {
    pub fn plain(s: &TimeSeries) -> Result<Self> {
        let e = ols_residuals(s)?;
        Ok(Self {
            value: sum_sq(&e) / (e.len() - 1) as f64,
            kind: VarianceKind::Plain,
            floored: false,
        })
    }

    pub fn plain_recursive(s: &TimeSeries) -> Result<Self> {
        if s.len() < 3 {
            return Err(Error::InsufficientData {
                needed: 3,
                found: s.len(),
            });
        }
        let e = recursive_residuals(s)?;
        let mean = running_mean(&e);
        let ss: f64 = e.iter().map(|v| (v - mean) * (v - mean)).sum();
        Ok(Self {
            value: ss / (e.len() - 1) as f64,
            kind: VarianceKind::PlainRecursive,
            floored: false,
        })
    }

    pub fn fixed(value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidParameter(format!("variance {value} must be finite and >= 0")));
        }
        Ok(Self {
            value,
            kind: VarianceKind::Fixed,
            floored: false,
        })
    }

    /// Standard deviation.
    pub fn scale(&self) -> f64 {
        self.value.sqrt()
    }
}

/// Lag truncation for the long-run variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// `floor(4 (T/100)^(2/9))`.
    Auto,
    Lags(usize),
}

impl Bandwidth {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            Self::Auto => (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize,
            Self::Lags(l) => l,
        }
    }
}

/// Mean, exact for constant input.
fn running_mean(y: &[f64]) -> f64 {
    let mut mean = 0.0;
    for (k, &v) in y.iter().enumerate() {
        mean += (v - mean) / (k + 1) as f64;
    }
    mean
}

fn sum_sq(e: &[f64]) -> f64 {
    e.iter().map(|v| v * v).sum()
}

/// One-step-ahead errors `y_i - mean(y_1..y_{i-1})` for `i = 2..T`.
pub fn recursive_residuals(s: &TimeSeries) -> Result<Vec<f64>> {
    let y = s.values();
    if y.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: y.len(),
        });
    }
    let mut mean = y[0];
    let mut out = Vec::with_capacity(y.len() - 1);
    for (k, &v) in y.iter().enumerate().skip(1) {
        let e = v - mean;
        out.push(e);
        mean += e / (k + 1) as f64;
    }
    Ok(out)
}

/// Deviations from the grand mean.
pub fn ols_residuals(s: &TimeSeries) -> Result<Vec<f64>> {
    let y = s.values();
    if y.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: y.len(),
        });
    }
    let mean = running_mean(y);
    Ok(y.iter().map(|v| v - mean).collect())
}

/// Bartlett-kernel long-run variance of the demeaned series.
pub fn long_run_variance(s: &TimeSeries, bandwidth: Bandwidth) -> Result<VarianceEstimate> {
    let n = s.len();
    if n < 4 {
        return Err(Error::InsufficientData { needed: 4, found: n });
    }
    let lags = match bandwidth {
        Bandwidth::Auto => bandwidth.resolve(n).min(n - 2),
        Bandwidth::Lags(l) if l <= n - 2 => l,
        Bandwidth::Lags(l) => {
            return Err(Error::InvalidParameter(format!(
                "bandwidth {l} exceeds T - 2 = {}",
                n - 2
            )))
        }
    };
    let d = ols_residuals(s)?;
    let autocov = |j: usize| d[j..].iter().zip(&d[..n - j]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
    let gamma0 = autocov(0);
    let mut omega = gamma0;
    for j in 1..=lags {
        let w = 1.0 - j as f64 / (lags + 1) as f64;
        omega += 2.0 * w * autocov(j);
    }
    let floor = 1e-12 * gamma0;
    let floored = gamma0 > 0.0 && omega < floor;
    Ok(VarianceEstimate {
        value: if floored { floor } else { omega },
        kind: VarianceKind::LongRun {
            kernel: Kernel::Bartlett,
            bandwidth: lags,
        },
        floored,
    })
}

/// A scaled residual-sum path; `path[k]` sits at `t = k / T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationProcess {
    pub path: Vec<f64>,
    pub kind: ProcessKind,
    pub scale: VarianceEstimate,
    /// Window as a fraction of `T` (MOSUM only).
    pub bandwidth: Option<f64>,
    /// Window length in observations (MOSUM only).
    pub window: Option<usize>,
    pub n: usize,
}

impl FluctuationProcess {
    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.path.len()).map(|k| self.time(k))
    }

    pub fn sup_abs(&self) -> f64 {
        self.path.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

fn normaliser(scale: &VarianceEstimate, n: usize, residuals: &[f64]) -> Result<Option<f64>> {
    if scale.value > 0.0 {
        Ok(Some(scale.scale() * (n as f64).sqrt()))
    } else if residuals.iter().all(|&e| e == 0.0) {
        // Every partial sum is zero whatever the scale.
        Ok(None)
    } else {
        Err(Error::DegenerateScale)
    }
}

/// Rec-CUSUM or OLS-CUSUM process, including the origin `path[0] = 0`.
pub fn build_process(s: &TimeSeries, kind: ProcessKind, scale: VarianceEstimate) -> Result<FluctuationProcess> {
    let residuals = match kind {
        ProcessKind::RecCusum => recursive_residuals(s)?,
        ProcessKind::OlsCusum => ols_residuals(s)?,
        ProcessKind::Mosum => {
            return Err(Error::Unsupported(
                "MOSUM processes need a window; use mosum_process".into(),
            ))
        }
    };
    let n = s.len();
    let norm = normaliser(&scale, n, &residuals)?;
    let mut path = Vec::with_capacity(residuals.len() + 1);
    path.push(0.0);
    let mut acc = 0.0;
    for e in &residuals {
        acc += e;
        path.push(norm.map_or(0.0, |d| acc / d));
    }
    if kind == ProcessKind::OlsCusum {
        // OLS residuals sum to zero; drop the rounding residue at the end point.
        *path.last_mut().expect("non-empty") = 0.0;
    }
    Ok(FluctuationProcess {
        path,
        kind,
        scale,
        bandwidth: None,
        window: None,
        n,
    })
}

/// Moving sums of `h = floor(fraction * T)` consecutive OLS residuals, `k = 0..T-h`.
pub fn mosum_process(s: &TimeSeries, bandwidth_fraction: f64, scale: VarianceEstimate) -> Result<FluctuationProcess> {
    if !(bandwidth_fraction > 0.0 && bandwidth_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "bandwidth fraction {bandwidth_fraction} must lie in (0, 1]"
        )));
    }
    let n = s.len();
    let h = (bandwidth_fraction * n as f64).floor() as usize;
    if h < 2 {
        return Err(Error::WindowTooSmall { window: h });
    }
    let residuals = ols_residuals(s)?;
    let norm = normaliser(&scale, n, &residuals)?;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for e in &residuals {
        acc += e;
        prefix.push(acc);
    }
    let path = (0..=n - h)
        .map(|k| {
            let sum = if h == n { 0.0 } else { prefix[k + h] - prefix[k] };
            norm.map_or(0.0, |d| sum / d)
        })
        .collect();
    Ok(FluctuationProcess {
        path,
        kind: ProcessKind::Mosum,
        scale,
        bandwidth: Some(bandwidth_fraction),
        window: Some(h),
        n,
    })
}

/// Rejection boundary of a fluctuation test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Boundary {
    /// `±c`, `c` the upper `level` quantile of `sup |B⁰(t)|`.
    BridgeConstant { critical: f64 },
    /// `±λ(1 + 2t)` for a Brownian motion.
    LinearBrownian { lambda: f64 },
    /// `±c` supplied by the caller.
    UserConstant { critical: f64 },
}

impl Boundary {
    pub fn upper(&self, t: f64) -> f64 {
        match *self {
            Self::BridgeConstant { critical } | Self::UserConstant { critical } => critical,
            Self::LinearBrownian { lambda } => lambda * (1.0 + 2.0 * t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub kind: ProcessKind,
    pub statistic: f64,
    /// `None` when the test is against a caller-supplied critical value.
    pub p_value: Option<f64>,
    pub crossed: bool,
    pub boundary: Boundary,
    pub level: f64,
}

/// Boundary constants `λ` for the Rec-CUSUM linear boundary at levels 1%, 5%, 10%.
pub const REC_CUSUM_LAMBDA: [(f64, f64); 3] = [(0.01, 1.143), (0.05, 0.948), (0.10, 0.850)];

fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Probability that a Brownian motion on [0, 1] crosses `±λ(1 + 2t)`.
pub fn linear_boundary_crossing_probability(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = 2.0 * (1.0 - standard_normal_cdf(3.0 * lambda) + (-4.0 * lambda * lambda).exp() * standard_normal_cdf(lambda));
    p.clamp(0.0, 1.0)
}

/// `P(sup |B⁰(t)| > x) = 2 Σ_{k≥1} (-1)^{k+1} exp(-2 k² x²)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        // The alternating series cancels badly here; use the dual form.
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let mut cdf = 0.0;
        for k in 1..=50u32 {
            let odd = f64::from(2 * k - 1);
            cdf += (-odd * odd * pi2 / (8.0 * x * x)).exp();
        }
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut k = 1u32;
    loop {
        let kf = f64::from(k);
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-12 || k > 100_000 {
            break;
        }
        k += 1;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Critical value `c` with `kolmogorov_sf(c) = level`.
pub fn kolmogorov_critical_value(level: f64) -> f64 {
    let (mut lo, mut hi) = (0.1, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level <= 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("level {level} must lie in (0, 0.5]")))
    }
}

/// Sup-type test of the process against its limiting boundary.
///
/// OLS-CUSUM uses the Brownian-bridge supremum, Rec-CUSUM the linear boundary
/// with tabulated `λ` (levels 0.01, 0.05, 0.10 only). MOSUM is not supported here;
/// see [`critical_value_test`].
pub fn sup_abs_test(p: &FluctuationProcess, level: f64) -> Result<TestResult> {
    check_level(level)?;
    match p.kind {
        ProcessKind::OlsCusum => {
            let statistic = p.sup_abs();
            let p_value = kolmogorov_sf(statistic);
            Ok(TestResult {
                kind: p.kind,
                statistic,
                p_value: Some(p_value),
                crossed: p_value < level,
                boundary: Boundary::BridgeConstant {
                    critical: kolmogorov_critical_value(level),
                },
                level,
            })
        }
        ProcessKind::RecCusum => {
            let lambda = REC_CUSUM_LAMBDA
                .iter()
                .find(|(l, _)| (l - level).abs() < 1e-9)
                .map(|&(_, lam)| lam)
                .ok_or_else(|| {
                    Error::Unsupported(format!(
                        "Rec-CUSUM boundary is tabulated only for levels 0.01, 0.05, 0.10 (got {level})"
                    ))
                })?;
            // Smallest λ whose boundary the path touches.
            let statistic = p
                .path
                .iter()
                .enumerate()
                .fold(0.0_f64, |m, (k, v)| m.max(v.abs() / (1.0 + 2.0 * p.time(k))));
            let p_value = linear_boundary_crossing_probability(statistic);
            Ok(TestResult {
                kind: p.kind,
                statistic,
                p_value: Some(p_value),
                crossed: p_value < level,
                boundary: Boundary::LinearBrownian { lambda },
                level,
            })
        }
        ProcessKind::Mosum => Err(Error::Unsupported(
            "MOSUM p-values are not available; test against a critical value instead".into(),
        )),
    }
}

/// Crossing check of `sup |path|` against a caller-supplied constant boundary.
pub fn critical_value_test(p: &FluctuationProcess, critical: f64, level: f64) -> Result<TestResult> {
    check_level(level)?;
    if !(critical.is_finite() && critical > 0.0) {
        return Err(Error::InvalidParameter(format!("critical value {critical} must be positive")));
    }
    let statistic = p.sup_abs();
    Ok(TestResult {
        kind: p.kind,
        statistic,
        p_value: None,
        crossed: statistic > critical,
        boundary: Boundary::UserConstant { critical },
        level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::from_values(v.to_vec()).unwrap()
    }

    fn unit() -> VarianceEstimate {
        VarianceEstimate::fixed(1.0).unwrap()
    }

    #[test]
    fn recursive_residual_examples() {
        assert_eq!(recursive_residuals(&ts(&[1.0, 1.0, 1.0])).unwrap(), vec![0.0, 0.0]);
        assert_eq!(recursive_residuals(&ts(&[0.0, 2.0])).unwrap(), vec![2.0]);
        assert_eq!(recursive_residuals(&ts(&[1.0, 3.0, 5.0])).unwrap(), vec![2.0, 3.0]);
        assert!(recursive_residuals(&ts(&[1.0])).is_err());
    }

    #[test]
    fn recursive_residuals_of_awkward_constant_are_zero() {
        assert!(recursive_residuals(&ts(&[0.1; 50])).unwrap().iter().all(|&e| e == 0.0));
        assert!(ols_residuals(&ts(&[0.1; 50])).unwrap().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn ols_residual_examples() {
        assert_eq!(ols_residuals(&ts(&[1.0, 2.0, 3.0])).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(ols_residuals(&ts(&[7.0; 4])).unwrap(), vec![0.0; 4]);
        let e = ols_residuals(&ts(&[0.0, 0.0, 6.0])).unwrap();
        for (a, b) in e.iter().zip([-2.0, -2.0, 4.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn plain_variance_divisor() {
        let v = VarianceEstimate::plain(&ts(&[1.0, 2.0, 3.0])).unwrap();
        assert_abs_diff_eq!(v.value, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_lag_long_run_is_gamma0() {
        let s = ts(&[1.0, 4.0, 2.0, 8.0, 5.0]);
        let v = long_run_variance(&s, Bandwidth::Lags(0)).unwrap();
        let e = ols_residuals(&s).unwrap();
        assert_abs_diff_eq!(v.value, sum_sq(&e) / 5.0, epsilon = 1e-12);
        assert!(long_run_variance(&s, Bandwidth::Lags(4)).is_err());
        assert!(long_run_variance(&ts(&[1.0, 2.0, 3.0]), Bandwidth::Auto).is_err());
    }

    #[test]
    fn long_run_by_hand() {
        // d = [-1.5, -0.5, 0.5, 1.5]; γ0 = 5/4, γ1 = (0.75 - 0.25 + 0.75)/4 = 5/16
        let v = long_run_variance(&ts(&[1.0, 2.0, 3.0, 4.0]), Bandwidth::Lags(1)).unwrap();
        assert_abs_diff_eq!(v.value, 1.25 + 2.0 * 0.5 * 0.3125, epsilon = 1e-14);
        assert!(!v.floored);
        assert_eq!(Bandwidth::Auto.resolve(100), 4);
        assert_eq!(Bandwidth::Auto.resolve(20000), 12);
    }

    #[test]
    fn ols_cusum_constant_and_endpoint() {
        let p = build_process(&ts(&[3.0; 9]), ProcessKind::OlsCusum, unit()).unwrap();
        assert!(p.path.iter().all(|&v| v == 0.0));
        assert_eq!(p.path.len(), 10);

        let s = ts(&[0.3, 1.7, -2.2, 5.1, 0.01]);
        let p = build_process(&s, ProcessKind::OlsCusum, VarianceEstimate::plain(&s).unwrap()).unwrap();
        assert_eq!(p.path[0], 0.0);
        assert_eq!(*p.path.last().unwrap(), 0.0);
    }

    #[test]
    fn ols_cusum_step_minimum() {
        let s = ts(&[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        let var = VarianceEstimate::plain(&s).unwrap();
        let p = build_process(&s, ProcessKind::OlsCusum, var).unwrap();
        let (kmin, vmin) = p
            .path
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
        assert_eq!(kmin, 4);
        assert_abs_diff_eq!(vmin, -(4.0 * 0.5) / (var.scale() * 8f64.sqrt()), epsilon = 1e-14);
    }

    #[test]
    fn rec_cusum_shape() {
        let s = ts(&[1.0, 3.0, 5.0, 2.0]);
        let p = build_process(&s, ProcessKind::RecCusum, unit()).unwrap();
        assert_eq!(p.path.len(), 4);
        assert_eq!(p.path[0], 0.0);
        assert_abs_diff_eq!(p.path[1], 2.0 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.path[2], 5.0 / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_scale() {
        let s = ts(&[1.0, 2.0, 3.0]);
        let zero = VarianceEstimate::fixed(0.0).unwrap();
        assert!(matches!(build_process(&s, ProcessKind::OlsCusum, zero), Err(Error::DegenerateScale)));
        let flat = ts(&[2.0; 5]);
        let v = VarianceEstimate::plain(&flat).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(build_process(&flat, ProcessKind::OlsCusum, v).unwrap().path.iter().all(|&x| x == 0.0));
        assert!(matches!(
            build_process(&s, ProcessKind::Mosum, unit()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn mosum_examples() {
        let flat = mosum_process(&ts(&[4.0; 10]), 0.3, unit()).unwrap();
        assert!(flat.path.iter().all(|&v| v == 0.0));

        // Residuals ±0.5; window 4 gives moving sums -2, -1, 0, 1, 2.
        let s = ts(&[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        let p = mosum_process(&s, 0.5, unit()).unwrap();
        let d = 8f64.sqrt();
        let expected = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|v| v / d);
        assert_eq!(p.path.len(), 5);
        for (a, b) in p.path.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }

        let full = mosum_process(&s, 1.0, unit()).unwrap();
        assert_eq!(full.path, vec![0.0]);

        assert!(matches!(mosum_process(&s, 0.2, unit()), Err(Error::WindowTooSmall { window: 1 })));
    }

    #[test]
    fn zero_path_test() {
        let p = build_process(&ts(&[1.0; 20]), ProcessKind::OlsCusum, unit()).unwrap();
        let r = sup_abs_test(&p, 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, Some(1.0));
        assert!(!r.crossed);
    }

    #[test]
    fn level_validation_and_unsupported() {
        let s = ts(&[1.0, 5.0, 2.0, 8.0, 3.0, 9.0]);
        let p = build_process(&s, ProcessKind::RecCusum, unit()).unwrap();
        assert!(matches!(sup_abs_test(&p, 0.07), Err(Error::Unsupported(_))));
        assert!(sup_abs_test(&p, 0.05).is_ok());
        assert!(sup_abs_test(&p, 0.0).is_err());
        assert!(sup_abs_test(&p, 0.6).is_err());
        let m = mosum_process(&s, 0.5, unit()).unwrap();
        assert!(matches!(sup_abs_test(&m, 0.05), Err(Error::Unsupported(_))));
        let r = critical_value_test(&m, 1.0, 0.05).unwrap();
        assert_eq!(r.p_value, None);
    }

    #[test]
    fn normal_cdf_reference_points() {
        assert_abs_diff_eq!(standard_normal_cdf(0.0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(standard_normal_cdf(1.959_963_985), 0.975, epsilon = 1e-9);
        assert_abs_diff_eq!(standard_normal_cdf(-1.0), 0.158_655_254, epsilon = 1e-9);
    }

    /// Solve the crossing probability for each tabulated level by bisection.
    #[test]
    fn tabulated_lambdas_match_crossing_formula() {
        for (level, lambda) in REC_CUSUM_LAMBDA {
            let (mut lo, mut hi) = (0.1, 3.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if linear_boundary_crossing_probability(mid) > level {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert_abs_diff_eq!(lo, lambda, epsilon = 1e-3);
        }
    }
}
