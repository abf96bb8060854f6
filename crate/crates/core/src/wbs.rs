//! Wild binary segmentation for changes in the mean.
//!
//! Weighted CUSUM contrasts are evaluated on randomly drawn subintervals; the
//! strongest contrast inside the current segment is split off if it exceeds
//! `C * sigma * sqrt(2 log T)`, and both halves are processed recursively.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segmentation::{Method, Segmentation, TracePoint};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WbsConfig {
    pub num_intervals: usize,
    pub threshold_constant: f64,
    pub max_breaks: Option<usize>,
    pub seed: u64,
    pub min_len: usize,
}

impl Default for WbsConfig {
    fn default() -> Self {
        Self {
            num_intervals: 5000,
            threshold_constant: 1.3,
            max_breaks: None,
            seed: 0,
            min_len: 2,
        }
    }
}

impl WbsConfig {
    fn validate(&self) -> Result<()> {
        if self.num_intervals == 0 {
            return Err(Error::InvalidParameter("number of intervals must be at least 1".into()));
        }
        if !(self.threshold_constant > 0.0 && self.threshold_constant.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "threshold constant {} must be positive",
                self.threshold_constant
            )));
        }
        if self.min_len < 1 {
            return Err(Error::InvalidParameter("minimum segment length must be at least 1".into()));
        }
        Ok(())
    }
}

/// Best split of an interval and its absolute CUSUM contrast.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CusumMax {
    pub split: usize,
    pub stat: f64,
}

struct Prefix(Vec<f64>);

impl Prefix {
    fn new(y: &[f64]) -> Self {
        let mut p = Vec::with_capacity(y.len() + 1);
        p.push(0.0);
        let mut acc = 0.0;
        for v in y {
            acc += v;
            p.push(acc);
        }
        Self(p)
    }

    fn sum(&self, a: usize, b: usize) -> f64 {
        self.0[b] - self.0[a - 1]
    }

    /// Max |X(b)| over `b` in `s..e` with at least `min_len` points on each side.
    fn cusum_max(&self, s: usize, e: usize, min_len: usize) -> Option<CusumMax> {
        let n = (e - s + 1) as f64;
        let total = self.sum(s, e);
        let lo = s + min_len - 1;
        let hi = e.checked_sub(min_len)?;
        if lo > hi {
            return None;
        }
        let mut best = CusumMax { split: lo, stat: -1.0 };
        for b in lo..=hi {
            let left_n = (b - s + 1) as f64;
            let right_n = n - left_n;
            let left = self.sum(s, b);
            let right = total - left;
            let x = ((right_n / (n * left_n)).sqrt() * left - (left_n / (n * right_n)).sqrt() * right).abs();
            if x > best.stat {
                best = CusumMax { split: b, stat: x };
            }
        }
        Some(best)
    }
}

/// Weighted two-sample CUSUM over the 1-based interval `s..=e`.
pub fn interval_cusum(y: &[f64], s: usize, e: usize) -> Result<CusumMax> {
    if s < 1 || e > y.len() || s >= e {
        return Err(Error::InvalidParameter(format!(
            "interval {s}..={e} is degenerate or outside 1..={}",
            y.len()
        )));
    }
    // Shift by the first value so a constant interval gives exactly zero.
    let shifted: Vec<f64> = y[s - 1..e].iter().map(|v| v - y[s - 1]).collect();
    let p = Prefix::new(&shifted);
    let best = p.cusum_max(1, e - s + 1, 1).expect("interval has a split");
    Ok(CusumMax {
        split: best.split + s - 1,
        stat: best.stat,
    })
}

/// MAD of first differences divided by `sqrt(2) * 0.6745`.
pub fn noise_scale(y: &[f64]) -> f64 {
    if y.len() < 2 {
        return 0.0;
    }
    let mut d: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let med = median(&mut d);
    let mut dev: Vec<f64> = d.iter().map(|v| (v - med).abs()).collect();
    median(&mut dev) / (std::f64::consts::SQRT_2 * 0.6745)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Draw intervals uniformly among pairs `s < e` with `e - s + 1 >= 2 * min_len`.
fn draw_intervals(n: usize, cfg: &WbsConfig) -> Vec<(usize, usize)> {
    let min_width = 2 * cfg.min_len;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.num_intervals);
    if n < min_width.max(2) {
        return out;
    }
    while out.len() < cfg.num_intervals {
        let a = rng.random_range(1..=n);
        let b = rng.random_range(1..=n);
        let (s, e) = if a < b { (a, b) } else { (b, a) };
        if s != e && e - s + 1 >= min_width {
            out.push((s, e));
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Found {
    split: usize,
    stat: f64,
}

/// Wild binary segmentation of the series' mean.
pub fn wbs_segment(s: &TimeSeries, cfg: &WbsConfig) -> Result<Segmentation> {
    cfg.validate()?;
    let y = s.values();
    let n = y.len();
    if n < 2 * cfg.min_len {
        return Err(Error::InsufficientData {
            needed: 2 * cfg.min_len,
            found: n,
        });
    }
    let origin = y[0];
    let shifted: Vec<f64> = y.iter().map(|v| v - origin).collect();
    let prefix = Prefix::new(&shifted);
    let max_abs = shifted.iter().fold(0.0_f64, |m, v| m.max(v.abs()));

    let sigma = noise_scale(y);
    let threshold = cfg.threshold_constant * sigma * (2.0 * (n as f64).ln()).sqrt();
    // Contrasts below this are rounding noise, e.g. on a constant stretch.
    let floor = 1e-10 * max_abs * (n as f64).sqrt();
    let threshold = threshold.max(floor);

    let mut intervals = draw_intervals(n, cfg);
    intervals.sort_unstable();

    let mut found = Vec::new();
    let mut stack = vec![(1usize, n)];
    while let Some((a, b)) = stack.pop() {
        if b + 1 < a + 2 * cfg.min_len {
            continue;
        }
        // The segment itself is always a candidate; ties favour the smaller split,
        // then the earlier interval start.
        let mut best: Option<(CusumMax, usize)> = prefix.cusum_max(a, b, cfg.min_len).map(|c| (c, a));
        for &(is, ie) in intervals.iter().filter(|&&(is, ie)| is >= a && ie <= b) {
            if let Some(c) = prefix.cusum_max(is, ie, cfg.min_len) {
                let replace = match best {
                    None => true,
                    Some((bc, bs)) => {
                        c.stat > bc.stat
                            || (c.stat == bc.stat && (c.split < bc.split || (c.split == bc.split && is < bs)))
                    }
                };
                if replace {
                    best = Some((c, is));
                }
            }
        }
        let Some((c, _)) = best else { continue };
        if c.stat > threshold {
            found.push(Found {
                split: c.split,
                stat: c.stat,
            });
            stack.push((c.split + 1, b));
            stack.push((a, c.split));
        }
    }

    found.sort_by(|x, y| y.stat.total_cmp(&x.stat).then(x.split.cmp(&y.split)));
    if let Some(cap) = cfg.max_breaks {
        found.truncate(cap);
    }
    let trace = found
        .iter()
        .enumerate()
        .map(|(i, f)| TracePoint {
            m: i + 1,
            value: f.stat,
        })
        .collect();
    let mut breaks: Vec<usize> = found.iter().map(|f| f.split).collect();
    breaks.sort_unstable();
    let mut seg = Segmentation::from_breaks(y, breaks, Method::Wbs, cfg.min_len)?;
    seg.criterion_trace = trace;
    Ok(seg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::from_values(v.to_vec()).unwrap()
    }

    fn step(levels: &[(f64, usize)]) -> Vec<f64> {
        levels.iter().flat_map(|&(v, n)| std::iter::repeat_n(v, n)).collect()
    }

    #[test]
    fn cusum_examples() {
        let c = interval_cusum(&[0.0, 0.0, 1.0, 1.0], 1, 4).unwrap();
        assert_eq!(c.split, 2);
        assert_abs_diff_eq!(c.stat, 1.0, epsilon = 1e-14);
        assert_eq!(interval_cusum(&[0.7; 6], 1, 6).unwrap().stat, 0.0);
        let c = interval_cusum(&[9.0, 9.0, 9.0, -2.0, -2.0, -2.0], 1, 6).unwrap();
        assert_eq!(c.split, 3);
        assert!(interval_cusum(&[1.0, 2.0], 2, 2).is_err());
        assert!(interval_cusum(&[1.0, 2.0], 1, 3).is_err());
    }

    #[test]
    fn cusum_on_subinterval_reports_global_index() {
        let y = [5.0, 5.0, 0.0, 0.0, 3.0, 3.0, 3.0];
        let c = interval_cusum(&y, 3, 7).unwrap();
        assert_eq!(c.split, 4);
    }

    #[test]
    fn noise_scale_of_gaussian_like_differences() {
        assert_eq!(noise_scale(&[1.0; 10]), 0.0);
        // diffs = [1, -1, 1, -1, ...]: median 0 (even count), MAD 1
        let y: Vec<f64> = (0..11).map(|i| (i % 2) as f64).collect();
        assert_abs_diff_eq!(noise_scale(&y), 1.0 / (std::f64::consts::SQRT_2 * 0.6745), epsilon = 1e-12);
    }

    #[test]
    fn noiseless_step_and_constant() {
        let y = step(&[(0.0, 50), (5.0, 50)]);
        for seed in 0..5 {
            let cfg = WbsConfig {
                seed,
                num_intervals: 200,
                ..WbsConfig::default()
            };
            assert_eq!(wbs_segment(&ts(&y), &cfg).unwrap().breaks, vec![50]);
        }
        let flat = wbs_segment(&ts(&[0.3; 40]), &WbsConfig::default()).unwrap();
        assert!(flat.breaks.is_empty());
    }

    #[test]
    fn cap_keeps_strongest() {
        let y = step(&[(0.0, 20), (10.0, 20), (11.0, 20), (0.0, 20)]);
        let cfg = WbsConfig {
            num_intervals: 300,
            ..WbsConfig::default()
        };
        let all = wbs_segment(&ts(&y), &cfg).unwrap();
        assert_eq!(all.breaks, vec![20, 40, 60]);
        let capped = wbs_segment(&ts(&y), &WbsConfig { max_breaks: Some(2), ..cfg }).unwrap();
        assert_eq!(capped.breaks, vec![20, 60]);
    }

    #[test]
    fn short_series_rejected() {
        let cfg = WbsConfig {
            min_len: 3,
            ..WbsConfig::default()
        };
        assert!(wbs_segment(&ts(&[1.0; 5]), &cfg).is_err());
        assert!(wbs_segment(&ts(&[1.0; 5]), &WbsConfig { num_intervals: 0, ..WbsConfig::default() }).is_err());
    }
}
