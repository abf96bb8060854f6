//! Least-squares dating of multiple level shifts.
//!
//! The minimal total residual sum of squares over all partitions with a given
//! number of breaks is found by a Bellman recursion over segment costs; the
//! number of breaks is chosen by BIC.

use crate::error::{Error, Result};
use crate::segmentation::{Method, Segmentation, TracePoint};
use crate::series::TimeSeries;

/// Above this many observations segment costs are evaluated on demand instead of tabulated.
pub const DEFAULT_MATERIALIZE_LIMIT: usize = 5000;

/// Residual sums of squares `rss(i, j)` for every admissible segment `i..=j`.
#[derive(Debug, Clone)]
pub struct RssTriangle {
    values: Vec<f64>,
    min_len: usize,
    // Prefix sums of the centred values; index 0 holds 0.
    cum: Vec<f64>,
    cum_sq: Vec<f64>,
    row_start: Vec<usize>,
    table: Option<Vec<f64>>,
}

impl RssTriangle {
    pub fn build(s: &TimeSeries, min_len: usize) -> Result<Self> {
        Self::build_with_limit(s, min_len, DEFAULT_MATERIALIZE_LIMIT)
    }

    pub fn build_with_limit(s: &TimeSeries, min_len: usize, materialize_limit: usize) -> Result<Self> {
        let values = s.values().to_vec();
        let n = values.len();
        if min_len == 0 || min_len > n {
            return Err(Error::InvalidParameter(format!(
                "minimum segment length {min_len} must lie in 1..={n}"
            )));
        }
        let centre = values.iter().sum::<f64>() / n as f64;
        let mut cum = Vec::with_capacity(n + 1);
        let mut cum_sq = Vec::with_capacity(n + 1);
        cum.push(0.0);
        cum_sq.push(0.0);
        let (mut a, mut b) = (0.0, 0.0);
        for &v in &values {
            let c = v - centre;
            a += c;
            b += c * c;
            cum.push(a);
            cum_sq.push(b);
        }

        let mut row_start = Vec::with_capacity(n + 2);
        let mut total = 0;
        for i in 1..=n {
            row_start.push(total);
            total += (n + 2).saturating_sub(i + min_len);
        }
        row_start.push(total);

        let mut tri = Self {
            values,
            min_len,
            cum,
            cum_sq,
            row_start,
            table: None,
        };
        if n <= materialize_limit {
            let mut table = Vec::with_capacity(total);
            for i in 1..=n {
                // Running updates along the row keep short near-flat segments accurate.
                let mut mean = 0.0;
                let mut m2 = 0.0;
                for (k, &v) in tri.values[i - 1..].iter().enumerate() {
                    let delta = v - mean;
                    mean += delta / (k + 1) as f64;
                    m2 += delta * (v - mean);
                    if k + 1 >= min_len {
                        table.push(m2.max(0.0));
                    }
                }
            }
            tri.table = Some(table);
        }
        Ok(tri)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_len(&self) -> usize {
        self.min_len
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_materialized(&self) -> bool {
        self.table.is_some()
    }

    fn rss_from_cumulants(&self, i: usize, j: usize) -> f64 {
        let len = (j - i + 1) as f64;
        let s = self.cum[j] - self.cum[i - 1];
        let ss = self.cum_sq[j] - self.cum_sq[i - 1];
        (ss - s * s / len).max(0.0)
    }

    /// RSS of the segment `i..=j` (1-based, inclusive). The segment must be admissible.
    pub fn rss(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i >= 1 && j <= self.len() && j + 1 >= i + self.min_len, "inadmissible segment {i}..={j}");
        match &self.table {
            Some(t) => t[self.row_start[i - 1] + (j + 1 - i - self.min_len)],
            None => self.rss_from_cumulants(i, j),
        }
    }
}

/// Optimal costs `C_j(k)` for `j = 1..=segments` and back-pointers.
struct DpTable {
    cost: Vec<Vec<f64>>,
    parent: Vec<Vec<usize>>,
}

impl DpTable {
    #[allow(clippy::needless_range_loop)]
    fn compute(tri: &RssTriangle, segments: usize) -> Self {
        let n = tri.len();
        let h = tri.min_len();
        let mut cost = vec![vec![f64::INFINITY; n + 1]; segments + 1];
        let mut parent = vec![vec![0usize; n + 1]; segments + 1];
        for k in h..=n {
            cost[1][k] = tri.rss(1, k);
        }
        for j in 2..=segments {
            for k in (j * h)..=n {
                let mut best = f64::INFINITY;
                let mut best_tau = 0;
                for tau in ((j - 1) * h)..=(k - h) {
                    let c = cost[j - 1][tau] + tri.rss(tau + 1, k);
                    let better = c < best
                        || (c == best && best_tau != 0 && lex_less(&parent, j - 1, tau, best_tau));
                    if better {
                        best = c;
                        best_tau = tau;
                    }
                }
                cost[j][k] = best;
                parent[j][k] = best_tau;
            }
        }
        Self { cost, parent }
    }

    fn breaks(&self, segments: usize, end: usize) -> Vec<usize> {
        breaks_of(&self.parent, segments, end)
    }
}

fn breaks_of(parent: &[Vec<usize>], segments: usize, end: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(segments.saturating_sub(1));
    let (mut j, mut k) = (segments, end);
    while j > 1 {
        k = parent[j][k];
        out.push(k);
        j -= 1;
    }
    out.reverse();
    out
}

// Is `breaks(j, a) ++ [a]` lexicographically smaller than `breaks(j, b) ++ [b]`, given a > b?
fn lex_less(parent: &[Vec<usize>], j: usize, a: usize, b: usize) -> bool {
    let pa = breaks_of(parent, j, a);
    let pb = breaks_of(parent, j, b);
    pa < pb
}

fn check_feasible(tri: &RssTriangle, m: usize) -> Result<()> {
    if (m + 1) * tri.min_len() > tri.len() {
        return Err(Error::Infeasible {
            m,
            min_len: tri.min_len(),
            n: tri.len(),
        });
    }
    Ok(())
}

fn segmentation_from_dp(tri: &RssTriangle, dp: &DpTable, m: usize) -> Result<Segmentation> {
    let breaks = dp.breaks(m + 1, tri.len());
    let mut seg = Segmentation::from_breaks(tri.values(), breaks, Method::Dp, tri.min_len())?;
    seg.rss_total = dp.cost[m + 1][tri.len()];
    Ok(seg)
}

/// Partition with exactly `m` breaks minimising the total RSS.
///
/// Among equally good partitions the lexicographically smallest break vector wins.
pub fn optimal_breaks(tri: &RssTriangle, m: usize) -> Result<Segmentation> {
    check_feasible(tri, m)?;
    let dp = DpTable::compute(tri, m + 1);
    segmentation_from_dp(tri, &dp, m)
}

/// `T log(RSS/T) + (2m + 2) log T`: m + 1 means, m break dates and one variance.
pub fn bic(rss: f64, n: usize, m: usize) -> f64 {
    let n_f = n as f64;
    let fit = if rss > 0.0 {
        n_f * (rss / n_f).ln()
    } else {
        f64::NEG_INFINITY
    };
    fit + (2 * m + 2) as f64 * n_f.ln()
}

/// Optimal segmentations for `m = 0..=max_m`, keeping the one with the smallest BIC.
pub fn select_breaks_bic(tri: &RssTriangle, max_m: usize) -> Result<Segmentation> {
    check_feasible(tri, max_m)?;
    let dp = DpTable::compute(tri, max_m + 1);
    let n = tri.len();
    let trace: Vec<TracePoint> = (0..=max_m)
        .map(|m| TracePoint {
            m,
            value: bic(dp.cost[m + 1][n], n, m),
        })
        .collect();
    let best = trace
        .iter()
        .fold(&trace[0], |best, p| if p.value < best.value { p } else { best })
        .m;
    let mut seg = segmentation_from_dp(tri, &dp, best)?;
    seg.criterion_trace = trace;
    Ok(seg)
}

/// Step function of segment means over the series' index.
pub fn fitted_step(s: &TimeSeries, seg: &Segmentation) -> Result<TimeSeries> {
    seg.fitted(s)
}
