//! Divisive segmentation by energy statistics.
//!
//! Segments are bisected at the split maximising the scaled energy divergence
//! between the two sides; each candidate is accepted only if a permutation test
//! rejects homogeneity of the segment. With `alpha = 2` the divergence reduces to
//! twice the squared mean difference, so only mean changes are detected.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segmentation::{Method, Segmentation, TracePoint};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdivConfig {
    pub min_size: usize,
    /// Distance exponent in (0, 2].
    pub alpha: f64,
    pub sig_level: f64,
    pub num_permutations: usize,
    pub seed: u64,
    pub max_breaks: Option<usize>,
}

impl Default for EdivConfig {
    fn default() -> Self {
        Self {
            min_size: 30,
            alpha: 1.0,
            sig_level: 0.05,
            num_permutations: 199,
            seed: 0,
            max_breaks: None,
        }
    }
}

impl EdivConfig {
    fn validate(&self) -> Result<()> {
        if self.min_size < 2 {
            return Err(Error::InvalidParameter("minimum segment size must be at least 2".into()));
        }
        check_alpha(self.alpha)?;
        if !(self.sig_level > 0.0 && self.sig_level < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "significance level {} must lie in (0, 1)",
                self.sig_level
            )));
        }
        if self.num_permutations == 0 {
            return Err(Error::InvalidParameter("need at least one permutation".into()));
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha {alpha} must lie in (0, 2]")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDivergence {
    /// Sample energy divergence `Ê(X, Y; α)`.
    pub e_hat: f64,
    /// `Ê` scaled by `nm / (n + m)`.
    pub q_hat: f64,
}

#[inline]
fn distance(a: f64, b: f64, alpha: f64) -> f64 {
    let d = (a - b).abs();
    if alpha == 1.0 {
        d
    } else if alpha == 2.0 {
        d * d
    } else {
        d.powf(alpha)
    }
}

fn double_sum(x: &[f64], y: &[f64], alpha: f64) -> f64 {
    x.iter().map(|&a| y.iter().map(|&b| distance(a, b, alpha)).sum::<f64>()).sum()
}

/// Energy divergence between two samples.
pub fn energy_divergence(x: &[f64], y: &[f64], alpha: f64) -> Result<EnergyDivergence> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty);
    }
    check_alpha(alpha)?;
    let (n, m) = (x.len() as f64, y.len() as f64);
    let e_hat = 2.0 * double_sum(x, y, alpha) / (n * m) - double_sum(x, x, alpha) / (n * n) - double_sum(y, y, alpha) / (m * m);
    Ok(EnergyDivergence {
        e_hat,
        q_hat: n * m / (n + m) * e_hat,
    })
}

/// Best split of a segment: `split` is the 1-based last index of the left part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub split: usize,
    pub q_hat: f64,
}

/// `Q̂(b)` for `b = min_size..=n-min_size`, in that order.
fn split_profile(y: &[f64], min_size: usize, alpha: f64) -> Vec<f64> {
    let n = y.len();
    if n < 2 * min_size {
        return Vec::new();
    }
    // Shift by the first value so a constant segment gives exactly zero.
    let origin = y[0];
    let z: Vec<f64> = y.iter().map(|v| v - origin).collect();
    let nf = n as f64;
    if alpha == 2.0 {
        let total: f64 = z.iter().sum();
        let mut left = z[..min_size - 1].iter().sum::<f64>();
        return (min_size..=n - min_size)
            .map(|b| {
                left += z[b - 1];
                let (l, r) = (b as f64, nf - b as f64);
                let diff = left / l - (total - left) / r;
                l * r / nf * 2.0 * diff * diff
            })
            .collect();
    }

    let (lz, rz) = z.split_at(min_size);
    let mut within_left = double_sum(lz, lz, alpha);
    let mut within_right = double_sum(rz, rz, alpha);
    let mut between = double_sum(lz, rz, alpha);
    let mut out = Vec::with_capacity(n - 2 * min_size + 1);
    let mut b = min_size;
    loop {
        let (l, r) = (b as f64, nf - b as f64);
        let e = 2.0 * between / (l * r) - within_left / (l * l) - within_right / (r * r);
        out.push(l * r / nf * e);
        if b == n - min_size {
            break;
        }
        // Move point b (0-based) from the right part to the left part.
        let p = z[b];
        let to_left: f64 = z[..b].iter().map(|&v| distance(p, v, alpha)).sum();
        let to_right: f64 = z[b + 1..].iter().map(|&v| distance(p, v, alpha)).sum();
        within_left += 2.0 * to_left;
        within_right -= 2.0 * to_right;
        between += to_right - to_left;
        b += 1;
    }
    out
}

fn argmax_first(profile: &[f64]) -> Option<(usize, f64)> {
    profile
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &q)| match best {
            Some((_, bq)) if q <= bq => best,
            _ => Some((i, q)),
        })
}

/// Split maximising `Q̂` with at least `min_size` points on each side; `None` if too short.
pub fn best_split(y: &[f64], cfg: &EdivConfig) -> Option<Split> {
    let profile = split_profile(y, cfg.min_size, cfg.alpha);
    argmax_first(&profile).map(|(i, q)| Split {
        split: i + cfg.min_size,
        q_hat: q,
    })
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn replicate_seed(seed: u64, stream: u64, replicate: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ replicate)
}

/// Add-one permutation p-value for the split `b` of segment `y`.
///
/// Each replicate shuffles the segment and recomputes the maximal `Q̂`; `stream`
/// separates the random streams of successive tests under one seed.
pub fn permutation_test(y: &[f64], b: usize, cfg: &EdivConfig, stream: u64) -> Result<f64> {
    cfg.validate()?;
    let profile = split_profile(y, cfg.min_size, cfg.alpha);
    if profile.is_empty() || b < cfg.min_size || b > y.len() - cfg.min_size {
        return Err(Error::InvalidParameter(format!(
            "split {b} is not admissible for a segment of {} with minimum size {}",
            y.len(),
            cfg.min_size
        )));
    }
    let observed = profile[b - cfg.min_size];
    let exceed = (0..cfg.num_permutations as u64)
        .into_par_iter()
        .filter(|&r| {
            let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(cfg.seed, stream, r));
            let mut shuffled = y.to_vec();
            shuffled.shuffle(&mut rng);
            let best = split_profile(&shuffled, cfg.min_size, cfg.alpha)
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            best >= observed
        })
        .count();
    Ok((1 + exceed) as f64 / (cfg.num_permutations + 1) as f64)
}

/// Hierarchical divisive segmentation with permutation-test stopping.
///
/// The criterion trace holds `(m, p)` for each accepted break in acceptance order.
pub fn e_divisive(s: &TimeSeries, cfg: &EdivConfig) -> Result<Segmentation> {
    cfg.validate()?;
    let y = s.values();
    if y.len() < 2 * cfg.min_size {
        return Err(Error::InsufficientData {
            needed: 2 * cfg.min_size,
            found: y.len(),
        });
    }

    // (first, last, best split within) for each current segment, ordered by start.
    let mut segments: Vec<(usize, usize, Option<Split>)> = vec![(1, y.len(), best_split(y, cfg))];
    let mut breaks = Vec::new();
    let mut trace = Vec::new();
    let mut tests = 0u64;
    loop {
        if cfg.max_breaks.is_some_and(|cap| breaks.len() >= cap) {
            break;
        }
        let candidate = segments
            .iter()
            .enumerate()
            .filter_map(|(i, (_, _, sp))| sp.map(|sp| (i, sp)))
            .fold(None, |best: Option<(usize, Split)>, (i, sp)| match best {
                Some((_, bs)) if sp.q_hat <= bs.q_hat => best,
                _ => Some((i, sp)),
            });
        let Some((idx, sp)) = candidate else { break };
        let (a, b, _) = segments[idx];
        let p = permutation_test(&y[a - 1..b], sp.split, cfg, tests)?;
        tests += 1;
        if p > cfg.sig_level {
            break;
        }
        let cut = a + sp.split - 1;
        breaks.push(cut);
        trace.push(TracePoint {
            m: breaks.len(),
            value: p,
        });
        let left = (a, cut, best_split(&y[a - 1..cut], cfg));
        let right = (cut + 1, b, best_split(&y[cut..b], cfg));
        segments.splice(idx..=idx, [left, right]);
    }

    breaks.sort_unstable();
    let mut seg = Segmentation::from_breaks(y, breaks, Method::Edivisive, cfg.min_size)?;
    seg.criterion_trace = trace;
    Ok(seg)
}
