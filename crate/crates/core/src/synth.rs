//! Piecewise-constant benchmark signals with Gaussian or AR(1) noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Noise {
    Gaussian,
    /// Stationary AR(1) noise with unit-variance innovations scaled by sigma.
    Ar1 { rho: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub means: Vec<f64>,
    pub lengths: Vec<usize>,
    pub noise: Noise,
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub values: Vec<f64>,
    /// Last index (1-based) of every segment but the final one.
    pub breaks: Vec<usize>,
}

impl SignalSpec {
    fn validate(&self) -> Result<()> {
        if self.means.is_empty() || self.means.len() != self.lengths.len() {
            return Err(Error::InvalidParameter(format!(
                "{} means for {} segment lengths",
                self.means.len(),
                self.lengths.len()
            )));
        }
        if self.lengths.contains(&0) {
            return Err(Error::InvalidParameter("segment lengths must be positive".into()));
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidParameter("segment means must be finite".into()));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma {} must be >= 0", self.sigma)));
        }
        if let Noise::Ar1 { rho } = self.noise {
            if rho.is_nan() || rho.abs() >= 1.0 {
                return Err(Error::InvalidParameter(format!("AR(1) coefficient {rho} must satisfy |rho| < 1")));
            }
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Signal> {
        self.validate()?;
        let n: usize = self.lengths.iter().sum();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let noise: Vec<f64> = match self.noise {
            Noise::Gaussian => (0..n).map(|_| self.sigma * draw()).collect(),
            Noise::Ar1 { rho } => {
                let mut e = draw() / (1.0 - rho * rho).sqrt();
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    out.push(self.sigma * e);
                    e = rho * e + draw();
                }
                out
            }
        };
        let mut values = Vec::with_capacity(n);
        let mut breaks = Vec::with_capacity(self.lengths.len() - 1);
        for (&mu, &len) in self.means.iter().zip(&self.lengths) {
            values.extend(std::iter::repeat_n(mu, len));
            breaks.push(values.len());
        }
        breaks.pop();
        for (v, e) in values.iter_mut().zip(noise) {
            *v += e;
        }
        Ok(Signal { values, breaks })
    }
}
