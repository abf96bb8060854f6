//! Fully resolved run configurations, as recorded in reports.

use breakscan::edivisive::EdivConfig;
use breakscan::wbs::WbsConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TestMethod {
    RecCusum,
    OlsCusum,
    Mosum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum VarianceChoice {
    /// Sample variance of the OLS residuals.
    Plain,
    /// Sample variance of the recursive residuals.
    Recursive,
    /// Bartlett long-run variance with a resolved lag count.
    LongRun { lags: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub method: TestMethod,
    pub level: f64,
    pub variance: VarianceChoice,
    /// MOSUM window as a fraction of the sample.
    pub mosum_width: Option<f64>,
    /// Constant boundary for MOSUM.
    pub critical: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpConfig {
    pub min_len: usize,
    /// Largest number of breaks considered by BIC.
    pub max_breaks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SegmentConfig {
    Dp(DpConfig),
    Wbs(WbsConfig),
    Edivisive(EdivConfig),
}

impl SegmentConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Dp(_) => "dp",
            Self::Wbs(_) => "wbs",
            Self::Edivisive(_) => "edivisive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub methods: Vec<SegmentConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Test(TestConfig),
    Segment(SegmentConfig),
    Compare(CompareConfig),
}
