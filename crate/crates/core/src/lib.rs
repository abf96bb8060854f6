//! Retrospective structural-change analysis for univariate time series.
//!
//! - [`fluctuation`]: CUSUM/MOSUM fluctuation processes and boundary-crossing tests.
//! - [`dating`]: least-squares dating of level shifts by dynamic programming with BIC.
//! - [`wbs`]: wild binary segmentation.
//! - [`edivisive`]: divisive segmentation by energy statistics.
//! - [`io`]: CSV ingestion, monthly-to-quarterly aggregation and bundled datasets.

pub mod dating;
pub mod edivisive;
pub mod error;
pub mod fluctuation;
pub mod io;
pub mod segmentation;
pub mod series;
pub mod synth;
pub mod wbs;

pub use error::{Error, Result};
pub use segmentation::{Method, Segmentation, TracePoint};
pub use series::{Frequency, Period, Stamp, TimeIndex, TimeSeries};
