//! Exact moments, moment-based distribution reconstruction and hypothesis
//! tests for generalized spacing statistics `sum_i w_i S_i^p`.

pub mod error;
pub mod moments;
pub mod numeric;
pub mod oracle;
pub mod power;
pub mod reconstruct;
pub mod stattest;

pub use error::{Error, Result};
pub use moments::{MomentSequence, Mode, StatisticSpec, WeightVector};
