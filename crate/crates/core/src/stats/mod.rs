//! Group aggregation and one-way ANOVA, with the special functions behind
//! the F-distribution tail.

mod anova;
mod special;
mod summary;

use thiserror::Error;

pub use anova::{one_way_anova, AnovaResult};
pub use special::{f_cdf, f_sf, ln_gamma, reg_inc_beta};
pub use summary::{summarize_groups, FeatureRow, FeatureTable, GroupStats};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StatsError {
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("ANOVA needs at least 2 groups, got {0}")]
    TooFewGroups(usize),
    #[error("group {index} has {n} sample(s); ANOVA needs at least 2")]
    GroupTooSmall { index: usize, n: usize },
    #[error("invalid degrees of freedom ({d1}, {d2})")]
    InvalidDegreesOfFreedom { d1: u32, d2: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")]
    NoConvergence { a: f64, b: f64, x: f64 },
}

/// Arithmetic mean; NaN for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation with the n − 1 divisor, 0 for a single value.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}
