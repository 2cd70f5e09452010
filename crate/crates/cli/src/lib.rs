//! Batch driver for `cellmorph`: configuration, per-image analysis and the
//! group-level reduce that writes the report tables.

pub mod batch;
pub mod config;
pub mod pipeline;

pub use batch::{run_batch, BatchError, BatchReport};
pub use config::{validate_config, ConfigError, RunConfig};
pub use pipeline::{analyze_pair, ImageAnalysis};
