//! Per-subject shape descriptors and per-image coverage/density.
//!
//! Area is the exact pixel count of a label (holes excluded). Perimeter is
//! the length of the outer Freeman chain code with axial steps of one pitch
//! and diagonal steps of √2 pitches; the estimator is pluggable through
//! [`PerimeterEstimator`]. Roundness is `4πa/p²`, clamped to `[0, 1]`.

mod contour;
mod features;
mod summary;

use thiserror::Error;

pub use contour::{trace_contour, trace_contours, ChainCode, DIRECTIONS};
pub(crate) use contour::trace_from;
pub use features::{
    compute_all_features, compute_features, roundness, FreemanEstimator, MeasureOptions, PerimeterEstimator,
    SubjectFeatures, DEFAULT_MIN_SIZE_PX,
};
pub use summary::{summarize_image, ImageSummary};

#[derive(Debug, Error, PartialEq)]
pub enum MorphError {
    #[error("label {0} not present in mask")]
    LabelNotFound(u32),
    #[error("contour tracing of label {0} did not terminate")]
    UnterminatedContour(u32),
    #[error("subject centroid ({x}, {y}) lies outside the {width}x{height} frame; channel dimensions disagree")]
    DimensionMismatch { x: f64, y: f64, width: usize, height: usize },
}
