//! Morphometry of segmented cell images.
//!
//! `cellmorph` consumes integer label masks for a cytoplasm channel and a
//! nuclei channel and derives per-subject shape descriptors (area, perimeter,
//! roundness, centroid), cell/nucleus area ratios, coverage and density,
//! Voronoi-based spatial order metrics (Voronoi entropy and the continuous
//! symmetry measure), group statistics with one-way ANOVA, and CSV/SVG
//! reports.
//!
//! The crate is organised bottom-up:
//!
//! * [`mask_io`] loads PNG/NPY label masks, labels binary masks and discovers
//!   the group/image folder layout.
//! * [`morphometry`] traces Freeman chain codes and measures subjects.
//! * [`pairing`] matches nuclei to their enclosing cells.
//! * [`tessellation`] builds a bounded Voronoi diagram of nucleus centroids
//!   and computes entropy and symmetry metrics on it.
//! * [`stats`] aggregates per-image values and runs one-way ANOVA.
//! * [`report`] writes the CSV tables and SVG figures.

pub mod geometry;
pub mod mask_io;
pub mod morphometry;
pub mod pairing;
pub mod report;
pub mod stats;
pub mod tessellation;

pub use geometry::{Point, Rect};
pub use mask_io::{Channel, LabelMask, PixelScale};
pub use morphometry::{ChainCode, ImageSummary, SubjectFeatures};
pub use pairing::{CellNucleusPair, Pairing};
pub use stats::{AnovaResult, GroupStats};
pub use tessellation::Tessellation;
