//! Bounded Voronoi diagrams of nucleus centroids and the two spatial-order
//! metrics built on them: Voronoi entropy and the continuous symmetry
//! measure (CSM). Only interior cells (bounded, clear of the image
//! rectangle) enter the metrics.

mod csm;
mod delaunay;
mod entropy;
mod voronoi;

use thiserror::Error;

pub use csm::{image_csm, polygon_csm, PolygonSymmetry};
pub use entropy::{spatial_order, voronoi_entropy, ClassHistogram, SpatialOrder, MIN_CONFIDENT_POLYGONS};
pub use voronoi::{build_voronoi, Tessellation, MERGE_TOLERANCE};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TessellationError {
    #[error("no seeds to tessellate")]
    NoSeeds,
    #[error("bounding rectangle has no area")]
    InvalidBounds,
    #[error("seed {index} at ({x}, {y}) lies outside the bounds")]
    SeedOutOfBounds { index: usize, x: f64, y: f64 },
    #[error("seeds {first} and {second} coincide")]
    DuplicateSeed { first: usize, second: usize },
    #[error("no interior polygons")]
    NoInteriorPolygons,
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
}
