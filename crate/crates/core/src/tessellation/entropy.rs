use std::collections::BTreeMap;

use super::csm::image_csm;
use super::{Tessellation, TessellationError};

/// Below this many interior polygons, spatial metrics are low-confidence.
pub const MIN_CONFIDENT_POLYGONS: usize = 10;

/// Distribution of edge-count classes over interior polygons.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassHistogram {
    pub counts: BTreeMap<usize, usize>,
    pub proportions: BTreeMap<usize, f64>,
}

impl ClassHistogram {
    pub fn from_classes(classes: impl IntoIterator<Item = usize>) -> Self {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for k in classes {
            *counts.entry(k).or_default() += 1;
        }
        let total: usize = counts.values().sum();
        let proportions = counts.iter().map(|(&k, &c)| (k, c as f64 / total as f64)).collect();
        Self { counts, proportions }
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Shannon entropy `−Σ p ln p` in nats.
    pub fn entropy(&self) -> f64 {
        let s: f64 = self.proportions.values().map(|&p| -p * p.ln()).sum();
        s + 0.0
    }
}

/// Voronoi entropy over interior polygons, classed by edge count.
pub fn voronoi_entropy(tess: &Tessellation) -> Result<(ClassHistogram, f64), TessellationError> {
    let hist = ClassHistogram::from_classes(tess.interior_indices().map(|i| tess.polygons()[i].len()));
    if hist.total() == 0 {
        return Err(TessellationError::NoInteriorPolygons);
    }
    let s = hist.entropy();
    Ok((hist, s))
}

/// Entropy and mean CSM of one image, absent when no interior polygon exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialOrder {
    pub interior_polygons: usize,
    pub histogram: ClassHistogram,
    pub entropy: Option<f64>,
    pub mean_csm: Option<f64>,
    /// Fewer than [`MIN_CONFIDENT_POLYGONS`] interior polygons.
    pub low_confidence: bool,
}

pub fn spatial_order(tess: &Tessellation) -> Result<SpatialOrder, TessellationError> {
    let interior_polygons = tess.interior_count();
    let (histogram, entropy, mean_csm) = match voronoi_entropy(tess) {
        Ok((h, s)) => (h, Some(s), Some(image_csm(tess)?)),
        Err(TessellationError::NoInteriorPolygons) => (ClassHistogram::default(), None, None),
        Err(e) => return Err(e),
    };
    Ok(SpatialOrder {
        interior_polygons,
        histogram,
        entropy,
        mean_csm,
        low_confidence: interior_polygons < MIN_CONFIDENT_POLYGONS,
    })
}
