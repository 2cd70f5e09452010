use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};

use crate::geometry::Point;
use crate::mask_io::{ComponentMap, LabelMask};

use super::contour::{trace_from, ChainCode};
use super::MorphError;

/// Default minimum subject size in pixels; smaller subjects are flagged.
pub const DEFAULT_MIN_SIZE_PX: usize = 5;

/// Boundary length estimator operating on chain codes, in pixel units.
pub trait PerimeterEstimator: Send + Sync {
    fn length_px(&self, chain: &ChainCode) -> f64;
}

/// Freeman estimator: axial steps count 1, diagonal steps √2, and a single
/// pixel counts 4.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreemanEstimator;

impl PerimeterEstimator for FreemanEstimator {
    fn length_px(&self, chain: &ChainCode) -> f64 {
        if chain.is_single_pixel() {
            return 4.0;
        }
        chain.axial_moves() as f64 + SQRT_2 * chain.diagonal_moves() as f64
    }
}

#[derive(Clone, Copy)]
pub struct MeasureOptions<'a> {
    /// Subjects with fewer pixels are measured but flagged `small`.
    pub min_size_px: usize,
    pub estimator: &'a dyn PerimeterEstimator,
}

impl Default for MeasureOptions<'_> {
    fn default() -> Self {
        Self {
            min_size_px: DEFAULT_MIN_SIZE_PX,
            estimator: &FreemanEstimator,
        }
    }
}

impl std::fmt::Debug for MeasureOptions<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MeasureOptions")
            .field("min_size_px", &self.min_size_px)
            .finish_non_exhaustive()
    }
}

/// Shape descriptors of one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectFeatures {
    pub label: u32,
    pub area_px: usize,
    pub area_um2: f64,
    pub perimeter_um: f64,
    /// `4πa/p²`, clamped to `[0, 1]`.
    pub roundness: f64,
    /// The unclamped roundness exceeded 1.
    pub roundness_clamped: bool,
    /// Mean pixel index `(x, y)` from the top-left origin.
    pub centroid_px: (f64, f64),
    /// Centroid in µm, taking pixel centers at `(i + 0.5) · pitch`.
    pub centroid_um: Point,
    /// Some pixel lies on the image border.
    pub boundary_touching: bool,
    /// Fewer pixels than the configured minimum size.
    pub small: bool,
    /// Number of 8-connected components carrying this label.
    pub components: usize,
}

#[derive(Default)]
struct Accumulator {
    area_px: usize,
    sum_x: u64,
    sum_y: u64,
    touching: bool,
    starts: Vec<(usize, usize)>,
}

impl Accumulator {
    fn add(&mut self, x: usize, y: usize, w: usize, h: usize) {
        self.area_px += 1;
        self.sum_x += x as u64;
        self.sum_y += y as u64;
        self.touching |= x == 0 || y == 0 || x + 1 == w || y + 1 == h;
    }

    fn finish(&self, mask: &LabelMask, label: u32, opts: &MeasureOptions<'_>) -> Result<SubjectFeatures, MorphError> {
        let scale = mask.scale();
        let mut length_px = 0.0;
        for &start in &self.starts {
            let chain = trace_from(mask, label, start)?;
            length_px += opts.estimator.length_px(&chain);
        }
        let area_um2 = self.area_px as f64 * scale.area_per_px();
        let perimeter_um = length_px * scale.pitch();
        let raw = roundness(area_um2, perimeter_um);
        let n = self.area_px as f64;
        let centroid_px = (self.sum_x as f64 / n, self.sum_y as f64 / n);
        Ok(SubjectFeatures {
            label,
            area_px: self.area_px,
            area_um2,
            perimeter_um,
            roundness: raw.clamp(0.0, 1.0),
            roundness_clamped: raw > 1.0,
            centroid_px,
            centroid_um: Point::new(
                (centroid_px.0 + 0.5) * scale.pitch(),
                (centroid_px.1 + 0.5) * scale.pitch(),
            ),
            boundary_touching: self.touching,
            small: self.area_px < opts.min_size_px,
            components: self.starts.len(),
        })
    }
}

/// Unclamped roundness `4πa/p²` in consistent units.
pub fn roundness(area: f64, perimeter: f64) -> f64 {
    if perimeter <= 0.0 {
        return 0.0;
    }
    4.0 * PI * area / (perimeter * perimeter)
}

/// Measure a single subject. Scans the whole mask; use
/// [`compute_all_features`] when measuring every subject.
pub fn compute_features(mask: &LabelMask, label: u32, opts: &MeasureOptions<'_>) -> Result<SubjectFeatures, MorphError> {
    if label == 0 {
        return Err(MorphError::LabelNotFound(label));
    }
    let (w, h) = (mask.width(), mask.height());
    let binary: Vec<u32> = mask.labels().iter().map(|&l| u32::from(l == label)).collect();
    let map = ComponentMap::build(w, h, &binary);
    if map.components().is_empty() {
        return Err(MorphError::LabelNotFound(label));
    }
    let mut acc = Accumulator::default();
    for (idx, &l) in mask.labels().iter().enumerate() {
        if l == label {
            acc.add(idx % w, idx / w, w, h);
        }
    }
    acc.starts = map.components().iter().map(|c| c.start).collect();
    acc.finish(mask, label, opts)
}

/// Measure every subject of the mask in one pass; results ordered by label.
pub fn compute_all_features(mask: &LabelMask, opts: &MeasureOptions<'_>) -> Result<Vec<SubjectFeatures>, MorphError> {
    let (w, h) = (mask.width(), mask.height());
    let mut accs: HashMap<u32, Accumulator> = HashMap::new();
    for (idx, &l) in mask.labels().iter().enumerate() {
        if l != 0 {
            accs.entry(l).or_default().add(idx % w, idx / w, w, h);
        }
    }
    for c in mask.components().components() {
        if let Some(acc) = accs.get_mut(&c.label) {
            acc.starts.push(c.start);
        }
    }
    let mut labels: Vec<u32> = accs.keys().copied().collect();
    labels.sort_unstable();
    labels
        .into_iter()
        .map(|label| accs[&label].finish(mask, label, opts))
        .collect()
}
