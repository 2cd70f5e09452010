use crate::mask_io::PixelScale;

use super::{MorphError, SubjectFeatures};

/// Image-level counts, coverage and density. Subjects flagged `small` are
/// left out of every aggregate. The spatial-order fields start empty and are
/// filled in from the nuclei tessellation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImageSummary {
    pub n_cells: usize,
    pub n_nuclei: usize,
    /// Fraction of the frame covered by cells, `Σ A_i / A_T`.
    pub coverage_cells: f64,
    pub coverage_nuclei: f64,
    /// Frame area `A_T` in µm².
    pub total_area_um2: f64,
    /// Nuclei per mm².
    pub density_per_mm2: f64,
    /// Voronoi entropy in nats.
    pub voronoi_entropy: Option<f64>,
    pub mean_csm: Option<f64>,
    pub mean_cell_area_um2: Option<f64>,
    pub mean_cell_roundness: Option<f64>,
    pub mean_nucleus_area_um2: Option<f64>,
    pub mean_nucleus_roundness: Option<f64>,
    /// Mean cytoplasm/nucleus area ratio over paired subjects.
    pub mean_ratio: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, sum) = values.fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    (n > 0).then(|| sum / n as f64)
}

pub fn summarize_image(
    cells: &[SubjectFeatures],
    nuclei: &[SubjectFeatures],
    scale: PixelScale,
    width: usize,
    height: usize,
) -> Result<ImageSummary, MorphError> {
    for f in cells.iter().chain(nuclei) {
        let (x, y) = f.centroid_px;
        if !(x >= 0.0 && y >= 0.0 && x < width as f64 && y < height as f64) {
            return Err(MorphError::DimensionMismatch { x, y, width, height });
        }
    }
    let total_area_um2 = (width * height) as f64 * scale.area_per_px();
    let kept_cells: Vec<&SubjectFeatures> = cells.iter().filter(|f| !f.small).collect();
    let kept_nuclei: Vec<&SubjectFeatures> = nuclei.iter().filter(|f| !f.small).collect();
    let coverage = |subjects: &[&SubjectFeatures]| subjects.iter().map(|f| f.area_um2).sum::<f64>() / total_area_um2;

    Ok(ImageSummary {
        n_cells: kept_cells.len(),
        n_nuclei: kept_nuclei.len(),
        coverage_cells: coverage(&kept_cells),
        coverage_nuclei: coverage(&kept_nuclei),
        total_area_um2,
        density_per_mm2: kept_nuclei.len() as f64 / (total_area_um2 * 1e-6),
        voronoi_entropy: None,
        mean_csm: None,
        mean_cell_area_um2: mean(kept_cells.iter().map(|f| f.area_um2)),
        mean_cell_roundness: mean(kept_cells.iter().map(|f| f.roundness)),
        mean_nucleus_area_um2: mean(kept_nuclei.iter().map(|f| f.area_um2)),
        mean_nucleus_roundness: mean(kept_nuclei.iter().map(|f| f.roundness)),
        mean_ratio: None,
    })
}
