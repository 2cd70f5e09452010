//! Analysis of one image (both channels).

use std::collections::HashSet;

use cellmorph::geometry::{Point, Rect};
use cellmorph::mask_io::{Channel, LabelMask};
use cellmorph::morphometry::{compute_all_features, summarize_image, ImageSummary, MeasureOptions, SubjectFeatures};
use cellmorph::pairing::{pair_subjects, Pairing};
use cellmorph::report::{FeatureRecord, ImageRecord, SubjectFlags};
use cellmorph::tessellation::{build_voronoi, spatial_order, SpatialOrder, Tessellation};

/// Everything measured on one image.
#[derive(Debug, Clone)]
pub struct ImageAnalysis {
    pub cells: Vec<SubjectFeatures>,
    pub nuclei: Vec<SubjectFeatures>,
    pub pairing: Pairing,
    pub summary: ImageSummary,
    pub tessellation: Option<Tessellation>,
    pub spatial: Option<SpatialOrder>,
    /// One line per warning category.
    pub warnings: Vec<String>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, s) = values.fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    (n > 0).then(|| s / n as f64)
}

pub fn analyze_pair(cells: &LabelMask, nuclei: &LabelMask, opts: &MeasureOptions<'_>) -> Result<ImageAnalysis, String> {
    let cell_features = compute_all_features(cells, opts).map_err(|e| e.to_string())?;
    let nucleus_features = compute_all_features(nuclei, opts).map_err(|e| e.to_string())?;
    let pairing = pair_subjects(cells, nuclei).map_err(|e| e.to_string())?;
    let scale = cells.scale();
    let mut summary = summarize_image(&cell_features, &nucleus_features, scale, cells.width(), cells.height())
        .map_err(|e| e.to_string())?;
    let mut warnings = Vec::new();

    let small_cells: HashSet<u32> = cell_features.iter().filter(|f| f.small).map(|f| f.label).collect();
    let small_nuclei: HashSet<u32> = nucleus_features.iter().filter(|f| f.small).map(|f| f.label).collect();
    summary.mean_ratio = mean(
        pairing
            .pairs
            .iter()
            .filter(|p| !small_cells.contains(&p.cell_label) && !small_nuclei.contains(&p.nucleus_label))
            .map(|p| p.ratio),
    );

    if !pairing.unpaired_nuclei.is_empty() {
        warnings.push(format!("{} unpaired nuclei", pairing.unpaired_nuclei.len()));
    }
    if !pairing.unpaired_cells.is_empty() {
        warnings.push(format!("{} cells without a nucleus", pairing.unpaired_cells.len()));
    }
    let clamped = cell_features.iter().chain(&nucleus_features).filter(|f| f.roundness_clamped).count();
    if clamped > 0 {
        warnings.push(format!("roundness clamped to 1 for {clamped} subjects"));
    }
    if !small_cells.is_empty() || !small_nuclei.is_empty() {
        warnings.push(format!(
            "{} subjects below {} px excluded from aggregates",
            small_cells.len() + small_nuclei.len(),
            opts.min_size_px
        ));
    }

    let seeds: Vec<Point> = nucleus_features.iter().filter(|f| !f.small).map(|f| f.centroid_um).collect();
    let (tessellation, spatial) = if seeds.is_empty() {
        warnings.push("no nuclei; spatial metrics absent".into());
        (None, None)
    } else {
        let bounds = Rect::from_size(cells.width() as f64 * scale.pitch(), cells.height() as f64 * scale.pitch());
        let tess = build_voronoi(&seeds, bounds).map_err(|e| e.to_string())?;
        let order = spatial_order(&tess).map_err(|e| e.to_string())?;
        if order.entropy.is_none() {
            warnings.push("no interior Voronoi polygons; spatial metrics absent".into());
        } else if order.low_confidence {
            warnings.push(format!(
                "only {} interior Voronoi polygons; spatial metrics low-confidence",
                order.interior_polygons
            ));
        }
        summary.voronoi_entropy = order.entropy;
        summary.mean_csm = order.mean_csm;
        (Some(tess), Some(order))
    };

    Ok(ImageAnalysis {
        cells: cell_features,
        nuclei: nucleus_features,
        pairing,
        summary,
        tessellation,
        spatial,
        warnings,
    })
}

impl ImageAnalysis {
    /// Feature values in the order of [`crate::config::GROUP_FEATURES`].
    pub fn group_values(&self) -> Vec<Option<f64>> {
        let s = &self.summary;
        vec![
            s.mean_cell_area_um2,
            s.mean_cell_roundness,
            Some(s.coverage_cells),
            s.mean_nucleus_area_um2,
            s.mean_nucleus_roundness,
            Some(s.coverage_nuclei),
            s.mean_ratio,
            s.voronoi_entropy,
            s.mean_csm,
            Some(s.density_per_mm2),
            Some(s.n_cells as f64),
            Some(s.n_nuclei as f64),
        ]
    }

    pub fn image_record(&self, group: &str, image_id: &str) -> ImageRecord {
        let s = &self.summary;
        ImageRecord {
            group: group.into(),
            image_id: image_id.into(),
            n_cells: s.n_cells,
            n_nuclei: s.n_nuclei,
            coverage_cells: s.coverage_cells,
            coverage_nuclei: s.coverage_nuclei,
            density_per_mm2: s.density_per_mm2,
            voronoi_entropy: s.voronoi_entropy,
            mean_csm: s.mean_csm,
        }
    }

    /// Subject rows. Nuclei carry their cell; a cell carries its nucleus
    /// only when it has exactly one.
    pub fn subject_records(&self, group: &str, image_id: &str) -> Vec<FeatureRecord> {
        let base = |f: &SubjectFeatures, channel: Channel| FeatureRecord {
            group: group.into(),
            image_id: image_id.into(),
            channel,
            label: f.label,
            area_px: f.area_px,
            area_um2: f.area_um2,
            perimeter_um: f.perimeter_um,
            roundness: f.roundness,
            centroid_x_px: f.centroid_px.0,
            centroid_y_px: f.centroid_px.1,
            paired_label: None,
            ratio: None,
            flags: SubjectFlags {
                small: f.small,
                multi_nucleate: false,
                clamped_roundness: f.roundness_clamped,
            },
        };
        let mut out = Vec::with_capacity(self.cells.len() + self.nuclei.len());
        for f in &self.cells {
            let mut r = base(f, Channel::Cytoplasm);
            let pairs: Vec<_> = self.pairing.pairs_for_cell(f.label).collect();
            match pairs.as_slice() {
                [one] => {
                    r.paired_label = Some(one.nucleus_label);
                    r.ratio = Some(one.ratio);
                }
                [] => {}
                _ => r.flags.multi_nucleate = true,
            }
            out.push(r);
        }
        for f in &self.nuclei {
            let mut r = base(f, Channel::Nuclei);
            if let Some(p) = self.pairing.pair_for_nucleus(f.label) {
                r.paired_label = Some(p.cell_label);
                r.ratio = Some(p.ratio);
                r.flags.multi_nucleate = p.multi_nucleate;
            }
            out.push(r);
        }
        out
    }
}
