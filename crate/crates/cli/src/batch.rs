//! Batch orchestration: discover, analyze images on a worker pool, then
//! reduce per group and write the reports.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use cellmorph::mask_io::{discover_dataset, load_manifest, load_mask_pair, load_raw_channel, ImageEntry, PixelScale};
use cellmorph::morphometry::{FreemanEstimator, MeasureOptions};
use cellmorph::report::{
    render_overlay_svg, render_voronoi_svg, write_anova_csv, write_group_csv, write_image_csv, write_subject_csv,
    AnovaRecord, FeatureRecord, ImageRecord, OverlayInput, OverlayLayer,
};
use cellmorph::stats::{one_way_anova, summarize_groups, FeatureTable, GroupStats};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, GROUP_FEATURES};
use crate::pipeline::{analyze_pair, ImageAnalysis};

pub const SUBJECTS_CSV: &str = "subjects.csv";
pub const IMAGES_CSV: &str = "images.csv";
pub const GROUPS_CSV: &str = "groups.csv";
pub const ANOVA_CSV: &str = "anova.csv";
pub const RUN_LOG: &str = "run.log";

#[derive(Debug, Error)]
pub enum BatchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read input root {path}: {reason}")]
    Root { path: PathBuf, reason: String },
    #[error("cannot write output {path}: {reason}")]
    Output { path: PathBuf, reason: String },
}

impl BatchError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            BatchError::Config(_) => 2,
            BatchError::Root { .. } | BatchError::Output { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchReport {
    pub images_processed: usize,
    pub images_skipped: usize,
    pub warnings: Vec<String>,
    pub out: PathBuf,
}

struct ImageResult {
    group: String,
    image_id: String,
    outcome: Result<ImageAnalysis, String>,
}

fn output_err(path: &Path) -> impl FnOnce(String) -> BatchError + '_ {
    move |reason| BatchError::Output {
        path: path.to_path_buf(),
        reason,
    }
}

fn svg_dir(out: &Path, group: &str) -> PathBuf {
    out.join("svg").join(group)
}

fn process_image(cfg: &RunConfig, group: &str, entry: &ImageEntry) -> Result<ImageAnalysis, String> {
    let scale = PixelScale::from_pitch(entry.pitch.unwrap_or(cfg.pitch)).map_err(|e| e.to_string())?;
    let (cells, nuclei) =
        load_mask_pair(&entry.cytoplasm, &entry.nuclei, scale, cfg.strict_labels).map_err(|e| e.to_string())?;
    let opts = MeasureOptions {
        min_size_px: cfg.min_size,
        estimator: &FreemanEstimator,
    };
    let mut analysis = analyze_pair(&cells, &nuclei, &opts)?;

    let mut raw = |path: &Option<PathBuf>| {
        path.as_ref().and_then(|p| match load_raw_channel(p) {
            Ok(img) => Some(img),
            Err(e) => {
                analysis.warnings.push(format!("raw image ignored: {e}"));
                None
            }
        })
    };
    let raw_cytoplasm = raw(&entry.raw_cytoplasm);
    let raw_nuclei = raw(&entry.raw_nuclei);

    let dir = svg_dir(&cfg.out, group);
    fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    if let Some(tess) = &analysis.tessellation {
        render_voronoi_svg(tess, &dir.join(format!("{}_voronoi.svg", entry.image_id))).map_err(|e| e.to_string())?;
    }
    let overlay = OverlayInput {
        cytoplasm: Some(OverlayLayer {
            mask: &cells,
            features: &analysis.cells,
        }),
        nuclei: Some(OverlayLayer {
            mask: &nuclei,
            features: &analysis.nuclei,
        }),
        raw_cytoplasm: raw_cytoplasm.as_ref(),
        raw_nuclei: raw_nuclei.as_ref(),
    };
    if let Err(e) = render_overlay_svg(&overlay, &dir.join(format!("{}_overlay.svg", entry.image_id))) {
        analysis.warnings.push(format!("overlay not written: {e}"));
    }
    Ok(analysis)
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

/// Run the whole pipeline described by `cfg`.
pub fn run_batch(cfg: &RunConfig) -> Result<BatchReport, BatchError> {
    cfg.validate()?;
    if !cfg.root.is_dir() {
        return Err(BatchError::Root {
            path: cfg.root.clone(),
            reason: "not a readable directory".into(),
        });
    }
    fs::create_dir_all(&cfg.out).map_err(|e| output_err(&cfg.out)(e.to_string()))?;

    let plan = match &cfg.manifest {
        Some(m) => load_manifest(&cfg.root, m),
        None => discover_dataset(&cfg.root, &cfg.layout()),
    }
    .map_err(|e| BatchError::Root {
        path: cfg.root.clone(),
        reason: e.to_string(),
    })?;
    let mut warnings = plan.warnings.clone();

    let entries: Vec<(&str, &ImageEntry)> = plan.entries().collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| BatchError::Output {
            path: cfg.out.clone(),
            reason: format!("worker pool: {e}"),
        })?;
    let results: Vec<ImageResult> = pool.install(|| {
        entries
            .par_iter()
            .map(|&(group, entry)| {
                let outcome = catch_unwind(AssertUnwindSafe(|| process_image(cfg, group, entry)))
                    .unwrap_or_else(|p| Err(format!("internal error: {}", panic_message(p))));
                ImageResult {
                    group: group.to_string(),
                    image_id: entry.image_id.clone(),
                    outcome,
                }
            })
            .collect()
    });

    let mut subjects: Vec<FeatureRecord> = Vec::new();
    let mut images: Vec<ImageRecord> = Vec::new();
    let mut table = FeatureTable::new(GROUP_FEATURES);
    let mut report = BatchReport {
        out: cfg.out.clone(),
        ..Default::default()
    };
    for r in &results {
        match &r.outcome {
            Ok(a) => {
                report.images_processed += 1;
                for w in &a.warnings {
                    warnings.push(format!("{}/{}: {w}", r.group, r.image_id));
                }
                subjects.extend(a.subject_records(&r.group, &r.image_id));
                images.push(a.image_record(&r.group, &r.image_id));
                table
                    .push(&r.group, &r.image_id, a.group_values())
                    .expect("one value per group feature");
            }
            Err(e) => {
                report.images_skipped += 1;
                warnings.push(format!("{}/{}: image skipped: {e}", r.group, r.image_id));
            }
        }
    }

    let (stats, anova) = aggregate(&table, &cfg.features, &mut warnings);

    let write = |name: &str, result: Result<(), cellmorph::report::ReportError>| {
        result.map_err(|e| output_err(&cfg.out.join(name))(e.to_string()))
    };
    write(SUBJECTS_CSV, write_subject_csv(&subjects, &cfg.out.join(SUBJECTS_CSV)))?;
    write(IMAGES_CSV, write_image_csv(&images, &cfg.out.join(IMAGES_CSV)))?;
    write(GROUPS_CSV, write_group_csv(&stats, &cfg.out.join(GROUPS_CSV)))?;
    write(ANOVA_CSV, write_anova_csv(&anova, &cfg.out.join(ANOVA_CSV)))?;

    report.warnings = warnings;
    let log_path = cfg.out.join(RUN_LOG);
    fs::write(&log_path, run_log(&report)).map_err(|e| output_err(&log_path)(e.to_string()))?;
    Ok(report)
}

/// Group statistics and one ANOVA per selected feature. Groups with fewer
/// than two values are left out of the ANOVA with a warning.
fn aggregate(table: &FeatureTable, features: &[String], warnings: &mut Vec<String>) -> (Vec<GroupStats>, Vec<AnovaRecord>) {
    let mut stats = Vec::new();
    let mut anova = Vec::new();
    for feature in features {
        stats.extend(summarize_groups(table, feature).expect("known feature"));
        let samples = table.samples(feature).expect("known feature");
        let mut groups = Vec::new();
        for (group, values) in samples {
            if values.len() < 2 {
                warnings.push(format!(
                    "{feature}: group {group} has {} value(s), excluded from ANOVA",
                    values.len()
                ));
            } else {
                groups.push(values);
            }
        }
        if groups.len() < 2 {
            if !table.rows().is_empty() {
                warnings.push(format!("{feature}: fewer than 2 groups with 2+ values, ANOVA skipped"));
            }
            continue;
        }
        match one_way_anova(feature, &groups) {
            Ok(r) => anova.push(AnovaRecord::from(&r)),
            Err(e) => warnings.push(format!("{feature}: ANOVA failed: {e}")),
        }
    }
    (stats, anova)
}

fn run_log(report: &BatchReport) -> String {
    let mut s = String::new();
    for w in &report.warnings {
        s.push_str("warning: ");
        s.push_str(w);
        s.push('\n');
    }
    s.push_str(&format!(
        "processed {} image(s), skipped {}, {} warning(s)\n",
        report.images_processed,
        report.images_skipped,
        report.warnings.len()
    ));
    s
}
