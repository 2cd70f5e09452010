//! Group/image folder discovery.
//!
//! Layout convention: every sub-directory of the root is one experimental
//! group. Inside it, an image is a pair of masks sharing a stem, e.g.
//! `img01_cyto.png` + `img01_nuclei.png` (or `.npy`). Optional raw channels
//! for overlays use `img01_fitc.png` / `img01_dapi.png`. All suffixes are
//! configurable. A CSV manifest can replace discovery entirely.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::MaskError;

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutConfig {
    pub cytoplasm_suffix: String,
    pub nuclei_suffix: String,
    pub raw_cytoplasm_suffix: String,
    pub raw_nuclei_suffix: String,
    /// Directories never treated as groups (e.g. an output folder nested in
    /// the root).
    pub exclude: Vec<PathBuf>,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            cytoplasm_suffix: "_cyto".into(),
            nuclei_suffix: "_nuclei".into(),
            raw_cytoplasm_suffix: "_fitc".into(),
            raw_nuclei_suffix: "_dapi".into(),
            exclude: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageEntry {
    pub image_id: String,
    pub cytoplasm: PathBuf,
    pub nuclei: PathBuf,
    pub raw_cytoplasm: Option<PathBuf>,
    pub raw_nuclei: Option<PathBuf>,
    /// Per-image pitch override in µm/px.
    pub pitch: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPlan {
    pub name: String,
    pub images: Vec<ImageEntry>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchPlan {
    pub groups: Vec<GroupPlan>,
    pub warnings: Vec<String>,
}

impl BatchPlan {
    pub fn image_count(&self) -> usize {
        self.groups.iter().map(|g| g.images.len()).sum()
    }

    /// `(group, entry)` pairs in plan order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &ImageEntry)> {
        self.groups
            .iter()
            .flat_map(|g| g.images.iter().map(move |e| (g.name.as_str(), e)))
    }
}

#[derive(Default)]
struct Slots {
    cytoplasm: Vec<PathBuf>,
    nuclei: Vec<PathBuf>,
    raw_cytoplasm: Option<PathBuf>,
    raw_nuclei: Option<PathBuf>,
}

#[derive(Clone, Copy)]
enum Role {
    Cytoplasm,
    Nuclei,
    RawCytoplasm,
    RawNuclei,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> MaskError + '_ {
    move |source| MaskError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Walk `root` and build a deterministic plan. Groups and images are sorted
/// lexicographically; images missing a channel are excluded with a warning.
pub fn discover_dataset(root: &Path, layout: &LayoutConfig) -> Result<BatchPlan, MaskError> {
    let mut plan = BatchPlan::default();
    let excluded: Vec<PathBuf> = layout
        .exclude
        .iter()
        .filter_map(|p| fs::canonicalize(p).ok())
        .collect();

    let mut group_dirs: Vec<(String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(root).map_err(io_err(root))? {
        let entry = entry.map_err(io_err(root))?;
        let path = entry.path();
        if !path.is_dir() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') {
            continue;
        }
        if let Ok(canon) = fs::canonicalize(&path) {
            if excluded.contains(&canon) {
                continue;
            }
        }
        group_dirs.push((name, path));
    }
    group_dirs.sort();

    for (name, dir) in group_dirs {
        let images = discover_group(&name, &dir, layout, &mut plan.warnings)?;
        if images.is_empty() {
            plan.warnings.push(format!("group {name}: no complete mask pairs, group skipped"));
        } else {
            plan.groups.push(GroupPlan { name, images });
        }
    }
    if plan.groups.is_empty() {
        plan.warnings
            .push(format!("no groups with usable masks found under {}", root.display()));
    }
    Ok(plan)
}

fn classify<'a>(stem: &'a str, layout: &LayoutConfig) -> Option<(&'a str, Role)> {
    let candidates = [
        (layout.cytoplasm_suffix.as_str(), Role::Cytoplasm),
        (layout.nuclei_suffix.as_str(), Role::Nuclei),
        (layout.raw_cytoplasm_suffix.as_str(), Role::RawCytoplasm),
        (layout.raw_nuclei_suffix.as_str(), Role::RawNuclei),
    ];
    // longest suffix wins when suffixes overlap
    candidates
        .iter()
        .filter(|(suffix, _)| !suffix.is_empty() && stem.len() > suffix.len() && stem.ends_with(suffix))
        .max_by_key(|(suffix, _)| suffix.len())
        .map(|(suffix, role)| (&stem[..stem.len() - suffix.len()], *role))
}

fn discover_group(
    group: &str,
    dir: &Path,
    layout: &LayoutConfig,
    warnings: &mut Vec<String>,
) -> Result<Vec<ImageEntry>, MaskError> {
    let mut slots: BTreeMap<String, Slots> = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if !path.is_file() {
            continue;
        }
        let (Some(stem), Some(ext)) = (
            path.file_stem().and_then(|s| s.to_str()),
            path.extension().and_then(|s| s.to_str()),
        ) else {
            continue;
        };
        let ext = ext.to_ascii_lowercase();
        let Some((id, role)) = classify(stem, layout) else {
            continue;
        };
        let slot = slots.entry(id.to_string()).or_default();
        match (role, ext.as_str()) {
            (Role::Cytoplasm, "png" | "npy") => slot.cytoplasm.push(path),
            (Role::Nuclei, "png" | "npy") => slot.nuclei.push(path),
            (Role::RawCytoplasm, "png") => slot.raw_cytoplasm = Some(path),
            (Role::RawNuclei, "png") => slot.raw_nuclei = Some(path),
            _ => {}
        }
    }

    let mut images = Vec::new();
    for (id, mut slot) in slots {
        let cyto = pick_mask(group, &id, "cytoplasm", &mut slot.cytoplasm, warnings);
        let nuc = pick_mask(group, &id, "nuclei", &mut slot.nuclei, warnings);
        match (cyto, nuc) {
            (Some(cytoplasm), Some(nuclei)) => images.push(ImageEntry {
                image_id: id,
                cytoplasm,
                nuclei,
                raw_cytoplasm: slot.raw_cytoplasm,
                raw_nuclei: slot.raw_nuclei,
                pitch: None,
            }),
            (None, None) => {}
            (Some(_), None) => warnings.push(format!("{group}/{id}: nuclei mask missing, image excluded")),
            (None, Some(_)) => warnings.push(format!("{group}/{id}: cytoplasm mask missing, image excluded")),
        }
    }
    Ok(images)
}

fn pick_mask(
    group: &str,
    id: &str,
    channel: &str,
    found: &mut Vec<PathBuf>,
    warnings: &mut Vec<String>,
) -> Option<PathBuf> {
    found.sort();
    if found.len() > 1 {
        // prefer .npy: it is the lossless export of the segmentation tool
        let chosen = found
            .iter()
            .find(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("npy")))
            .unwrap_or(&found[0])
            .clone();
        warnings.push(format!(
            "{group}/{id}: several {channel} masks found, using {}",
            chosen.display()
        ));
        return Some(chosen);
    }
    found.pop()
}

/// Build a plan from a CSV manifest with columns
/// `group,image_id,cytoplasm,nuclei` and optional
/// `raw_cytoplasm,raw_nuclei,pitch`. Relative paths resolve against `root`.
pub fn load_manifest(root: &Path, manifest: &Path) -> Result<BatchPlan, MaskError> {
    let text = fs::read_to_string(manifest).map_err(io_err(manifest))?;
    let bad = |reason: String| MaskError::Decode {
        path: manifest.to_path_buf(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let required = ["group", "image_id", "cytoplasm", "nuclei"];
    for name in required {
        if col(name).is_none() {
            return Err(bad(format!("manifest lacks column {name:?}")));
        }
    }
    let known = ["group", "image_id", "cytoplasm", "nuclei", "raw_cytoplasm", "raw_nuclei", "pitch"];
    if let Some(extra) = headers.iter().find(|h| !known.contains(h)) {
        return Err(bad(format!("unknown manifest column {extra:?}")));
    }

    let resolve = |s: &str| {
        let p = PathBuf::from(s);
        if p.is_absolute() {
            p
        } else {
            root.join(p)
        }
    };
    let mut plan = BatchPlan::default();
    let mut groups: BTreeMap<String, BTreeMap<String, ImageEntry>> = BTreeMap::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |name: &str| col(name).and_then(|i| record.get(i)).filter(|s| !s.is_empty());
        let (Some(group), Some(id), Some(cyto), Some(nuc)) =
            (field("group"), field("image_id"), field("cytoplasm"), field("nuclei"))
        else {
            plan.warnings
                .push(format!("manifest row {}: missing required field, row skipped", line + 2));
            continue;
        };
        let pitch = match field("pitch") {
            Some(s) => match s.parse::<f64>() {
                Ok(v) if v.is_finite() && v > 0.0 => Some(v),
                _ => return Err(bad(format!("row {}: invalid pitch {s:?}", line + 2))),
            },
            None => None,
        };
        let entry = ImageEntry {
            image_id: id.to_string(),
            cytoplasm: resolve(cyto),
            nuclei: resolve(nuc),
            raw_cytoplasm: field("raw_cytoplasm").map(resolve),
            raw_nuclei: field("raw_nuclei").map(resolve),
            pitch,
        };
        let missing: Vec<&Path> = [&entry.cytoplasm, &entry.nuclei]
            .into_iter()
            .filter(|p| !p.is_file())
            .map(PathBuf::as_path)
            .collect();
        if !missing.is_empty() {
            plan.warnings.push(format!(
                "{group}/{id}: mask file {} not found, image excluded",
                missing[0].display()
            ));
            continue;
        }
        let images = groups.entry(group.to_string()).or_default();
        if images.insert(id.to_string(), entry).is_some() {
            return Err(bad(format!("duplicate image {group}/{id}")));
        }
    }
    plan.groups = groups
        .into_iter()
        .map(|(name, images)| GroupPlan {
            name,
            images: images.into_values().collect(),
        })
        .collect();
    if plan.groups.is_empty() {
        plan.warnings.push("manifest lists no usable images".into());
    }
    Ok(plan)
}
