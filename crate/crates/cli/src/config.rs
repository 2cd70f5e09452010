//! Run configuration: flat `key = value` files plus command-line overrides.

use std::path::{Path, PathBuf};

use cellmorph::mask_io::{LayoutConfig, DEFAULT_PITCH_UM};
use cellmorph::morphometry::DEFAULT_MIN_SIZE_PX;
use thiserror::Error;

/// Per-image features aggregated into `groups.csv` and tested in `anova.csv`.
pub const GROUP_FEATURES: [&str; 12] = [
    "cell_area_um2",
    "cell_roundness",
    "coverage_cells",
    "nucleus_area_um2",
    "nucleus_roundness",
    "coverage_nuclei",
    "ratio",
    "voronoi_entropy",
    "mean_csm",
    "density_per_mm2",
    "n_cells",
    "n_nuclei",
];

pub const KEYS: [&str; 12] = [
    "root",
    "out",
    "pitch",
    "min_size",
    "strict_labels",
    "jobs",
    "features",
    "manifest",
    "cytoplasm_suffix",
    "nuclei_suffix",
    "raw_cytoplasm_suffix",
    "raw_nuclei_suffix",
];

const ALIASES: [(&str, &str); 14] = [
    ("pxsize", "pitch"),
    ("px_size", "pitch"),
    ("pixel_size", "pitch"),
    ("pixelsize", "pitch"),
    ("resolution", "pitch"),
    ("threads", "jobs"),
    ("workers", "jobs"),
    ("parallelism", "jobs"),
    ("minsize", "min_size"),
    ("min_subject_size", "min_size"),
    ("output", "out"),
    ("output_dir", "out"),
    ("strict", "strict_labels"),
    ("input", "root"),
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{key}`{}", suggestion.as_ref().map(|s| format!(" (did you mean `{s}`?)")).unwrap_or_default())]
    UnknownKey { key: String, suggestion: Option<String> },
    #[error("key `{0}` given twice")]
    DuplicateKey(String),
    #[error("`{key}`: cannot parse {value:?} as {expected}")]
    Type {
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("`{key}`: {value} is out of range ({reason})")]
    Range { key: String, value: String, reason: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ConfigError {
    /// Config key the error refers to, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::UnknownKey { key, .. }
            | ConfigError::DuplicateKey(key)
            | ConfigError::Type { key, .. }
            | ConfigError::Range { key, .. } => Some(key),
            _ => None,
        }
    }
}

/// Closest known key, via the alias table first and then edit distance.
pub fn suggest_key(unknown: &str) -> Option<String> {
    let lower = unknown.to_ascii_lowercase().replace('-', "_");
    if let Some((_, k)) = ALIASES.iter().find(|(alias, _)| *alias == lower) {
        return Some((*k).to_string());
    }
    KEYS.iter()
        .map(|k| (strsim::levenshtein(&lower, k), *k))
        .filter(|(d, k)| *d <= 2.max(k.len() / 3))
        .min()
        .map(|(_, k)| k.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub root: PathBuf,
    pub out: PathBuf,
    /// µm per pixel.
    pub pitch: f64,
    pub min_size: usize,
    pub strict_labels: bool,
    pub jobs: usize,
    /// Features written to the group tables, in output order.
    pub features: Vec<String>,
    pub manifest: Option<PathBuf>,
    pub cytoplasm_suffix: String,
    pub nuclei_suffix: String,
    pub raw_cytoplasm_suffix: String,
    pub raw_nuclei_suffix: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        let layout = LayoutConfig::default();
        Self {
            root: PathBuf::from("."),
            out: PathBuf::from("cellmorph-out"),
            pitch: DEFAULT_PITCH_UM,
            min_size: DEFAULT_MIN_SIZE_PX,
            strict_labels: false,
            jobs: 1,
            features: GROUP_FEATURES.iter().map(|s| s.to_string()).collect(),
            manifest: None,
            cytoplasm_suffix: layout.cytoplasm_suffix,
            nuclei_suffix: layout.nuclei_suffix,
            raw_cytoplasm_suffix: layout.raw_cytoplasm_suffix,
            raw_nuclei_suffix: layout.raw_nuclei_suffix,
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(ConfigError::Type {
            key: key.into(),
            value: value.into(),
            expected: "a boolean",
        }),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, expected: &'static str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Type {
        key: key.into(),
        value: value.into(),
        expected,
    })
}

impl RunConfig {
    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "root" => self.root = PathBuf::from(value),
            "out" => self.out = PathBuf::from(value),
            "pitch" => self.pitch = parse_num(key, value, "a number")?,
            "min_size" => self.min_size = parse_num(key, value, "a non-negative integer")?,
            "strict_labels" => self.strict_labels = parse_bool(key, value)?,
            "jobs" => self.jobs = parse_num(key, value, "a positive integer")?,
            "features" => {
                self.features = if value.trim() == "all" {
                    GROUP_FEATURES.iter().map(|s| s.to_string()).collect()
                } else {
                    value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect()
                }
            }
            "manifest" => self.manifest = (!value.is_empty()).then(|| PathBuf::from(value)),
            "cytoplasm_suffix" => self.cytoplasm_suffix = value.into(),
            "nuclei_suffix" => self.nuclei_suffix = value.into(),
            "raw_cytoplasm_suffix" => self.raw_cytoplasm_suffix = value.into(),
            "raw_nuclei_suffix" => self.raw_nuclei_suffix = value.into(),
            _ => {
                return Err(ConfigError::UnknownKey {
                    key: key.into(),
                    suggestion: suggest_key(key),
                })
            }
        }
        Ok(())
    }

    /// Range checks across all fields.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let range = |key: &str, value: String, reason: &str| ConfigError::Range {
            key: key.into(),
            value,
            reason: reason.into(),
        };
        if !(self.pitch.is_finite() && self.pitch > 0.0) {
            return Err(range("pitch", self.pitch.to_string(), "must be a positive number of µm per pixel"));
        }
        if self.jobs == 0 {
            return Err(range("jobs", "0".into(), "must be at least 1"));
        }
        if self.features.is_empty() {
            return Err(range("features", String::new(), "select at least one feature"));
        }
        for f in &self.features {
            if !GROUP_FEATURES.contains(&f.as_str()) {
                return Err(range("features", f.clone(), "unknown feature"));
            }
        }
        for (key, suffix) in [
            ("cytoplasm_suffix", &self.cytoplasm_suffix),
            ("nuclei_suffix", &self.nuclei_suffix),
        ] {
            if suffix.is_empty() {
                return Err(range(key, String::new(), "must not be empty"));
            }
        }
        if self.cytoplasm_suffix == self.nuclei_suffix {
            return Err(range("nuclei_suffix", self.nuclei_suffix.clone(), "must differ from cytoplasm_suffix"));
        }
        if normalize(&self.root) == normalize(&self.out) {
            return Err(range("out", self.out.display().to_string(), "must differ from root"));
        }
        Ok(())
    }

    pub fn layout(&self) -> LayoutConfig {
        LayoutConfig {
            cytoplasm_suffix: self.cytoplasm_suffix.clone(),
            nuclei_suffix: self.nuclei_suffix.clone(),
            raw_cytoplasm_suffix: self.raw_cytoplasm_suffix.clone(),
            raw_nuclei_suffix: self.raw_nuclei_suffix.clone(),
            exclude: vec![self.out.clone()],
        }
    }

    /// `key = value` lines that reproduce this configuration.
    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("root = {}", self.root.display()),
            format!("out = {}", self.out.display()),
            format!("pitch = {}", self.pitch),
            format!("min_size = {}", self.min_size),
            format!("strict_labels = {}", self.strict_labels),
            format!("jobs = {}", self.jobs),
            format!("features = {}", self.features.join(",")),
        ];
        if let Some(m) = &self.manifest {
            lines.push(format!("manifest = {}", m.display()));
        }
        lines.push(format!("cytoplasm_suffix = {}", self.cytoplasm_suffix));
        lines.push(format!("nuclei_suffix = {}", self.nuclei_suffix));
        lines.push(format!("raw_cytoplasm_suffix = {}", self.raw_cytoplasm_suffix));
        lines.push(format!("raw_nuclei_suffix = {}", self.raw_nuclei_suffix));
        lines.join("\n") + "\n"
    }
}

fn normalize(p: &Path) -> PathBuf {
    let abs = std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf());
    let mut out = PathBuf::new();
    for c in abs.components() {
        match c {
            std::path::Component::CurDir => {}
            std::path::Component::ParentDir => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    std::fs::canonicalize(&out).unwrap_or(out)
}

/// Parse flat `key = value` text into a validated configuration. Blank lines
/// and `#` comments are ignored; keys may appear once.
pub fn validate_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    apply_text(&mut cfg, text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Apply `key = value` text on top of `cfg` without validating the result.
pub fn apply_text(cfg: &mut RunConfig, text: &str) -> Result<(), ConfigError> {
    let mut seen = std::collections::HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::DuplicateKey(key.to_string()));
        }
        cfg.set(key, value.trim())?;
    }
    Ok(())
}

pub fn load_config_file(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg = RunConfig::default();
    apply_text(&mut cfg, &text)?;
    Ok(cfg)
}
