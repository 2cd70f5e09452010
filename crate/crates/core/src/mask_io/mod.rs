//! Label mask loading, pixel scale and dataset discovery.
//!
//! A label mask is a single-channel integer image where `0` is background and
//! every positive value identifies one segmented subject. Masks are read from
//! 8/16-bit grayscale PNG files or plain NPY arrays. Binary masks (values in
//! `{0, 1}` only) are split into subjects by 8-connected component labeling.

mod dataset;
mod labeling;
mod npy;

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use dataset::{discover_dataset, load_manifest, BatchPlan, GroupPlan, ImageEntry, LayoutConfig};
pub use labeling::{label_binary, Component, ComponentMap};

/// Default pixel pitch in µm/px: a 1.08 mm² field imaged at 1920×1440 px.
pub const DEFAULT_PITCH_UM: f64 = 0.625;

#[derive(Debug, Error)]
pub enum MaskError {
    #[error("invalid pixel scale: {0}")]
    InvalidScale(String),
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to decode {path}: {reason}")]
    Decode { path: PathBuf, reason: String },
    #[error("unsupported mask format in {path}: {reason}")]
    Unsupported { path: PathBuf, reason: String },
    #[error("mask dimensions {found_w}x{found_h} do not match sibling channel {expected_w}x{expected_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        found_w: usize,
        found_h: usize,
    },
    #[error("invalid mask: {0}")]
    Invalid(String),
    #[error("label {label} consists of {components} disconnected components (strict label mode)")]
    SplitLabel { label: u32, components: usize },
}

/// Physical size of one pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelScale {
    pitch: f64,
    area_per_px: f64,
}

impl PixelScale {
    /// Scale from an edge length in µm/px.
    pub fn from_pitch(pitch: f64) -> Result<Self, MaskError> {
        if !(pitch.is_finite() && pitch > 0.0) {
            return Err(MaskError::InvalidScale(format!(
                "pitch must be positive and finite, got {pitch}"
            )));
        }
        Ok(Self {
            pitch,
            area_per_px: pitch * pitch,
        })
    }

    /// Micrometers per pixel edge.
    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    /// Square micrometers per pixel.
    pub fn area_per_px(&self) -> f64 {
        self.area_per_px
    }
}

impl Default for PixelScale {
    fn default() -> Self {
        Self::from_pitch(DEFAULT_PITCH_UM).expect("default pitch is positive")
    }
}

/// Derive the pixel scale from the scanned field area (mm²) and the image
/// size in pixels.
pub fn derive_scale(scanned_area_mm2: f64, width: u32, height: u32) -> Result<PixelScale, MaskError> {
    if !(scanned_area_mm2.is_finite() && scanned_area_mm2 > 0.0) || width == 0 || height == 0 {
        return Err(MaskError::InvalidScale(format!(
            "scanned area {scanned_area_mm2} mm² over {width}x{height} px"
        )));
    }
    let area_per_px = scanned_area_mm2 * 1e6 / (f64::from(width) * f64::from(height));
    Ok(PixelScale {
        pitch: area_per_px.sqrt(),
        area_per_px,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    /// Stained cytoplasm (FITC).
    Cytoplasm,
    /// Stained nuclei (DAPI).
    Nuclei,
}

impl Channel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Channel::Cytoplasm => "cytoplasm",
            Channel::Nuclei => "nuclei",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cytoplasm" => Ok(Channel::Cytoplasm),
            "nuclei" => Ok(Channel::Nuclei),
            other => Err(format!("unknown channel {other:?}")),
        }
    }
}

/// Integer-labeled pixel grid for one channel of one image. Row-major,
/// origin at the top-left corner.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMask {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    channel: Channel,
    scale: PixelScale,
}

impl LabelMask {
    pub fn new(
        width: usize,
        height: usize,
        labels: Vec<u32>,
        channel: Channel,
        scale: PixelScale,
    ) -> Result<Self, MaskError> {
        if width == 0 || height == 0 {
            return Err(MaskError::Invalid(format!("empty grid {width}x{height}")));
        }
        if labels.len() != width * height {
            return Err(MaskError::Invalid(format!(
                "grid holds {} values, expected {width}x{height}",
                labels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            labels,
            channel,
            scale,
        })
    }

    /// Build from nested rows, mostly for tests and fixtures.
    pub fn from_rows(rows: &[Vec<u32>], channel: Channel, scale: PixelScale) -> Result<Self, MaskError> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(MaskError::Invalid("ragged rows".into()));
        }
        Self::new(width, height, rows.concat(), channel, scale)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn scale(&self) -> PixelScale {
        self.scale
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Label at signed coordinates; outside the grid reads as background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> u32 {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            0
        } else {
            self.labels[y as usize * self.width + x as usize]
        }
    }

    /// Distinct positive labels in ascending order.
    pub fn label_set(&self) -> BTreeSet<u32> {
        self.labels.iter().copied().filter(|&l| l > 0).collect()
    }

    pub fn with_scale(mut self, scale: PixelScale) -> Self {
        self.scale = scale;
        self
    }

    /// Physical area of the whole frame in µm².
    pub fn frame_area_um2(&self) -> f64 {
        (self.width * self.height) as f64 * self.scale.area_per_px()
    }

    /// 8-connected components of equal-label pixels.
    pub fn components(&self) -> ComponentMap {
        ComponentMap::build(self.width, self.height, &self.labels)
    }

    /// Reject labels that occur as more than one 8-connected component.
    pub fn check_strict(&self) -> Result<(), MaskError> {
        let comps = self.components();
        let mut counts: std::collections::BTreeMap<u32, usize> = Default::default();
        for c in comps.components() {
            *counts.entry(c.label).or_default() += 1;
        }
        match counts.into_iter().find(|&(_, n)| n > 1) {
            Some((label, components)) => Err(MaskError::SplitLabel { label, components }),
            None => Ok(()),
        }
    }

    pub fn ensure_same_shape(&self, other: &LabelMask) -> Result<(), MaskError> {
        if self.width != other.width || self.height != other.height {
            return Err(MaskError::DimensionMismatch {
                expected_w: self.width,
                expected_h: self.height,
                found_w: other.width,
                found_h: other.height,
            });
        }
        Ok(())
    }
}

/// Raw grid as read from disk, before binary detection.
#[derive(Debug)]
struct RawGrid {
    width: usize,
    height: usize,
    values: Vec<u32>,
}

/// Load a label mask from a PNG or NPY file.
///
/// If the file only contains the values `{0, 1}` it is treated as a binary
/// foreground mask and relabeled into 8-connected components `1..=K`, in
/// raster order of each component's first pixel.
pub fn load_label_mask(path: &Path, channel: Channel, scale: PixelScale) -> Result<LabelMask, MaskError> {
    let raw = read_raw_grid(path)?;
    let values = if raw.values.iter().all(|&v| v <= 1) {
        label_binary(raw.width, raw.height, &raw.values).0
    } else {
        raw.values
    };
    LabelMask::new(raw.width, raw.height, values, channel, scale)
}

/// Load both channel masks of one image and check that their shapes agree.
pub fn load_mask_pair(
    cytoplasm: &Path,
    nuclei: &Path,
    scale: PixelScale,
    strict_labels: bool,
) -> Result<(LabelMask, LabelMask), MaskError> {
    let cells = load_label_mask(cytoplasm, Channel::Cytoplasm, scale)?;
    let nuc = load_label_mask(nuclei, Channel::Nuclei, scale)?;
    cells.ensure_same_shape(&nuc)?;
    if strict_labels {
        cells.check_strict()?;
        nuc.check_strict()?;
    }
    Ok((cells, nuc))
}

fn read_raw_grid(path: &Path) -> Result<RawGrid, MaskError> {
    let bytes = std::fs::read(path).map_err(|source| MaskError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if bytes.starts_with(npy::MAGIC) {
        npy::decode(&bytes).map_err(|reason| MaskError::Unsupported {
            path: path.to_path_buf(),
            reason,
        })
    } else if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        decode_png(path, &bytes)
    } else {
        Err(MaskError::Unsupported {
            path: path.to_path_buf(),
            reason: "neither a PNG nor an NPY file".into(),
        })
    }
}

fn decode_png(path: &Path, bytes: &[u8]) -> Result<RawGrid, MaskError> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png).map_err(|e| {
        MaskError::Decode {
            path: path.to_path_buf(),
            reason: e.to_string(),
        }
    })?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    let values: Vec<u32> = match img {
        image::DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(u32::from).collect(),
        image::DynamicImage::ImageLuma16(buf) => buf.into_raw().into_iter().map(u32::from).collect(),
        other => {
            return Err(MaskError::Unsupported {
                path: path.to_path_buf(),
                reason: format!(
                    "label masks must be single-channel 8- or 16-bit, got {:?}",
                    other.color()
                ),
            })
        }
    };
    Ok(RawGrid {
        width,
        height,
        values,
    })
}

/// Optional raw channel image used only as an overlay background.
pub fn load_raw_channel(path: &Path) -> Result<image::GrayImage, MaskError> {
    let img = image::open(path).map_err(|e| MaskError::Decode {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    match img.color() {
        image::ColorType::L8 | image::ColorType::Rgb8 => Ok(img.to_luma8()),
        other => Err(MaskError::Unsupported {
            path: path.to_path_buf(),
            reason: format!("raw channel images must be 8-bit grayscale or RGB, got {other:?}"),
        }),
    }
}
