//! CSV tables and SVG figures.
//!
//! Numbers are written with 6 significant digits in `%g` style and a `.`
//! decimal separator; missing values are empty fields.

mod csv_io;
mod svg;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use csv_io::{
    read_anova_csv, read_group_csv, read_image_csv, read_subject_csv, write_anova_csv, write_group_csv,
    write_image_csv, write_subject_csv, AnovaRecord, FeatureRecord, ImageRecord, SubjectFlags, ANOVA_COLUMNS,
    GROUP_COLUMNS, IMAGE_COLUMNS, SUBJECT_COLUMNS,
};
pub use svg::{
    class_color, overlay_svg, render_overlay_svg, render_voronoi_svg, voronoi_svg, OverlayInput, OverlayLayer,
};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: row {row}: {reason}")]
    Parse { path: PathBuf, row: usize, reason: String },
    #[error("duplicate record key {0}")]
    DuplicateKey(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("figure rendering failed: {0}")]
    Render(String),
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Format with 6 significant digits, `%g` style: fixed notation for decimal
/// exponents in `[-4, 6)`, scientific otherwise, trailing zeros removed.
pub fn fmt_sig(v: f64) -> String {
    const DIGITS: i32 = 6;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp) as usize, v);
        trim_zeros(&fixed).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_sig).unwrap_or_default()
}

/// `v` rounded the way it is written to CSV.
pub fn round_sig(v: f64) -> f64 {
    fmt_sig(v).parse().unwrap_or(v)
}
