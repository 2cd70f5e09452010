use std::fmt::Write as _;
use std::io::Cursor;
use std::path::Path;

use base64::Engine;
use image::{GrayImage, ImageFormat, RgbImage};

use crate::mask_io::LabelMask;
use crate::morphometry::{trace_from, ChainCode, SubjectFeatures};
use crate::tessellation::Tessellation;

use super::{io_err, ReportError};

const PALETTE: [(usize, &str); 8] = [
    (3, "#d73027"),
    (4, "#fc8d59"),
    (5, "#fee090"),
    (6, "#e0f3f8"),
    (7, "#91bfdb"),
    (8, "#4575b4"),
    (9, "#313695"),
    (10, "#542788"),
];
const OTHER_CLASS: &str = "#999999";

/// Fill color for polygons with `k` edges.
pub fn class_color(k: usize) -> &'static str {
    PALETTE.iter().find(|(c, _)| *c == k).map_or(OTHER_CLASS, |(_, color)| color)
}

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// SVG markup of a tessellation: interior cells filled by edge-count class,
/// boundary cells hatched, seeds as dots.
pub fn voronoi_svg(tess: &Tessellation) -> String {
    let b = tess.bounds();
    let unit = b.diagonal() / 1000.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{}" height="{}">"#,
        num(b.min_x),
        num(b.min_y),
        num(b.width()),
        num(b.height()),
        num(b.width()),
        num(b.height())
    );
    let _ = writeln!(
        s,
        r##"<defs><pattern id="hatch" patternUnits="userSpaceOnUse" width="{w}" height="{w}" patternTransform="rotate(45)"><rect width="{w}" height="{w}" fill="#ffffff"/><line x1="0" y1="0" x2="0" y2="{w}" stroke="#777777" stroke-width="{sw}"/></pattern></defs>"##,
        w = num(8.0 * unit),
        sw = num(2.0 * unit)
    );
    s.push_str("<g class=\"cells\">\n");
    for (i, poly) in tess.polygons().iter().enumerate() {
        let points: Vec<String> = poly.iter().map(|p| format!("{},{}", num(p.x), num(p.y))).collect();
        let (class, fill) = if tess.interior_flags()[i] {
            (format!("k{}", poly.len()), class_color(poly.len()).to_string())
        } else {
            ("boundary".to_string(), "url(#hatch)".to_string())
        };
        let _ = writeln!(
            s,
            r##"<polygon class="{class}" points="{}" fill="{fill}" stroke="#333333" stroke-width="{}"/>"##,
            points.join(" "),
            num(unit)
        );
    }
    s.push_str("</g>\n<g class=\"seeds\">\n");
    for p in tess.seeds() {
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="{}" fill="#000000"/>"##,
            num(p.x),
            num(p.y),
            num(2.0 * unit)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

pub fn render_voronoi_svg(tess: &Tessellation, path: &Path) -> Result<(), ReportError> {
    std::fs::write(path, voronoi_svg(tess)).map_err(io_err(path))
}

/// One mask channel with its measured subjects.
#[derive(Debug, Clone, Copy)]
pub struct OverlayLayer<'a> {
    pub mask: &'a LabelMask,
    pub features: &'a [SubjectFeatures],
}

/// Inputs of an overlay figure. Cytoplasm outlines are drawn first, nuclei on
/// top; raw channels, when present, form the background (FITC green, DAPI
/// blue).
#[derive(Debug, Clone, Copy, Default)]
pub struct OverlayInput<'a> {
    pub cytoplasm: Option<OverlayLayer<'a>>,
    pub nuclei: Option<OverlayLayer<'a>>,
    pub raw_cytoplasm: Option<&'a GrayImage>,
    pub raw_nuclei: Option<&'a GrayImage>,
}

fn chain_path(chain: &ChainCode) -> String {
    let (x0, y0) = (chain.start.0 as f64 + 0.5, chain.start.1 as f64 + 0.5);
    if chain.is_single_pixel() {
        return format!("M{} {}h1v1h-1Z", num(x0 - 0.5), num(y0 - 0.5));
    }
    let mut d = format!("M{} {}", num(x0), num(y0));
    for (x, y) in chain.points().into_iter().skip(1) {
        let _ = write!(d, "L{} {}", num(x as f64 + 0.5), num(y as f64 + 0.5));
    }
    d.push('Z');
    d
}

fn layer_svg(out: &mut String, class: &str, stroke: &str, layer: &OverlayLayer<'_>) -> Result<(), ReportError> {
    let _ = writeln!(out, r#"<g class="{class}" fill="none" stroke="{stroke}" stroke-width="1">"#);
    for c in layer.mask.components().components() {
        let chain = trace_from(layer.mask, c.label, c.start).map_err(|e| ReportError::Render(e.to_string()))?;
        let _ = writeln!(out, r#"<path data-label="{}" d="{}"/>"#, c.label, chain_path(&chain));
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        r#"<g class="{class}-labels" fill="{stroke}" font-family="sans-serif" font-size="10" text-anchor="middle">"#
    );
    for f in layer.features {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">{:.1} µm²</text>"#,
            num(f.centroid_px.0 + 0.5),
            num(f.centroid_px.1 + 0.5),
            f.area_um2
        );
    }
    out.push_str("</g>\n");
    Ok(())
}

fn background_png(w: usize, h: usize, green: Option<&GrayImage>, blue: Option<&GrayImage>) -> Result<String, ReportError> {
    for img in [green, blue].into_iter().flatten() {
        if (img.width() as usize, img.height() as usize) != (w, h) {
            return Err(ReportError::DimensionMismatch(format!(
                "raw image {}x{} vs mask {w}x{h}",
                img.width(),
                img.height()
            )));
        }
    }
    let rgb = RgbImage::from_fn(w as u32, h as u32, |x, y| {
        let g = green.map_or(0, |i| i.get_pixel(x, y).0[0]);
        let b = blue.map_or(0, |i| i.get_pixel(x, y).0[0]);
        image::Rgb([0, g, b])
    });
    let mut png = Vec::new();
    rgb.write_to(&mut Cursor::new(&mut png), ImageFormat::Png)
        .map_err(|e| ReportError::Render(e.to_string()))?;
    Ok(base64::engine::general_purpose::STANDARD.encode(png))
}

/// SVG markup of subject outlines with area labels.
pub fn overlay_svg(input: &OverlayInput<'_>) -> Result<String, ReportError> {
    let masks: Vec<&LabelMask> = [input.cytoplasm, input.nuclei].into_iter().flatten().map(|l| l.mask).collect();
    let first = masks
        .first()
        .ok_or_else(|| ReportError::Render("overlay needs at least one mask".into()))?;
    let (w, h) = (first.width(), first.height());
    if let Some(m) = masks.iter().find(|m| (m.width(), m.height()) != (w, h)) {
        return Err(ReportError::DimensionMismatch(format!(
            "masks {w}x{h} and {}x{}",
            m.width(),
            m.height()
        )));
    }

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{w}" height="{h}">"#
    );
    if input.raw_cytoplasm.is_some() || input.raw_nuclei.is_some() {
        let data = background_png(w, h, input.raw_cytoplasm, input.raw_nuclei)?;
        let _ = writeln!(
            s,
            r#"<image class="background" x="0" y="0" width="{w}" height="{h}" href="data:image/png;base64,{data}"/>"#
        );
    } else {
        let _ = writeln!(s, r##"<rect class="background" x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##);
    }
    if let Some(layer) = &input.cytoplasm {
        layer_svg(&mut s, "cytoplasm", "#00a000", layer)?;
    }
    if let Some(layer) = &input.nuclei {
        layer_svg(&mut s, "nuclei", "#ff00ff", layer)?;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_overlay_svg(input: &OverlayInput<'_>, path: &Path) -> Result<(), ReportError> {
    let svg = overlay_svg(input)?;
    std::fs::write(path, svg).map_err(io_err(path))
}
