use std::f64::consts::TAU;

use crate::geometry::{signed_area, vertex_mean, Point};

use super::{Tessellation, TessellationError};

/// Alignment of a polygon with its best-fitting regular n-gon.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonSymmetry {
    pub vertices: Vec<Point>,
    /// Reference vertex matched to each input vertex, same order.
    pub reference_vertices: Vec<Point>,
    pub n: usize,
    /// Area of the reference polygon, equal to the input's absolute area.
    pub reference_area: f64,
    pub csm: f64,
}

impl PolygonSymmetry {
    /// `Σ|M_i − M̂_i|² / (n·S)` from the stored fields.
    pub fn recompute(&self) -> f64 {
        squared_deviation(&self.vertices, &self.reference_vertices) / (self.n as f64 * self.reference_area)
    }
}

fn squared_deviation(a: &[Point], b: &[Point]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.distance_squared(*q)).sum()
}

/// Continuous symmetry measure against the regular n-gon of equal area,
/// centred on the vertex mean, with cyclic order preserved and the rotation
/// chosen to minimise the squared deviation.
pub fn polygon_csm(vertices: &[Point]) -> Result<PolygonSymmetry, TessellationError> {
    let n = vertices.len();
    if n < 3 {
        return Err(TessellationError::DegeneratePolygon(format!("{n} vertices")));
    }
    let (min_x, max_x, min_y, max_y) = vertices.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)),
    );
    let extent = (max_x - min_x).hypot(max_y - min_y);
    if !extent.is_finite() || extent == 0.0 {
        return Err(TessellationError::DegeneratePolygon("zero extent".into()));
    }
    for k in 0..n {
        if vertices[k].distance(vertices[(k + 1) % n]) <= 1e-12 * extent {
            return Err(TessellationError::DegeneratePolygon(format!("repeated vertex at {k}")));
        }
    }
    let signed = signed_area(vertices);
    let area = signed.abs();
    if area <= 1e-12 * extent * extent {
        return Err(TessellationError::DegeneratePolygon("zero area".into()));
    }

    let step = TAU / n as f64 * signed.signum();
    let sin_c = (TAU / n as f64).sin();
    let radius = (2.0 * area / (n as f64 * sin_c)).sqrt();
    let centre = vertex_mean(vertices);

    // cross-correlation of centred vertices with the unit reference
    let (mut cr, mut ci) = (0.0, 0.0);
    for (k, v) in vertices.iter().enumerate() {
        let (zx, zy) = (v.x - centre.x, v.y - centre.y);
        let (wc, ws) = ((step * k as f64).cos(), (step * k as f64).sin());
        cr += zx * wc + zy * ws;
        ci += zy * wc - zx * ws;
    }
    let theta0 = ci.atan2(cr);

    let reference = |theta: f64| -> Vec<Point> {
        (0..n)
            .map(|k| {
                let a = theta + step * k as f64;
                Point::new(centre.x + radius * a.cos(), centre.y + radius * a.sin())
            })
            .collect()
    };
    let cost = |theta: f64| squared_deviation(vertices, &reference(theta));
    let refined = golden_section(cost, theta0 - 1e-3, theta0 + 1e-3, 1e-10);
    let theta = if cost(refined) < cost(theta0) { refined } else { theta0 };

    let mut sym = PolygonSymmetry {
        vertices: vertices.to_vec(),
        reference_vertices: reference(theta),
        n,
        reference_area: 0.5 * n as f64 * radius * radius * sin_c,
        csm: 0.0,
    };
    sym.csm = sym.recompute();
    Ok(sym)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Mean CSM over the interior polygons of a tessellation.
pub fn image_csm(tess: &Tessellation) -> Result<f64, TessellationError> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in tess.interior_indices() {
        sum += polygon_csm(&tess.polygons()[i])?.csm;
        count += 1;
    }
    if count == 0 {
        return Err(TessellationError::NoInteriorPolygons);
    }
    Ok(sum / count as f64)
}
