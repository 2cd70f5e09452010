use crate::geometry::{Point, Rect};

use super::delaunay::{triangulate, InsertError};
use super::TessellationError;

/// Relative tolerance (fraction of the rectangle diagonal) for duplicate
/// seeds and coincident polygon vertices.
pub const MERGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeSource {
    Bounds,
    Neighbor,
}

/// Bounded Voronoi diagram of a seed set.
#[derive(Debug, Clone, PartialEq)]
pub struct Tessellation {
    bounds: Rect,
    seeds: Vec<Point>,
    polygons: Vec<Vec<Point>>,
    neighbor_counts: Vec<usize>,
    interior_flags: Vec<bool>,
    delaunay_neighbors: Vec<Vec<usize>>,
    triangles: Vec<[usize; 3]>,
}

impl Tessellation {
    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn seeds(&self) -> &[Point] {
        &self.seeds
    }

    /// Clipped cells, counterclockwise (positive signed area), one per seed.
    pub fn polygons(&self) -> &[Vec<Point>] {
        &self.polygons
    }

    /// Number of Voronoi neighbors per seed, i.e. cell edges shared with
    /// another cell (edges on the rectangle are not counted).
    pub fn neighbor_counts(&self) -> &[usize] {
        &self.neighbor_counts
    }

    /// True when the unclipped cell is bounded and stays clear of the
    /// rectangle boundary.
    pub fn interior_flags(&self) -> &[bool] {
        &self.interior_flags
    }

    pub fn interior_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.interior_flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i)
    }

    pub fn interior_count(&self) -> usize {
        self.interior_flags.iter().filter(|&&f| f).count()
    }

    /// Delaunay neighbors of seed `i`, sorted.
    pub fn delaunay_neighbors(&self, i: usize) -> &[usize] {
        &self.delaunay_neighbors[i]
    }

    /// Delaunay triangles as counterclockwise seed index triples.
    pub fn delaunay_triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
}

/// Build the Voronoi diagram of `seeds` clipped to `bounds`.
pub fn build_voronoi(seeds: &[Point], bounds: Rect) -> Result<Tessellation, TessellationError> {
    if seeds.is_empty() {
        return Err(TessellationError::NoSeeds);
    }
    if !(bounds.width() > 0.0 && bounds.height() > 0.0) {
        return Err(TessellationError::InvalidBounds);
    }
    for (index, s) in seeds.iter().enumerate() {
        if !bounds.contains(*s) {
            return Err(TessellationError::SeedOutOfBounds { index, x: s.x, y: s.y });
        }
    }

    let side = bounds.width().max(bounds.height());
    let normalized: Vec<[f64; 2]> = seeds
        .iter()
        .map(|s| [(s.x - bounds.min_x) / side, (s.y - bounds.min_y) / side])
        .collect();
    let diagonal = bounds.diagonal();
    let tol_norm = MERGE_TOLERANCE * diagonal / side;
    let delaunay = triangulate(&normalized, tol_norm).map_err(|e| match e {
        InsertError::Duplicate { existing, inserted } => TessellationError::DuplicateSeed {
            first: existing.min(inserted),
            second: existing.max(inserted),
        },
    })?;

    let eps = MERGE_TOLERANCE * diagonal;
    let mut polygons = Vec::with_capacity(seeds.len());
    let mut neighbor_counts = Vec::with_capacity(seeds.len());
    let mut interior_flags = Vec::with_capacity(seeds.len());
    for (i, &seed) in seeds.iter().enumerate() {
        // clip in coordinate order so the result does not depend on seed indices
        let mut others: Vec<Point> = delaunay.neighbors[i].iter().map(|&j| seeds[j]).collect();
        others.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        let cell = clip_cell(seed, others.into_iter(), bounds, eps);
        neighbor_counts.push(cell.iter().filter(|(_, s)| *s == EdgeSource::Neighbor).count());
        let clear = cell.iter().all(|(p, _)| {
            p.x - bounds.min_x > eps && bounds.max_x - p.x > eps && p.y - bounds.min_y > eps && bounds.max_y - p.y > eps
        });
        interior_flags.push(!delaunay.on_hull[i] && clear);
        polygons.push(cell.into_iter().map(|(p, _)| p).collect());
    }

    Ok(Tessellation {
        bounds,
        seeds: seeds.to_vec(),
        polygons,
        neighbor_counts,
        interior_flags,
        delaunay_neighbors: delaunay.neighbors,
        triangles: delaunay.triangles,
    })
}

/// Intersect the rectangle with the half-planes closer to `seed` than to
/// each neighbor. Each vertex carries the source of the edge leaving it.
fn clip_cell(
    seed: Point,
    neighbors: impl Iterator<Item = Point>,
    bounds: Rect,
    eps: f64,
) -> Vec<(Point, EdgeSource)> {
    let mut poly: Vec<(Point, EdgeSource)> = bounds.corners().into_iter().map(|c| (c, EdgeSource::Bounds)).collect();
    let mut next = Vec::with_capacity(16);
    for other in neighbors {
        let d = other - seed;
        let mid = Point::new((seed.x + other.x) / 2.0, (seed.y + other.y) / 2.0);
        let side = |p: Point| (p.x - mid.x) * d.x + (p.y - mid.y) * d.y;
        next.clear();
        for k in 0..poly.len() {
            let (p, src) = poly[k];
            let (q, _) = poly[(k + 1) % poly.len()];
            let (fp, fq) = (side(p), side(q));
            let (in_p, in_q) = (fp <= 0.0, fq <= 0.0);
            if in_p {
                next.push((p, src));
            }
            if in_p != in_q {
                let t = fp / (fp - fq);
                let x = Point::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y));
                next.push((x, if in_p { EdgeSource::Neighbor } else { src }));
            }
        }
        std::mem::swap(&mut poly, &mut next);
        if poly.is_empty() {
            break;
        }
    }
    merge_close(poly, eps)
}

fn merge_close(poly: Vec<(Point, EdgeSource)>, eps: f64) -> Vec<(Point, EdgeSource)> {
    let mut out: Vec<(Point, EdgeSource)> = Vec::with_capacity(poly.len());
    for (p, src) in poly {
        match out.last_mut() {
            Some(last) if last.0.distance(p) <= eps => last.1 = src,
            _ => out.push((p, src)),
        }
    }
    while out.len() > 1 && out[out.len() - 1].0.distance(out[0].0) <= eps {
        out.pop();
    }
    out
}
