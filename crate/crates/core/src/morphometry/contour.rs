//! Moore-neighbor boundary tracing into Freeman chain codes.

use crate::mask_io::LabelMask;

use super::MorphError;

/// Freeman 8-direction unit steps in image coordinates (y down).
/// Direction 0 is +x and numbering runs counterclockwise as seen on screen,
/// so 2 is "up" (−y) and 6 is "down" (+y).
pub const DIRECTIONS: [(i64, i64); 8] = [
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Closed outer boundary of one 8-connected region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainCode {
    pub start: (usize, usize),
    pub moves: Vec<u8>,
}

impl ChainCode {
    pub fn is_single_pixel(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn axial_moves(&self) -> usize {
        self.moves.iter().filter(|&&d| d % 2 == 0).count()
    }

    pub fn diagonal_moves(&self) -> usize {
        self.moves.len() - self.axial_moves()
    }

    /// Pixel coordinates visited, starting with `start`. The closing return
    /// to `start` is not repeated.
    pub fn points(&self) -> Vec<(i64, i64)> {
        let mut p = (self.start.0 as i64, self.start.1 as i64);
        let mut out = Vec::with_capacity(self.moves.len().max(1));
        out.push(p);
        for &d in self.moves.iter().take(self.moves.len().saturating_sub(1)) {
            let (dx, dy) = DIRECTIONS[d as usize];
            p = (p.0 + dx, p.1 + dy);
            out.push(p);
        }
        out
    }

    /// Whether the moves return to `start`.
    pub fn is_closed(&self) -> bool {
        let (dx, dy) = self.moves.iter().fold((0i64, 0i64), |(x, y), &d| {
            let (dx, dy) = DIRECTIONS[d as usize];
            (x + dx, y + dy)
        });
        dx == 0 && dy == 0
    }

    /// Shoelace area of the polygon through the traced pixel centers, in px².
    pub fn polygon_area(&self) -> f64 {
        let pts = self.points();
        let n = pts.len();
        if n < 3 {
            return 0.0;
        }
        let twice: i64 = (0..n)
            .map(|i| {
                let a = pts[i];
                let b = pts[(i + 1) % n];
                a.0 * b.1 - b.0 * a.1
            })
            .sum();
        (twice as f64 / 2.0).abs()
    }
}

/// Trace the outer boundary of `label`, starting from its top-most then
/// left-most pixel. The walk is clockwise on screen; holes are ignored.
///
/// When a label is split into several components only the component holding
/// the start pixel is traced; see [`trace_contours`] for all of them.
pub fn trace_contour(mask: &LabelMask, label: u32) -> Result<ChainCode, MorphError> {
    let idx = mask
        .labels()
        .iter()
        .position(|&l| l == label && label != 0)
        .ok_or(MorphError::LabelNotFound(label))?;
    trace_from(mask, label, (idx % mask.width(), idx / mask.width()))
}

/// One chain per 8-connected component of `label`, in raster order of the
/// components' start pixels.
pub fn trace_contours(mask: &LabelMask, label: u32) -> Result<Vec<ChainCode>, MorphError> {
    let binary: Vec<u32> = mask.labels().iter().map(|&l| u32::from(l == label)).collect();
    let map = crate::mask_io::ComponentMap::build(mask.width(), mask.height(), &binary);
    if label == 0 || map.components().is_empty() {
        return Err(MorphError::LabelNotFound(label));
    }
    map.components()
        .iter()
        .map(|c| trace_from(mask, label, c.start))
        .collect()
}

/// Trace from a known start pixel, which must be the top-most then left-most
/// pixel of its component (so its west neighbor is outside the region).
pub(crate) fn trace_from(mask: &LabelMask, label: u32, start: (usize, usize)) -> Result<ChainCode, MorphError> {
    let inside = |x: i64, y: i64| mask.get_signed(x, y) == label;
    let s = (start.0 as i64, start.1 as i64);

    // Scan the Moore neighborhood of `p` clockwise, beginning just after the
    // backtrack pixel `b`. Returns the move, the new pixel and the new
    // backtrack (the last background neighbor checked).
    let step = |p: (i64, i64), b: (i64, i64)| -> Option<(u8, (i64, i64), (i64, i64))> {
        let rel = (b.0 - p.0, b.1 - p.1);
        let bdir = DIRECTIONS.iter().position(|&d| d == rel).expect("backtrack is a neighbor");
        (1..=8).find_map(|k| {
            let d = (bdir + 8 - k) % 8;
            let (dx, dy) = DIRECTIONS[d];
            let q = (p.0 + dx, p.1 + dy);
            if inside(q.0, q.1) {
                let (px, py) = DIRECTIONS[(d + 1) % 8];
                Some((d as u8, q, (p.0 + px, p.1 + py)))
            } else {
                None
            }
        })
    };

    let start_back = (s.0 - 1, s.1);
    let Some((_, q1, b1)) = step(s, start_back) else {
        return Ok(ChainCode {
            start,
            moves: Vec::new(),
        });
    };

    let limit = 8 * mask.width() * mask.height() + 8;
    let mut moves = Vec::new();
    let (mut p, mut b) = (s, start_back);
    loop {
        let (d, q, nb) = step(p, b).expect("pixel with a foreground neighbor keeps one");
        if !moves.is_empty() && p == s && q == q1 && nb == b1 {
            break;
        }
        moves.push(d);
        p = q;
        b = nb;
        if moves.len() > limit {
            return Err(MorphError::UnterminatedContour(label));
        }
    }
    Ok(ChainCode { start, moves })
}
