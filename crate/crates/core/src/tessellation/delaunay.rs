//! Incremental Bowyer–Watson Delaunay triangulation.
//!
//! Coordinates are normalized to the unit square before insertion and the
//! orientation/in-circle predicates are evaluated exactly (adaptive
//! precision), so co-circular inputs such as square grids are resolved
//! consistently: a point on a circumcircle does not invalidate the triangle.
//! Points are inserted along a Hilbert curve and located by a visibility
//! walk from the previous insertion.

use std::collections::HashMap;

use robust::Coord;

const NONE: u32 = u32::MAX;
/// Half-extent of the enclosing super triangle, in normalized units.
const SUPER_EXTENT: f64 = 1.0e6;

#[inline]
fn coord(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

#[inline]
fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    robust::orient2d(coord(a), coord(b), coord(c))
}

/// Positive when `d` lies strictly inside the circle through the
/// counterclockwise triangle `a b c`.
#[inline]
fn in_circle(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> f64 {
    robust::incircle(coord(a), coord(b), coord(c), coord(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum InsertError {
    /// The point coincides (within tolerance) with an existing vertex.
    Duplicate { existing: usize, inserted: usize },
}

pub(crate) struct Triangulation {
    pts: Vec<[f64; 2]>,
    n_real: usize,
    tris: Vec<[u32; 3]>,
    /// `nbrs[t][i]` is the triangle across the edge opposite `tris[t][i]`.
    nbrs: Vec<[u32; 3]>,
    alive: Vec<bool>,
    free: Vec<u32>,
    mark: Vec<u32>,
    epoch: u32,
    hint: u32,
    walk_rotation: usize,
}

/// Triangulation result over real vertices only.
pub(crate) struct Delaunay {
    pub triangles: Vec<[usize; 3]>,
    /// Sorted, deduplicated Delaunay neighbors of each vertex.
    pub neighbors: Vec<Vec<usize>>,
    /// Vertex is adjacent to the super triangle, i.e. on the convex hull.
    pub on_hull: Vec<bool>,
}

impl Triangulation {
    fn new(points: Vec<[f64; 2]>) -> Self {
        let n_real = points.len();
        let mut pts = points;
        let m = SUPER_EXTENT;
        pts.push([0.5 - 2.0 * m, -m]);
        pts.push([0.5 + 2.0 * m, -m]);
        pts.push([0.5, 2.0 * m]);
        let s = n_real as u32;
        Self {
            pts,
            n_real,
            tris: vec![[s, s + 1, s + 2]],
            nbrs: vec![[NONE; 3]],
            alive: vec![true],
            free: Vec::new(),
            mark: vec![0],
            epoch: 0,
            hint: 0,
            walk_rotation: 0,
        }
    }

    fn is_super(&self, v: u32) -> bool {
        v as usize >= self.n_real
    }

    fn p(&self, v: u32) -> [f64; 2] {
        self.pts[v as usize]
    }

    fn locate(&mut self, q: [f64; 2]) -> u32 {
        let mut t = self.hint;
        'walk: loop {
            self.walk_rotation = (self.walk_rotation + 1) % 3;
            let tri = self.tris[t as usize];
            for k in 0..3 {
                let i = (k + self.walk_rotation) % 3;
                let a = self.p(tri[(i + 1) % 3]);
                let b = self.p(tri[(i + 2) % 3]);
                if orient(a, b, q) < 0.0 {
                    let next = self.nbrs[t as usize][i];
                    debug_assert_ne!(next, NONE, "walk left the super triangle");
                    t = next;
                    continue 'walk;
                }
            }
            return t;
        }
    }

    fn alloc(&mut self, v: [u32; 3]) -> u32 {
        if let Some(t) = self.free.pop() {
            self.tris[t as usize] = v;
            self.nbrs[t as usize] = [NONE; 3];
            self.alive[t as usize] = true;
            t
        } else {
            self.tris.push(v);
            self.nbrs.push([NONE; 3]);
            self.alive.push(true);
            self.mark.push(0);
            (self.tris.len() - 1) as u32
        }
    }

    fn insert(&mut self, v: u32) {
        let q = self.p(v);
        let start = self.locate(q);

        self.epoch += 1;
        let epoch = self.epoch;
        let mut bad = vec![start];
        self.mark[start as usize] = epoch;
        let mut cursor = 0;
        while cursor < bad.len() {
            let t = bad[cursor];
            cursor += 1;
            for i in 0..3 {
                let n = self.nbrs[t as usize][i];
                if n == NONE || self.mark[n as usize] == epoch {
                    continue;
                }
                let [a, b, c] = self.tris[n as usize];
                if in_circle(self.p(a), self.p(b), self.p(c), q) > 0.0 {
                    self.mark[n as usize] = epoch;
                    bad.push(n);
                }
            }
        }

        // cavity boundary, counterclockwise edges (a, b) with the outside triangle
        let mut boundary: Vec<(u32, u32, u32)> = Vec::new();
        for &t in &bad {
            let tri = self.tris[t as usize];
            for i in 0..3 {
                let n = self.nbrs[t as usize][i];
                if n == NONE || self.mark[n as usize] != epoch {
                    boundary.push((tri[(i + 1) % 3], tri[(i + 2) % 3], n));
                }
            }
        }
        for &t in &bad {
            self.alive[t as usize] = false;
            self.free.push(t);
        }

        let mut created: Vec<(u32, u32, u32)> = Vec::with_capacity(boundary.len());
        for &(a, b, outside) in &boundary {
            let t = self.alloc([a, b, v]);
            self.nbrs[t as usize][2] = outside;
            if outside != NONE {
                let o = self.tris[outside as usize];
                let j = (0..3).find(|&j| o[j] != a && o[j] != b).expect("outside triangle shares edge");
                self.nbrs[outside as usize][j] = t;
            }
            created.push((a, b, t));
        }
        for &(a, b, t) in &created {
            // across edge (b, v): the new triangle starting at b
            let across_b = created.iter().find(|e| e.0 == b).map_or(NONE, |e| e.2);
            // across edge (v, a): the new triangle ending at a
            let across_a = created.iter().find(|e| e.1 == a).map_or(NONE, |e| e.2);
            self.nbrs[t as usize][0] = across_b;
            self.nbrs[t as usize][1] = across_a;
        }
        self.hint = created[0].2;
    }

    fn finish(self) -> Delaunay {
        let n = self.n_real;
        let mut triangles = Vec::new();
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut on_hull = vec![false; n];
        for (t, tri) in self.tris.iter().enumerate() {
            if !self.alive[t] {
                continue;
            }
            let has_super = tri.iter().any(|&v| self.is_super(v));
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                match (self.is_super(a), self.is_super(b)) {
                    (false, false) => {
                        neighbors[a as usize].push(b as usize);
                        neighbors[b as usize].push(a as usize);
                    }
                    (false, true) => on_hull[a as usize] = true,
                    (true, false) => on_hull[b as usize] = true,
                    (true, true) => {}
                }
            }
            if !has_super {
                triangles.push([tri[0] as usize, tri[1] as usize, tri[2] as usize]);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Delaunay {
            triangles,
            neighbors,
            on_hull,
        }
    }
}

/// Position along a Hilbert curve of side 2^16 over the unit square.
fn hilbert_index(p: [f64; 2]) -> u64 {
    const SIDE: u32 = 1 << 16;
    let scale = f64::from(SIDE - 1);
    let mut x = (p[0].clamp(0.0, 1.0) * scale) as u32;
    let mut y = (p[1].clamp(0.0, 1.0) * scale) as u32;
    let mut d = 0u64;
    let mut s = SIDE / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = SIDE - 1 - x;
                y = SIDE - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

/// Triangulate points already normalized to the unit square.
///
/// `tolerance` is the minimum separation (normalized units) below which two
/// points count as duplicates.
pub(crate) fn triangulate(points: &[[f64; 2]], tolerance: f64) -> Result<Delaunay, InsertError> {
    check_duplicates(points, tolerance)?;

    let mut order: Vec<usize> = (0..points.len()).collect();
    let keys: Vec<u64> = points.iter().map(|&p| hilbert_index(p)).collect();
    order.sort_by(|&a, &b| {
        keys[a]
            .cmp(&keys[b])
            .then(points[a][0].total_cmp(&points[b][0]))
            .then(points[a][1].total_cmp(&points[b][1]))
    });

    let mut tri = Triangulation::new(points.to_vec());
    for v in order {
        tri.insert(v as u32);
    }
    Ok(tri.finish())
}

fn check_duplicates(points: &[[f64; 2]], tolerance: f64) -> Result<(), InsertError> {
    let cell = tolerance.max(f64::MIN_POSITIVE);
    let key = |p: [f64; 2]| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::with_capacity(points.len());
    for (i, &p) in points.iter().enumerate() {
        let (kx, ky) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(kx + dx, ky + dy)) {
                    for &j in bucket {
                        let q = points[j];
                        if (p[0] - q[0]).hypot(p[1] - q[1]) < tolerance {
                            return Err(InsertError::Duplicate {
                                existing: j,
                                inserted: i,
                            });
                        }
                    }
                }
            }
        }
        grid.entry((kx, ky)).or_default().push(i);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_points_make_one_triangle() {
        let d = triangulate(&[[0.1, 0.1], [0.9, 0.2], [0.4, 0.8]], 1e-9).unwrap();
        assert_eq!(d.triangles.len(), 1);
        assert!(d.on_hull.iter().all(|&h| h));
        assert_eq!(d.neighbors[0], vec![1, 2]);
    }

    #[test]
    fn interior_point_is_not_on_hull() {
        let d = triangulate(&[[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, 0.4]], 1e-9).unwrap();
        assert_eq!(d.triangles.len(), 3);
        assert!(!d.on_hull[3]);
        assert_eq!(d.neighbors[3], vec![0, 1, 2]);
    }

    #[test]
    fn collinear_points_chain_up() {
        let pts: Vec<[f64; 2]> = (0..5).map(|i| [i as f64 / 4.0, 0.5]).collect();
        let d = triangulate(&pts, 1e-9).unwrap();
        assert!(d.triangles.is_empty());
        assert_eq!(d.neighbors[2], vec![1, 3]);
    }

    #[test]
    fn duplicates_are_detected() {
        let err = triangulate(&[[0.2, 0.2], [0.5, 0.5], [0.2, 0.2 + 1e-12]], 1e-9).err();
        assert_eq!(err, Some(InsertError::Duplicate { existing: 0, inserted: 2 }));
    }

    #[test]
    fn hilbert_keys_are_distinct_on_the_grid() {
        let mut keys: Vec<u64> = (0..16)
            .flat_map(|i| (0..16).map(move |j| hilbert_index([i as f64 / 15.0, j as f64 / 15.0])))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), 256);
    }
}
