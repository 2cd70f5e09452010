//! 8-connected component labeling by two-pass union-find.

/// One 8-connected run of equal-label pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Label value shared by all pixels of the component.
    pub label: u32,
    /// First pixel in raster order, i.e. the top-most then left-most pixel.
    pub start: (usize, usize),
    pub area_px: usize,
}

/// Per-pixel component ids (`0` = background, otherwise `index + 1`) plus
/// component descriptors ordered by their first pixel in raster order.
#[derive(Debug, Clone)]
pub struct ComponentMap {
    width: usize,
    ids: Vec<u32>,
    components: Vec<Component>,
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        // slot 0 is unused so provisional ids start at 1
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return ra;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

impl ComponentMap {
    /// Label 8-connected components where two pixels connect iff both are
    /// non-zero and carry the same value.
    pub fn build(width: usize, height: usize, values: &[u32]) -> Self {
        assert_eq!(values.len(), width * height);
        let mut provisional = vec![0u32; values.len()];
        let mut sets = DisjointSet::new();

        for y in 0..height {
            for x in 0..width {
                let idx = y * width + x;
                let v = values[idx];
                if v == 0 {
                    continue;
                }
                // already-visited neighbors: W, NW, N, NE
                let mut current = 0u32;
                let visit = |nidx: usize, current: &mut u32, sets: &mut DisjointSet| {
                    if values[nidx] == v {
                        let other = provisional[nidx];
                        *current = if *current == 0 { sets.find(other) } else { sets.union(*current, other) };
                    }
                };
                if x > 0 {
                    visit(idx - 1, &mut current, &mut sets);
                }
                if y > 0 {
                    let up = idx - width;
                    if x > 0 {
                        visit(up - 1, &mut current, &mut sets);
                    }
                    visit(up, &mut current, &mut sets);
                    if x + 1 < width {
                        visit(up + 1, &mut current, &mut sets);
                    }
                }
                provisional[idx] = if current == 0 { sets.make() } else { current };
            }
        }

        let mut compact = vec![0u32; sets.parent.len()];
        let mut components: Vec<Component> = Vec::new();
        let mut ids = provisional;
        for idx in 0..ids.len() {
            let p = ids[idx];
            if p == 0 {
                continue;
            }
            let root = sets.find(p) as usize;
            if compact[root] == 0 {
                components.push(Component {
                    label: values[idx],
                    start: (idx % width, idx / width),
                    area_px: 0,
                });
                compact[root] = components.len() as u32;
            }
            let id = compact[root];
            components[id as usize - 1].area_px += 1;
            ids[idx] = id;
        }

        Self {
            width,
            ids,
            components,
        }
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Component id per pixel; `0` is background, id `k` refers to
    /// `components()[k - 1]`.
    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn id_at(&self, x: usize, y: usize) -> u32 {
        self.ids[y * self.width + x]
    }
}

/// Label a binary foreground grid (non-zero = foreground) into sequential
/// 8-connected subjects `1..=K`, ordered by first pixel in raster order.
/// Returns the labeled grid and `K`.
pub fn label_binary(width: usize, height: usize, values: &[u32]) -> (Vec<u32>, usize) {
    let binary: Vec<u32> = values.iter().map(|&v| u32::from(v != 0)).collect();
    let map = ComponentMap::build(width, height, &binary);
    let count = map.components.len();
    (map.ids, count)
}
