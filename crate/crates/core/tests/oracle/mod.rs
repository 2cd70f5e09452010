//! Brute-force reference implementations used by the property and
//! acceptance tests. Each one is written independently of the library code
//! it checks.
#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;

/// 8-connected components of equal nonzero value, by breadth-first flood
/// fill. Components are listed in raster order of their first pixel; each
/// holds its pixel indices in raster order.
pub fn flood_fill(w: usize, h: usize, values: &[u32]) -> Vec<(u32, Vec<usize>)> {
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    for start in 0..w * h {
        if values[start] == 0 || seen[start] {
            continue;
        }
        let v = values[start];
        let mut pixels = vec![start];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            let (x, y) = ((p % w) as i64, (p / w) as i64);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let q = ny as usize * w + nx as usize;
                    if !seen[q] && values[q] == v {
                        seen[q] = true;
                        pixels.push(q);
                        queue.push_back(q);
                    }
                }
            }
        }
        pixels.sort_unstable();
        out.push((v, pixels));
    }
    out
}

/// Pixels of `component` that are 4-adjacent to the background region
/// connected to the outside of the frame (background taken 4-connected,
/// the outside counting as background).
pub fn outer_border(w: usize, h: usize, component: &[usize]) -> Vec<usize> {
    // padded grid, 1 = object
    let (pw, ph) = (w + 2, h + 2);
    let mut obj = vec![false; pw * ph];
    for &p in component {
        obj[(p / w + 1) * pw + p % w + 1] = true;
    }
    let mut outside = vec![false; pw * ph];
    let mut queue = VecDeque::from([0usize]);
    outside[0] = true;
    while let Some(p) = queue.pop_front() {
        let (x, y) = (p % pw, p / pw);
        let mut push = |q: usize| {
            if !obj[q] && !outside[q] {
                outside[q] = true;
                queue.push_back(q);
            }
        };
        if x > 0 {
            push(p - 1);
        }
        if x + 1 < pw {
            push(p + 1);
        }
        if y > 0 {
            push(p - pw);
        }
        if y + 1 < ph {
            push(p + pw);
        }
    }
    let mut out: Vec<usize> = component
        .iter()
        .copied()
        .filter(|&p| {
            let q = (p / w + 1) * pw + p % w + 1;
            outside[q - 1] || outside[q + 1] || outside[q - pw] || outside[q + pw]
        })
        .collect();
    out.sort_unstable();
    out
}

/// Mean pixel coordinates of `pixels`.
pub fn centroid(w: usize, pixels: &[usize]) -> (f64, f64) {
    let n = pixels.len() as f64;
    let sx: f64 = pixels.iter().map(|p| (p % w) as f64).sum();
    let sy: f64 = pixels.iter().map(|p| (p / w) as f64).sum();
    (sx / n, sy / n)
}

/// Intersection counts by testing every (nucleus, cell) label pair.
pub fn overlap_by_pairs(cells: &[u32], nuclei: &[u32]) -> BTreeMap<(u32, u32), usize> {
    let mut cell_labels: Vec<u32> = cells.iter().copied().filter(|&l| l != 0).collect();
    cell_labels.sort_unstable();
    cell_labels.dedup();
    let mut nucleus_labels: Vec<u32> = nuclei.iter().copied().filter(|&l| l != 0).collect();
    nucleus_labels.sort_unstable();
    nucleus_labels.dedup();
    let mut out = BTreeMap::new();
    for &n in &nucleus_labels {
        for &c in &cell_labels {
            let k = cells.iter().zip(nuclei).filter(|(&a, &b)| a == c && b == n).count();
            if k > 0 {
                out.insert((n, c), k);
            }
        }
    }
    out
}

/// Gamma at a positive half-integer or integer `x = m/2`, by exact recursion
/// from Γ(1/2) = √π and Γ(1) = 1.
pub fn gamma_half(m: u32) -> f64 {
    assert!(m >= 1);
    let (mut x, mut g) = if m % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    while x < m as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

/// F-distribution density with integer degrees of freedom.
pub fn f_density(t: f64, d1: u32, d2: u32) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let (a, b) = (d1 as f64, d2 as f64);
    let ln_beta = gamma_half(d1).ln() + gamma_half(d2).ln() - gamma_half(d1 + d2).ln();
    let ln_num = 0.5 * (a * (a * t).ln() + b * b.ln() - (a + b) * (a * t + b).ln());
    (ln_num - ln_beta - t.ln()).exp()
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = (a + b) / 2.0;
        let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f((a + b) / 2.0), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), eps, 50)
}

/// CDF of the F distribution by quadrature, substituting `t = u²` so the
/// integrable singularity at 0 (d1 = 1) becomes smooth.
pub fn f_cdf_quadrature(x: f64, d1: u32, d2: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let g = move |u: f64| 2.0 * u * f_density(u * u, d1, d2);
    adaptive_simpson(&g, 0.0, x.sqrt(), 1e-13)
}

/// Squared pooled two-sample t statistic.
pub fn pooled_t_squared(a: &[f64], b: &[f64]) -> f64 {
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let ssa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let ssb: f64 = b.iter().map(|x| (x - mb).powi(2)).sum();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let sp2 = (ssa + ssb) / (na + nb - 2.0);
    let t = (ma - mb) / (sp2 * (1.0 / na + 1.0 / nb)).sqrt();
    t * t
}

/// Minimum over a dense rotation scan of the squared deviation between
/// `poly` and the concentric equal-area regular polygon, divided by `n·A`.
pub fn csm_by_rotation_scan(poly: &[(f64, f64)], step: f64) -> f64 {
    let n = poly.len();
    let cx = poly.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let cy = poly.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    let area = twice.abs() / 2.0;
    let dir = twice.signum();
    let r = (2.0 * area / (n as f64 * (2.0 * PI / n as f64).sin())).sqrt();
    let steps = (2.0 * PI / step).ceil() as usize;
    let mut best = f64::INFINITY;
    for s in 0..steps {
        let theta = s as f64 * step;
        let dev: f64 = (0..n)
            .map(|k| {
                let a = theta + dir * 2.0 * PI * k as f64 / n as f64;
                let (qx, qy) = (cx + r * a.cos(), cy + r * a.sin());
                (poly[k].0 - qx).powi(2) + (poly[k].1 - qy).powi(2)
            })
            .sum();
        best = best.min(dev);
    }
    best / (n as f64 * area)
}

/// Nearest-seed rasterization on a `res × res` sample grid over
/// `[0, w] × [0, h]`; returns the approximate area of each seed's cell.
pub fn raster_cell_areas(seeds: &[(f64, f64)], w: f64, h: f64, res: usize) -> Vec<f64> {
    let mut areas = vec![0.0; seeds.len()];
    let (dx, dy) = (w / res as f64, h / res as f64);
    for j in 0..res {
        for i in 0..res {
            let (x, y) = ((i as f64 + 0.5) * dx, (j as f64 + 0.5) * dy);
            let nearest = (0..seeds.len())
                .min_by(|&a, &b| {
                    let da = (seeds[a].0 - x).powi(2) + (seeds[a].1 - y).powi(2);
                    let db = (seeds[b].0 - x).powi(2) + (seeds[b].1 - y).powi(2);
                    da.total_cmp(&db)
                })
                .unwrap();
            areas[nearest] += dx * dy;
        }
    }
    areas
}

/// Digitized disk of radius `r` centred in a square frame, as a label mask.
pub fn disk(r: f64) -> (usize, Vec<u32>) {
    let side = (2.0 * r).ceil() as usize + 8;
    let c = side as f64 / 2.0;
    let labels = (0..side * side)
        .map(|p| {
            let (x, y) = ((p % side) as f64 + 0.5, (p / side) as f64 + 0.5);
            u32::from((x - c).powi(2) + (y - c).powi(2) <= r * r)
        })
        .collect();
    (side, labels)
}

/// Axis-aligned `w × h` rectangle with a 2-pixel margin.
pub fn rectangle(w: usize, h: usize) -> (usize, usize, Vec<u32>) {
    let (fw, fh) = (w + 4, h + 4);
    let labels = (0..fw * fh)
        .map(|p| {
            let (x, y) = (p % fw, p / fw);
            u32::from((2..2 + w).contains(&x) && (2..2 + h).contains(&y))
        })
        .collect();
    (fw, fh, labels)
}
