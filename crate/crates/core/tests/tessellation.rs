mod oracle;

use std::f64::consts::{PI, TAU};

use cellmorph::geometry::{point_in_polygon, signed_area, Point, Rect};
use cellmorph::tessellation::{build_voronoi, image_csm, polygon_csm, voronoi_entropy, ClassHistogram};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

fn seeds_strategy() -> impl Strategy<Value = (f64, f64, Vec<(f64, f64)>)> {
    (10.0f64..1000.0, 10.0f64..1000.0, 1usize..200).prop_flat_map(|(w, h, n)| {
        (Just(w), Just(h), prop::collection::vec((0.001f64..0.999, 0.001f64..0.999), n))
    })
}

fn to_points(w: f64, h: f64, unit: &[(f64, f64)]) -> Vec<Point> {
    unit.iter().map(|&(x, y)| Point::new(x * w, y * h)).collect()
}

/// Hexagonal lattice whose frame cuts through the outer cells, so every
/// cell with a full neighbourhood is interior.
fn hex_lattice(cols: usize, rows: usize, spacing: f64) -> (Vec<Point>, Rect) {
    let dy = spacing * 3f64.sqrt() / 2.0;
    let mut pts = Vec::new();
    for j in 0..rows {
        for i in 0..cols {
            let shift = if j % 2 == 1 { 0.5 } else { 0.0 };
            pts.push(Point::new((i as f64 + 0.5 + shift) * spacing, (j as f64 + 0.5) * dy));
        }
    }
    (pts, Rect::from_size((cols as f64 + 0.5) * spacing, rows as f64 * dy))
}

fn circumcircle_contains_strictly(a: Point, b: Point, c: Point, d: Point, tol: f64) -> bool {
    let (ax, ay) = (a.x - d.x, a.y - d.y);
    let (bx, by) = (b.x - d.x, b.y - d.y);
    let (cx, cy) = (c.x - d.x, c.y - d.y);
    let det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay);
    let orient = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    det * orient.signum() > tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn cells_partition_the_rectangle((w, h, unit) in seeds_strategy()) {
        let seeds = to_points(w, h, &unit);
        let t = build_voronoi(&seeds, Rect::from_size(w, h));
        prop_assume!(t.is_ok());
        let t = t.unwrap();
        let total: f64 = t.polygons().iter().map(|p| signed_area(p)).sum();
        prop_assert!((total - w * h).abs() <= 1e-6 * w * h, "{} vs {}", total, w * h);
        for (s, poly) in seeds.iter().zip(t.polygons()) {
            prop_assert!(signed_area(poly) > 0.0);
            prop_assert!(point_in_polygon(*s, poly));
        }
    }

    #[test]
    fn delaunay_circumcircles_are_empty((w, h, unit) in seeds_strategy()) {
        // normalized coordinates, as the triangulation sees them
        let side = w.max(h);
        let seeds = to_points(w, h, &unit);
        let t = build_voronoi(&seeds, Rect::from_size(w, h));
        prop_assume!(t.is_ok());
        let t = t.unwrap();
        let norm: Vec<Point> = seeds.iter().map(|p| Point::new(p.x / side, p.y / side)).collect();
        for tri in t.delaunay_triangles() {
            let [a, b, c] = tri.map(|i| norm[i]);
            for (k, &d) in norm.iter().enumerate() {
                if tri.contains(&k) {
                    continue;
                }
                prop_assert!(!circumcircle_contains_strictly(a, b, c, d, 1e-9), "seed {} inside {:?}", k, tri);
            }
        }
    }

    #[test]
    fn seed_order_does_not_matter((w, h, unit) in seeds_strategy(), seed in any::<u64>()) {
        let seeds = to_points(w, h, &unit);
        let mut order: Vec<usize> = (0..seeds.len()).collect();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        for i in (1..order.len()).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let shuffled: Vec<Point> = order.iter().map(|&i| seeds[i]).collect();
        let a = build_voronoi(&seeds, Rect::from_size(w, h));
        prop_assume!(a.is_ok());
        let a = a.unwrap();
        let b = build_voronoi(&shuffled, Rect::from_size(w, h)).unwrap();
        for (k, &i) in order.iter().enumerate() {
            prop_assert_eq!(a.neighbor_counts()[i], b.neighbor_counts()[k]);
            prop_assert_eq!(a.interior_flags()[i], b.interior_flags()[k]);
            prop_assert_eq!(&a.polygons()[i], &b.polygons()[k]);
        }
        let (ea, eb) = (voronoi_entropy(&a).ok().map(|r| r.1), voronoi_entropy(&b).ok().map(|r| r.1));
        prop_assert_eq!(ea, eb);
        if let Ok((hist, s)) = voronoi_entropy(&a) {
            prop_assert!(s >= 0.0 && s <= (hist.counts.len() as f64).ln() + 1e-12);
            prop_assert!((hist.proportions.values().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert_eq!(s == 0.0, hist.counts.len() == 1);
        }
    }

    #[test]
    fn csm_is_similarity_invariant(
        radii in prop::collection::vec(0.5f64..2.0, 3..12),
        angle in 0.0f64..TAU,
        scale in 0.01f64..100.0,
        tx in -1e3f64..1e3,
        ty in -1e3f64..1e3,
    ) {
        // star-shaped polygon around the origin
        let n = radii.len();
        let poly: Vec<Point> = radii
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let a = TAU * k as f64 / n as f64;
                Point::new(r * a.cos(), r * a.sin())
            })
            .collect();
        let (s, c) = angle.sin_cos();
        let moved: Vec<Point> = poly
            .iter()
            .map(|p| Point::new(scale * (c * p.x - s * p.y) + tx, scale * (s * p.x + c * p.y) + ty))
            .collect();
        let a = polygon_csm(&poly).unwrap();
        let b = polygon_csm(&moved).unwrap();
        prop_assert!((a.csm - b.csm).abs() < 1e-9, "{} vs {}", a.csm, b.csm);
        prop_assert!((b.csm - b.recompute()).abs() < 1e-12);
        prop_assert!(a.csm >= 0.0);
    }
}

#[test]
fn grid_interior_cells_match_bisector_oracle() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..20 {
        let spacing = rng.random_range(0.5..50.0);
        let (ox, oy) = (rng.random_range(0.0..spacing), rng.random_range(0.0..spacing));
        let seeds: Vec<Point> = (0..25)
            .map(|i| Point::new(ox + (i % 5) as f64 * spacing, oy + (i / 5) as f64 * spacing))
            .collect();
        let bounds = Rect::from_size(ox + 5.0 * spacing, oy + 5.0 * spacing);
        let t = build_voronoi(&seeds, bounds).unwrap();
        let interior: Vec<usize> = t.interior_indices().collect();
        let expected: Vec<usize> = (0..25).filter(|i| (1..4).contains(&(i % 5)) && (1..4).contains(&(i / 5))).collect();
        assert_eq!(interior, expected);
        for &i in &interior {
            // bisectors with the four axial neighbours bound the square
            let s = seeds[i];
            let poly = &t.polygons()[i];
            assert_eq!(poly.len(), 4);
            let h = spacing / 2.0;
            for (dx, dy) in [(-h, -h), (-h, h), (h, -h), (h, h)] {
                let corner = Point::new(s.x + dx, s.y + dy);
                assert!(poly.iter().any(|p| p.distance(corner) < 1e-9 * spacing), "{poly:?} lacks {corner:?}");
            }
        }
        assert!(image_csm(&t).unwrap() < 1e-9);
    }
}

#[test]
fn hexagonal_lattice_is_perfectly_ordered() {
    let (pts, bounds) = hex_lattice(14, 12, 7.0);
    let t = build_voronoi(&pts, bounds).unwrap();
    let (hist, s) = voronoi_entropy(&t).unwrap();
    assert_eq!(hist.counts.keys().copied().collect::<Vec<_>>(), vec![6], "{:?}", hist.counts);
    assert_eq!(s, 0.0);
    assert!(t.interior_count() >= 100);
    assert!(image_csm(&t).unwrap() < 1e-9);
}

#[test]
fn two_equal_classes_give_ln_two() {
    let h = ClassHistogram::from_classes([5, 7, 7, 5, 5, 7]);
    assert!((h.entropy() - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn single_interior_polygon_csm_is_the_image_csm() {
    // a seed ringed by six neighbours: only the centre cell is interior
    let c = Point::new(50.0, 50.0);
    let mut seeds = vec![c];
    for k in 0..6 {
        let a = TAU * k as f64 / 6.0 + 0.2;
        seeds.push(Point::new(c.x + 20.0 * a.cos() + k as f64 * 0.7, c.y + 20.0 * a.sin()));
    }
    let t = build_voronoi(&seeds, Rect::from_size(100.0, 100.0)).unwrap();
    assert_eq!(t.interior_indices().collect::<Vec<_>>(), vec![0]);
    let poly = polygon_csm(&t.polygons()[0]).unwrap();
    assert_eq!(image_csm(&t).unwrap(), poly.csm);
}

#[test]
fn stretched_hexagon_matches_rotation_scan() {
    for (sx, sy, phase) in [(2.0, 1.0, 0.0), (1.0, 2.0, 0.3), (2.0, 1.0, 1.1)] {
        let poly: Vec<(f64, f64)> = (0..6)
            .map(|k| {
                let a = phase + TAU * k as f64 / 6.0;
                (sx * a.cos() + 3.0, sy * a.sin() - 1.0)
            })
            .collect();
        let pts: Vec<Point> = poly.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let got = polygon_csm(&pts).unwrap().csm;
        let want = oracle::csm_by_rotation_scan(&poly, 1e-4);
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        assert!(got > 0.01);
    }
}

#[test]
fn regular_polygons_have_zero_csm() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    for n in 3..=12 {
        for _ in 0..10 {
            let (r, phase) = (rng.random_range(0.01..1e3), rng.random_range(0.0..TAU));
            let (cx, cy) = (rng.random_range(-1e4..1e4), rng.random_range(-1e4..1e4));
            let pts: Vec<Point> = (0..n)
                .map(|k| {
                    let a = phase + TAU * k as f64 / n as f64;
                    Point::new(cx + r * a.cos(), cy + r * a.sin())
                })
                .collect();
            assert!(polygon_csm(&pts).unwrap().csm < 1e-9);
        }
    }
}

#[test]
fn cell_areas_match_nearest_seed_raster() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    for _ in 0..5 {
        let (w, h) = (rng.random_range(20.0..60.0), rng.random_range(20.0..60.0));
        let seeds: Vec<(f64, f64)> = (0..rng.random_range(3..25))
            .map(|_| (rng.random_range(0.0..w), rng.random_range(0.0..h)))
            .collect();
        let pts: Vec<Point> = seeds.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let t = build_voronoi(&pts, Rect::from_size(w, h)).unwrap();
        let raster = oracle::raster_cell_areas(&seeds, w, h, 400);
        for (poly, approx) in t.polygons().iter().zip(raster) {
            assert!((signed_area(poly) - approx).abs() < 0.01 * w * h, "{} vs {approx}", signed_area(poly));
        }
    }
}

#[test]
fn entropy_grows_with_lattice_jitter() {
    let spacing = 10.0;
    let mut medians = Vec::new();
    for sigma in [0.0, 0.05, 0.15, 0.3] {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        let noise = Normal::new(0.0, sigma * spacing + f64::MIN_POSITIVE).unwrap();
        let mut values: Vec<f64> = (0..20)
            .map(|_| {
                let (base, bounds) = hex_lattice(20, 20, spacing);
                let pts: Vec<Point> = base
                    .iter()
                    .map(|p| {
                        let (dx, dy) = if sigma == 0.0 { (0.0, 0.0) } else { (noise.sample(&mut rng), noise.sample(&mut rng)) };
                        Point::new(
                            (p.x + dx).clamp(1e-6, bounds.max_x - 1e-6),
                            (p.y + dy).clamp(1e-6, bounds.max_y - 1e-6),
                        )
                    })
                    .collect();
                voronoi_entropy(&build_voronoi(&pts, bounds).unwrap()).unwrap().1
            })
            .collect();
        values.sort_by(f64::total_cmp);
        medians.push((values[9] + values[10]) / 2.0);
    }
    assert!(medians.windows(2).all(|w| w[0] <= w[1]), "{medians:?}");
}

#[test]
fn poisson_entropy_in_expected_band() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let seeds: Vec<Point> = (0..10_000)
        .map(|_| Point::new(rng.random_range(0.0..1000.0), rng.random_range(0.0..1000.0)))
        .collect();
    let t = build_voronoi(&seeds, Rect::from_size(1000.0, 1000.0)).unwrap();
    let (_, s) = voronoi_entropy(&t).unwrap();
    assert!((1.5..=1.9).contains(&s), "{s}");
    let _ = PI;
}
