mod oracles;

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use terrasect::geometry::{on_segment, polygon_area, Point, Polygon, Segment};
use terrasect::map::{load_map, MapData, MapFormat};
use terrasect::regions::{build_zone_models, AnalysisConfig};
use terrasect::separation::{enrich_contour, filter_candidate, generate_candidates, FilterContext, Objective};
use terrasect::zoning::Zone;

use oracles::*;

fn corpus_map(name: &str) -> MapData {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../maps").join(name);
    load_map(&std::fs::read(&path).unwrap(), MapFormat::from_path(&path)).unwrap()
}

fn open_field(size: u32) -> (MapData, Zone) {
    let row = ".".repeat(size as usize) + "\n";
    let map = load_map(row.repeat(size as usize).as_bytes(), MapFormat::Ascii).unwrap();
    let (lg, _) = terrasect::labeling::label_components(&map.grid, |t| map.grid.walkable(t));
    let zone = terrasect::zoning::split_into_zones(&map.grid, &lg).zones.remove(0);
    (map, zone)
}

#[test]
fn strictly_convex_contour_keeps_every_non_edge_pair() {
    let (map, zone) = open_field(40);
    // Lattice points on a convex curve, no three collinear.
    let hulls: [&[(i64, i64)]; 3] = [
        &[
            (2, 20),
            (5, 10),
            (12, 4),
            (20, 2),
            (28, 4),
            (35, 10),
            (38, 20),
            (35, 30),
            (28, 36),
            (20, 38),
            (12, 36),
            (5, 30),
        ],
        &[(3, 3), (30, 5), (36, 30), (10, 34)],
        &[(10, 2), (20, 3), (29, 6), (35, 14), (36, 24), (30, 33), (18, 37), (8, 33), (3, 22), (4, 10)],
    ];
    for hull in hulls {
        let poly = Polygon::simple(hull.iter().map(|&(x, y)| Point::int(x, y)).collect());
        let ctx = FilterContext::new(&poly, &zone, &map, vec![]);
        let m = hull.len();
        assert_eq!(generate_candidates(&poly, &ctx).len(), m * (m - 1) / 2 - m);
    }
}

/// Candidate pairs by direct enumeration with an independent filter.
fn reference_candidates(poly: &Polygon, zone: &Zone, map: &MapData, anchors: &[Point]) -> BTreeSet<(Point, Point)> {
    let zone_tiles: HashSet<_> = zone.tiles.iter().copied().collect();
    let resources: HashSet<_> = map.resources.iter().map(|r| r.position).collect();
    let mut edges = HashSet::new();
    for ring in poly.rings() {
        for i in 0..ring.len() {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let verts: BTreeSet<Point> = poly.rings().flatten().copied().collect();
    let mut out = BTreeSet::new();
    for &a in &verts {
        for &b in verts.range(a..).skip(1) {
            let s = Segment::new(a, b);
            if edges.contains(&(a, b)) || !chord_is_valid(poly, &s) {
                continue;
            }
            let q = |p: Point| (p.x(), p.y());
            let tiles = brute_force_cover(q(a), q(b), map.grid.width().max(map.grid.height()) as i32);
            let tiles_ok =
                tiles.iter().all(|&t| zone_tiles.contains(&t) && map.grid.buildable(t) && !resources.contains(&t));
            if tiles_ok && !anchors.iter().any(|&c| on_segment(c, a, b)) {
                out.insert((a, b));
            }
        }
    }
    out
}

#[test]
fn corpus_candidates_match_direct_enumeration() {
    let config = AnalysisConfig::default();
    for name in ["two_base_valley.txt", "island.txt", "obstacle.json"] {
        let map = corpus_map(name);
        let models = build_zone_models(&map, &config);
        assert!(!models.is_empty(), "{name} has a zone to split");
        for zm in models {
            let model = zm.model.unwrap();
            let got: BTreeSet<(Point, Point)> = model.candidates.iter().map(|s| (s.a, s.b)).collect();
            assert_eq!(got.len(), model.candidates.len());
            assert_eq!(got, reference_candidates(&model.polygon, &zm.zone, &map, &model.anchors), "{name}");
        }
    }
}

#[test]
fn emitted_candidates_pass_the_filter_in_sorted_id_order() {
    let config = AnalysisConfig::default();
    for name in ["two_base_valley.txt", "island.txt", "oxide.json", "ramped_plateaus.txt", "romanticide.txt"] {
        let map = corpus_map(name);
        for zm in build_zone_models(&map, &config) {
            let model = zm.model.unwrap();
            let ctx = FilterContext::new(&model.polygon, &zm.zone, &map, model.anchors.clone());
            for (i, s) in model.candidates.iter().enumerate() {
                assert_eq!(s.id, i);
                assert!(s.a < s.b);
                assert!(s.length > 0.0);
                assert!(filter_candidate(s, &ctx));
            }
            assert!(model.candidates.windows(2).all(|w| (w[0].a, w[0].b) < (w[1].a, w[1].b)));
            assert_eq!(model.required_selected, model.n_clusters - 1);
            let again = build_zone_models(&map, &config);
            let twin = again.iter().find(|z| z.zone.id == zm.zone.id).unwrap().model.as_ref().unwrap();
            assert_eq!(twin.candidates, model.candidates);
        }
    }
}

#[test]
fn model_sizes_follow_cluster_counts() {
    let config = AnalysisConfig::default();
    assert!(build_zone_models(&corpus_map("destination.txt"), &config).is_empty());
    let romanticide = build_zone_models(&corpus_map("romanticide.txt"), &config);
    assert_eq!(romanticide.len(), 1);
    let model = romanticide[0].model.as_ref().unwrap();
    assert_eq!((model.n_clusters, model.required_selected), (6, 5));
    let valley = build_zone_models(&corpus_map("two_base_valley.txt"), &config);
    assert_eq!(valley[0].model.as_ref().unwrap().required_selected, 1);
    let areas = AnalysisConfig { objective: Objective::LeastSquaresAreas, ..Default::default() };
    assert_eq!(
        build_zone_models(&corpus_map("two_base_valley.txt"), &areas)[0].model.as_ref().unwrap().objective,
        Objective::LeastSquaresAreas
    );
}

#[test]
fn enrichment_preserves_the_curve_and_only_adds_vertices() {
    let ring: Vec<Point> =
        [(0, 0), (40, 0), (40, 7), (13, 25), (0, 25)].iter().map(|&(x, y)| Point::int(x, y)).collect();
    let poly = Polygon::simple(ring.clone());
    let mut previous = 0;
    for max_edge in [50.0, 20.0, 10.0, 5.0, 2.5, 1.0] {
        let e = enrich_contour(&poly, max_edge);
        assert_eq!(polygon_area(&e), polygon_area(&poly));
        assert!(ring.iter().all(|p| e.outer.contains(p)));
        let n = e.outer.len();
        for i in 0..n {
            let (a, b) = (e.outer[i], e.outer[(i + 1) % n]);
            assert!(a.dist(&b) <= max_edge + 1e-9);
            // Every vertex lies on the original boundary.
            assert!((0..ring.len()).any(|j| on_segment(a, ring[j], ring[(j + 1) % ring.len()])));
        }
        assert!(n >= previous);
        previous = n;
    }
    let line = Polygon::simple(vec![Point::int(0, 0), Point::int(40, 0), Point::int(40, 1)]);
    let e = enrich_contour(&line, 10.0);
    assert_eq!(&e.outer[1..4], &[Point::int(10, 0), Point::int(20, 0), Point::int(30, 0)]);
    let border = Polygon::simple(vec![Point::int(0, 0), Point::int(96, 0), Point::int(96, 1)]);
    let e = enrich_contour(&border, 10.0);
    let inserted: Vec<Point> = e.outer[1..10].to_vec();
    assert_eq!(inserted, (1..10).map(|k| Point::new(48 * k, 0, 5)).collect::<Vec<_>>());
    assert_eq!(e.outer[10], Point::int(96, 0));
}
