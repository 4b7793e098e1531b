//! Independent reference implementations shared by the test suites.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_rational::Ratio;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use terrasect::geometry::{
    locate_in_ring, on_segment, point_in_polygon, polygon_area, ring_signed_area, segments_properly_cross,
    split_by_chords_detailed, Location, Point, Polygon, Rational, Segment,
};
use terrasect::labeling::label_components;
use terrasect::map::TileGrid;
use terrasect::separation::{enrich_contour, Constraint, EfopModel, Objective, Separation};
use terrasect::solver::{eval_f_clust, eval_f_cross};
use terrasect::Tile;

pub type Q = Ratio<i128>;

/// Chord endpoints in integer coordinates.
pub type Chord = ((i64, i64), (i64, i64));

/// Parameter interval of `a + t (b - a)` inside the closed square of `tile`,
/// by slab clipping. `None` when the line misses the square.
pub fn clip_interval(a: (Q, Q), b: (Q, Q), tile: Tile) -> Option<(Q, Q)> {
    let mut lo = Q::from_integer(i128::MIN / 4);
    let mut hi = Q::from_integer(i128::MAX / 4);
    for (p, d, min) in [(a.0, b.0 - a.0, tile.x as i128), (a.1, b.1 - a.1, tile.y as i128)] {
        let (min, max) = (Q::from_integer(min), Q::from_integer(min + 1));
        if d == Q::from_integer(0) {
            if p < min || p > max {
                return None;
            }
            continue;
        }
        let (t0, t1) = ((min - p) / d, (max - p) / d);
        let (t0, t1) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        lo = lo.max(t0);
        hi = hi.min(t1);
    }
    (lo <= hi).then_some((lo, hi))
}

/// Tiles whose closed square meets the open segment, by testing every tile.
pub fn brute_force_cover(a: (Q, Q), b: (Q, Q), grid: i32) -> BTreeSet<Tile> {
    let (zero, one) = (Q::from_integer(0), Q::from_integer(1));
    let mut out = BTreeSet::new();
    for y in -1..=grid {
        for x in -1..=grid {
            let t = Tile::new(x, y);
            if let Some((lo, hi)) = clip_interval(a, b, t) {
                if lo < one && hi > zero {
                    out.insert(t);
                }
            }
        }
    }
    out
}

pub fn random_point(rng: &mut ChaCha8Rng, grid: i64) -> (Point, (Q, Q)) {
    let w = rng.gen_range(1..=4);
    let (x, y) = (rng.gen_range(0..=grid * w), rng.gen_range(0..=grid * w));
    (Point::new(x, y, w), (Q::new(x as i128, w as i128), Q::new(y as i128, w as i128)))
}

/// Largest 8-connected blob of a random grid, as a traced polygon.
pub fn random_blob(rng: &mut ChaCha8Rng, size: u32, density: f64) -> Option<Polygon> {
    let mut grid = TileGrid::new(size, size);
    for y in 0..size as i32 {
        for x in 0..size as i32 {
            if rng.gen_bool(density) {
                grid.set(Tile::new(x, y), true, true, 0);
            }
        }
    }
    let (_, comps) = label_components(&grid, |t| grid.walkable(t));
    comps.into_iter().filter(|c| c.tile_count >= 4).max_by_key(|c| c.tile_count).map(|c| c.polygon())
}

pub fn vertex_uses(poly: &Polygon, p: Point) -> usize {
    poly.rings().flatten().filter(|&&q| q == p).count()
}

pub fn ring_of(poly: &Polygon, p: Point) -> usize {
    poly.rings().position(|r| r.contains(&p)).expect("vertex of the polygon")
}

/// Independent validity test for a chord: interior strictly inside the
/// polygon, touching the boundary only at its endpoints, which are not pinch
/// vertices.
pub fn chord_is_valid(poly: &Polygon, s: &Segment) -> bool {
    if s.a == s.b || vertex_uses(poly, s.a) != 1 || vertex_uses(poly, s.b) != 1 {
        return false;
    }
    if point_in_polygon(s.midpoint(), poly) != Location::Inside {
        return false;
    }
    for e in poly.edges() {
        if segments_properly_cross(s, &e) {
            return false;
        }
        for p in [e.a, e.b] {
            if p != s.a && p != s.b && on_segment(p, s.a, s.b) {
                return false;
            }
        }
    }
    true
}

pub fn compatible(s: &Segment, t: &Segment) -> bool {
    if segments_properly_cross(s, t) {
        return false;
    }
    let same = (s.a == t.a && s.b == t.b) || (s.a == t.b && s.b == t.a);
    let touches = |p: Point, u: &Segment| p != u.a && p != u.b && on_segment(p, u.a, u.b);
    !same && !touches(s.a, t) && !touches(s.b, t) && !touches(t.a, s) && !touches(t.b, s)
}

/// Per chord, whether it splits a face, by Euler's formula: each chord either
/// links two boundary components (no new face) or splits a face in two.
/// Rings are separate components even where they touch at a vertex.
pub fn chord_splits_face(poly: &Polygon, chords: &[Segment]) -> Vec<bool> {
    let rings: Vec<&Vec<Point>> = poly.rings().collect();
    let mut parent: Vec<usize> = (0..rings.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    chords
        .iter()
        .map(|c| {
            let (ra, rb) = (find(&mut parent, ring_of(poly, c.a)), find(&mut parent, ring_of(poly, c.b)));
            parent[ra] = rb;
            ra == rb
        })
        .collect()
}

pub fn random_grid(rng: &mut impl Rng, w: u32, h: u32, density: f64) -> TileGrid {
    let mut g = TileGrid::new(w, h);
    for y in 0..h as i32 {
        for x in 0..w as i32 {
            let walk = rng.gen_bool(density);
            g.set(Tile::new(x, y), walk, walk, 0);
        }
    }
    g
}

/// Breadth-first flood fill over 8-neighbours; returns a label per tile.
pub fn flood_fill(g: &TileGrid) -> Vec<u32> {
    let (w, h) = (g.width() as i32, g.height() as i32);
    let mut labels = vec![0u32; (w * h) as usize];
    let mut next = 0;
    for y in 0..h {
        for x in 0..w {
            let start = Tile::new(x, y);
            if !g.walkable(start) || labels[(y * w + x) as usize] != 0 {
                continue;
            }
            next += 1;
            labels[(y * w + x) as usize] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(t) = queue.pop_front() {
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let n = Tile::new(t.x + dx, t.y + dy);
                        if n.x < 0 || n.y < 0 || n.x >= w || n.y >= h {
                            continue;
                        }
                        let i = (n.y * w + n.x) as usize;
                        if g.walkable(n) && labels[i] == 0 {
                            labels[i] = next;
                            queue.push_back(n);
                        }
                    }
                }
            }
        }
    }
    labels
}

/// Whether two labelings induce the same partition, up to renaming.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    let mut fwd: HashMap<u32, u32> = HashMap::new();
    let mut back: HashMap<u32, u32> = HashMap::new();
    a.iter()
        .zip(b)
        .all(|(&x, &y)| (x == 0) == (y == 0) && *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}

/// Bounded 4-connected pieces of the complement of `inside`, on a grid padded
/// by one tile so that the unbounded piece is connected.
pub fn bounded_complement_pieces(w: i32, h: i32, inside: impl Fn(i32, i32) -> bool) -> usize {
    let (pw, ph) = (w + 2, h + 2);
    let mut seen = vec![false; (pw * ph) as usize];
    let mut pieces = 0;
    for sy in 0..ph {
        for sx in 0..pw {
            let free = |x: i32, y: i32| !(x >= 1 && y >= 1 && x <= w && y <= h && inside(x - 1, y - 1));
            if seen[(sy * pw + sx) as usize] || !free(sx, sy) {
                continue;
            }
            let mut touches_pad = false;
            seen[(sy * pw + sx) as usize] = true;
            let mut stack = vec![(sx, sy)];
            while let Some((x, y)) = stack.pop() {
                touches_pad |= x == 0 || y == 0 || x == pw - 1 || y == ph - 1;
                for (nx, ny) in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
                    if nx < 0 || ny < 0 || nx >= pw || ny >= ph {
                        continue;
                    }
                    let i = (ny * pw + nx) as usize;
                    if !seen[i] && free(nx, ny) {
                        seen[i] = true;
                        stack.push((nx, ny));
                    }
                }
            }
            pieces += usize::from(!touches_pad);
        }
    }
    pieces
}

/// A random traced polygon, enriched, with up to six valid pairwise
/// compatible chords between its vertices.
pub fn chord_split_case(rng: &mut ChaCha8Rng) -> (Polygon, Vec<Segment>) {
    loop {
        let Some(blob) = random_blob(rng, 9, 0.7) else { continue };
        let poly = enrich_contour(&blob, [1.0, 1.5, 2.5, 4.0][rng.gen_range(0..4)]);
        let verts: Vec<Point> = poly.rings().flatten().copied().collect();
        let wanted = rng.gen_range(1..=6);
        let mut chords: Vec<Segment> = Vec::new();
        for _ in 0..60 {
            if chords.len() == wanted {
                break;
            }
            let (a, b) = (verts[rng.gen_range(0..verts.len())], verts[rng.gen_range(0..verts.len())]);
            if a == b {
                continue;
            }
            let s = Segment::new(a, b);
            if chord_is_valid(&poly, &s) && chords.iter().all(|t| compatible(&s, t)) {
                chords.push(s);
            }
        }
        if !chords.is_empty() {
            return (poly, chords);
        }
    }
}

/// Splits `poly` and checks exact area conservation, the Euler face count and
/// the faces on either side of every chord.
pub fn check_chord_split(poly: &Polygon, chords: &[Segment]) -> Result<(), String> {
    let split = split_by_chords_detailed(poly, chords).map_err(|e| format!("split failed: {e}"))?;
    let total: Rational = split.faces.iter().map(polygon_area).sum();
    if total != polygon_area(poly) {
        return Err(format!("area {total} != {}", polygon_area(poly)));
    }
    let expected = 1 + chord_splits_face(poly, chords).iter().filter(|&&s| s).count();
    if split.faces.len() != expected {
        return Err(format!("{} faces, expected {expected}", split.faces.len()));
    }
    for (i, (left, right)) in split.chord_sides.iter().enumerate() {
        // Added last, a chord splits a face unless it is a bridge.
        let reordered = [&chords[..i], &chords[i + 1..], &chords[i..=i]].concat();
        let bridge = !chord_splits_face(poly, &reordered)[chords.len() - 1];
        if (left == right) != bridge {
            return Err(format!("chord {i} has sides ({left}, {right}), bridge {bridge}"));
        }
    }
    Ok(())
}

/// Labels `g` and checks the partition against a flood fill, the tile counts,
/// orientations, exact areas, hole counts and tile-center containment.
/// Returns the number of holes seen.
pub fn check_labeling(g: &TileGrid) -> Result<usize, String> {
    let (lg, comps) = label_components(g, |t| g.walkable(t));
    if !same_partition(&lg.labels, &flood_fill(g)) {
        return Err("partition differs from flood fill".into());
    }
    if comps.iter().map(|c| c.tile_count).sum::<usize>() != g.walkable_count() {
        return Err("tile counts do not sum to the walkable count".into());
    }
    let zero = Rational::from_integer(0);
    let mut holes = 0;
    for c in &comps {
        if ring_signed_area(&c.outer_contour) <= zero || c.inner_contours.iter().any(|h| ring_signed_area(h) >= zero) {
            return Err(format!("component {} has a misoriented ring", c.id));
        }
        if polygon_area(&c.polygon()) != Rational::from_integer(c.tile_count as i128) {
            return Err(format!("component {} area differs from its tile count", c.id));
        }
        let inside = |x: i32, y: i32| lg.label(Tile::new(x, y)) == c.id;
        if c.inner_contours.len() != bounded_complement_pieces(g.width() as i32, g.height() as i32, inside) {
            return Err(format!("component {} has the wrong number of holes", c.id));
        }
        holes += c.inner_contours.len();
        for t in g.tiles().filter(|&t| lg.label(t) == c.id) {
            let center = Point::tile_center(t.x as i64, t.y as i64);
            if locate_in_ring(center, &c.outer_contour) != Location::Inside
                || c.inner_contours.iter().any(|h| locate_in_ring(center, h) != Location::Outside)
            {
                return Err(format!("tile {t} of component {} is not inside its contours", c.id));
            }
        }
    }
    Ok(holes)
}

/// The 12 x 12 square with a vertex every 2 units along its boundary.
pub fn square12() -> Polygon {
    let corners = Polygon::simple(vec![Point::int(0, 0), Point::int(12, 0), Point::int(12, 12), Point::int(0, 12)]);
    enrich_contour(&corners, 2.0)
}

/// A model on [`square12`] with the given chords and cluster anchors.
pub fn square_model(chords: &[Chord], anchors: &[(i64, i64)], objective: Objective) -> EfopModel {
    let p = |(x, y): (i64, i64)| Point::int(x, y);
    EfopModel {
        zone_id: 1,
        polygon: square12(),
        candidates: chords.iter().enumerate().map(|(i, &(a, b))| Separation::new(i, p(a), p(b))).collect(),
        cluster_ids: (1..=anchors.len() as u32).collect(),
        anchors: anchors.iter().map(|&a| p(a)).collect(),
        n_clusters: anchors.len(),
        required_selected: anchors.len().saturating_sub(1),
        objective,
        constraints: vec![Constraint::NoCrossings, Constraint::MaxOneClusterPerRegion],
    }
}

/// Named chords of [`square12`], in model id order.
pub const SQUARE_CHORDS: [Chord; 8] = [
    ((4, 0), (4, 12)),  // 0: vertical x = 4
    ((8, 0), (8, 12)),  // 1: vertical x = 8
    ((0, 4), (12, 4)),  // 2: horizontal y = 4
    ((0, 0), (12, 12)), // 3: main diagonal
    ((12, 0), (0, 12)), // 4: anti-diagonal
    ((4, 0), (0, 4)),   // 5: cuts the corner at the origin
    ((8, 12), (12, 8)), // 6: cuts the opposite corner
    ((0, 8), (12, 8)),  // 7: horizontal y = 8
];

pub struct ErrorFixture {
    pub name: &'static str,
    pub model: EfopModel,
    pub selected: Vec<usize>,
    pub f_cross: Option<u32>,
    pub f_clust: Option<u32>,
}

/// Hand-computed error values. Regions are counted on the id-ordered
/// non-crossing prefix of the selection.
pub fn error_fixtures() -> Vec<ErrorFixture> {
    let sq = |anchors: &[(i64, i64)]| square_model(&SQUARE_CHORDS, anchors, Objective::MinSeparationLength);
    let free = |segs: &[Chord]| square_model(segs, &[(1, 1)], Objective::MinSeparationLength);
    let fx = |name, model, selected: &[usize], f_cross, f_clust| ErrorFixture {
        name,
        model,
        selected: selected.to_vec(),
        f_cross,
        f_clust,
    };
    vec![
        fx("single separation", sq(&[(2, 6), (10, 6)]), &[0], Some(0), Some(0)),
        fx("two parallel separations", sq(&[(2, 6), (6, 6), (10, 6)]), &[0, 1], Some(0), Some(0)),
        fx("x crossing", sq(&[(6, 2), (6, 10)]), &[3, 4], Some(1), Some(0)),
        fx("shared endpoint", sq(&[(1, 1), (2, 8), (8, 6)]), &[0, 5], Some(0), Some(0)),
        fx("four segments, four crossings", sq(&[(1, 1)]), &[0, 1, 2, 7], Some(4), None),
        fx("three pairwise crossings", sq(&[(1, 1)]), &[2, 3, 4], Some(3), None),
        fx("collinear overlap", free(&[((0, 4), (8, 4)), ((4, 4), (12, 4))]), &[0, 1], Some(1), None),
        fx("collinear, end to end", free(&[((0, 4), (6, 4)), ((6, 4), (12, 4))]), &[0, 1], Some(0), None),
        fx("t junction", free(&[((0, 4), (12, 4)), ((6, 4), (6, 12))]), &[0, 1], Some(0), None),
        fx("region with two clusters", sq(&[(2, 6), (6, 6), (10, 6)]), &[0], Some(0), Some(1)),
        fx("three clusters beside an empty region", sq(&[(6, 2), (6, 6), (6, 10), (10, 6)]), &[0, 1], Some(0), Some(3)),
        fx("two empty regions", sq(&[(10, 2), (10, 10)]), &[0, 1], Some(0), Some(3)),
        fx(
            "regions holding 0, 1, 2, 3 and 1 clusters",
            sq(&[(2, 8), (6, 3), (6, 9), (10, 2), (10, 4), (10, 6), (11, 11)]),
            &[0, 1, 5, 6],
            Some(0),
            Some(3),
        ),
        fx(
            "five single-cluster regions",
            sq(&[(1, 1), (2, 8), (6, 6), (10, 2), (11, 11)]),
            &[0, 1, 5, 6],
            Some(0),
            Some(0),
        ),
        fx("crossing pair, prefix regions", sq(&[(2, 2), (2, 10), (10, 2), (10, 10)]), &[0, 2], Some(1), Some(1)),
        fx("horizontal strips with an empty one", sq(&[(6, 2), (6, 6)]), &[2, 7], Some(0), Some(1)),
        fx("empty corner", sq(&[(6, 6)]), &[5], Some(0), Some(1)),
    ]
}

pub fn check_error_fixture(f: &ErrorFixture) -> Result<(), String> {
    if let Some(want) = f.f_cross {
        let got = eval_f_cross(&f.selected, &f.model);
        if got != want {
            return Err(format!("{}: f_cross {got}, expected {want}", f.name));
        }
    }
    if let Some(want) = f.f_clust {
        let got = eval_f_clust(&f.selected, &f.model);
        if got != want {
            return Err(format!("{}: f_clust {got}, expected {want}", f.name));
        }
    }
    Ok(())
}

/// A 20-candidate, three-cluster model on [`square12`] with a mix of
/// straight, slanted and corner-cutting chords.
pub fn twenty_candidate_model(objective: Objective) -> EfopModel {
    let mut chords = Vec::new();
    for c in [2, 4, 6, 8, 10] {
        chords.push(((c, 0), (c, 12)));
        chords.push(((0, c), (12, c)));
    }
    chords.extend([
        ((2, 0), (6, 12)),
        ((6, 0), (10, 12)),
        ((4, 0), (8, 12)),
        ((0, 2), (12, 6)),
        ((0, 6), (12, 10)),
        ((6, 0), (0, 6)),
        ((12, 6), (6, 12)),
        ((6, 0), (12, 6)),
        ((0, 8), (4, 12)),
        ((0, 10), (10, 0)),
    ]);
    square_model(&chords, &[(3, 5), (11, 3), (5, 11)], objective)
}
