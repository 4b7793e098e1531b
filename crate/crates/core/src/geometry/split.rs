//! Splitting a polygon (with holes) by pairwise non-crossing chords.
//!
//! The rings and chords form a planar graph whose vertices are the ring
//! vertices (coincident points merged) plus any chord endpoints that fall in
//! the middle of a ring edge. Faces are traced with the "next edge clockwise
//! from the twin" rule; cycles with positive area are face boundaries, the
//! negative ones are holes (or chord-linked groups of holes) that get
//! attached to the smallest face enclosing them.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::Zero;

use super::point::{Point, Rational};
use super::polygon::{locate_in_ring, point_in_polygon, ring_signed_area, Location, Polygon};
use super::predicates::{on_segment, orient, segments_properly_cross, touches_open_segment, Segment};
use super::GeometryError;

/// Result of a chord split: the faces and, for every input chord, the faces on
/// its left and right side (as seen from `a` towards `b`).
#[derive(Clone, Debug)]
pub struct ChordSplit {
    pub faces: Vec<Polygon>,
    pub chord_sides: Vec<(usize, usize)>,
}

pub fn split_by_chords(poly: &Polygon, chords: &[Segment]) -> Result<Vec<Polygon>, GeometryError> {
    Ok(split_by_chords_detailed(poly, chords)?.faces)
}

pub fn split_by_chords_detailed(poly: &Polygon, chords: &[Segment]) -> Result<ChordSplit, GeometryError> {
    let rings = insert_chord_endpoints(poly, chords)?;
    validate_chords(poly, &rings, chords)?;

    // One node per ring vertex occurrence, so that a ring pinched at a
    // vertex (or a hole touching another ring at a point) stays connected
    // through that point instead of being cut into separate faces.
    let mut graph = Graph::default();
    let mut occurrences: HashMap<Point, Vec<(usize, usize, usize)>> = HashMap::new();
    for ring in &rings {
        let n = ring.len();
        let first = graph.points.len();
        for (i, &p) in ring.iter().enumerate() {
            let node = graph.node(p);
            occurrences.entry(p).or_default().push((node, first + (i + n - 1) % n, first + (i + 1) % n));
        }
        for i in 0..n {
            graph.add_edge(first + i, first + (i + 1) % n, false);
        }
    }
    let attach = |graph: &Graph, p: Point, towards: Point| -> usize {
        let occ = &occurrences[&p];
        occ.iter()
            .find(|&&(_, prev, next)| in_wedge(p, graph.points[next], graph.points[prev], towards))
            .unwrap_or(&occ[0])
            .0
    };
    let chord_edges: Vec<usize> = chords
        .iter()
        .map(|c| {
            let (a, b) = (attach(&graph, c.a, c.b), attach(&graph, c.b, c.a));
            graph.add_edge(a, b, true)
        })
        .collect();
    graph.sort_rotations();

    let mut face_of = vec![usize::MAX; graph.half_edges.len()];
    let mut cycles: Vec<(Vec<usize>, Rational)> = Vec::new();
    for start in 0..graph.half_edges.len() {
        if !graph.half_edges[start].interior || face_of[start] != usize::MAX {
            continue;
        }
        let mut cycle = Vec::new();
        let mut h = start;
        loop {
            face_of[h] = cycles.len();
            cycle.push(h);
            h = graph.next(h);
            if h == start {
                break;
            }
        }
        let pts: Vec<Point> = cycle.iter().map(|&h| graph.points[graph.half_edges[h].origin]).collect();
        cycles.push((cycle, ring_signed_area(&pts)));
    }

    let positive: Vec<usize> = (0..cycles.len()).filter(|&c| cycles[c].1 > Rational::zero()).collect();
    let mut face_index = vec![usize::MAX; cycles.len()];
    for (f, &c) in positive.iter().enumerate() {
        face_index[c] = f;
    }
    let cycle_points =
        |c: usize| -> Vec<Point> { cycles[c].0.iter().map(|&h| graph.points[graph.half_edges[h].origin]).collect() };
    let mut faces: Vec<Polygon> = positive.iter().map(|&c| Polygon::simple(cycle_points(c))).collect();
    for c in 0..cycles.len() {
        if cycles[c].1 >= Rational::zero() {
            continue;
        }
        let probe = cycles[c].0.iter().copied().find(|&h| !graph.half_edges[h].chord).unwrap_or(cycles[c].0[0]);
        let he = &graph.half_edges[probe];
        let rep = Point::midpoint(graph.points[he.origin], graph.points[he.dest]);
        let host = positive
            .iter()
            .filter(|&&p| locate_in_ring(rep, &faces[face_index[p]].outer) == Location::Inside)
            .min_by(|&&p, &&q| cycles[p].1.cmp(&cycles[q].1))
            .copied()
            .ok_or(GeometryError::OrphanHole)?;
        face_index[c] = face_index[host];
        faces[face_index[host]].holes.push(cycle_points(c));
    }

    let chord_sides = chord_edges.iter().map(|&h| (face_index[face_of[h]], face_index[face_of[h ^ 1]])).collect();
    Ok(ChordSplit { faces, chord_sides })
}

/// Copies the rings, adding every chord endpoint that lies inside a ring edge
/// as a new vertex.
fn insert_chord_endpoints(poly: &Polygon, chords: &[Segment]) -> Result<Vec<Vec<Point>>, GeometryError> {
    let mut rings: Vec<Vec<Point>> = poly.rings().cloned().collect();
    for p in chords.iter().flat_map(|c| [c.a, c.b]) {
        if rings.iter().any(|r| r.contains(&p)) {
            continue;
        }
        let mut placed = false;
        for ring in rings.iter_mut() {
            let n = ring.len();
            if let Some(i) = (0..n).find(|&i| on_segment(p, ring[i], ring[(i + 1) % n])) {
                ring.insert(i + 1, p);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(GeometryError::ChordEndpointOffRing(p));
        }
    }
    Ok(rings)
}

fn validate_chords(poly: &Polygon, rings: &[Vec<Point>], chords: &[Segment]) -> Result<(), GeometryError> {
    for (i, c) in chords.iter().enumerate() {
        if c.a == c.b {
            return Err(GeometryError::DegenerateChord(i));
        }
        for ring in rings {
            let n = ring.len();
            for k in 0..n {
                let e = Segment { a: ring[k], b: ring[(k + 1) % n] };
                if touches_open_segment(&e, c) {
                    return Err(GeometryError::ChordExitsPolygon(i));
                }
            }
        }
        if point_in_polygon(c.midpoint(), poly) != Location::Inside {
            return Err(GeometryError::ChordExitsPolygon(i));
        }
        for (j, d) in chords.iter().enumerate().skip(i + 1) {
            if segments_properly_cross(c, d) {
                return Err(GeometryError::ChordsCross(i, j));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
struct HalfEdge {
    origin: usize,
    dest: usize,
    interior: bool,
    chord: bool,
}

#[derive(Default)]
struct Graph {
    points: Vec<Point>,
    half_edges: Vec<HalfEdge>,
    outgoing: Vec<Vec<usize>>,
    rotation_pos: Vec<usize>,
}

impl Graph {
    fn node(&mut self, p: Point) -> usize {
        self.points.push(p);
        self.outgoing.push(Vec::new());
        self.points.len() - 1
    }

    /// Adds `a -> b` and its twin `b -> a` at indices `h` and `h ^ 1`; returns `h`.
    /// Ring edges are given with the interior on their left; their twins face
    /// outward. Both sides of a chord face inward.
    fn add_edge(&mut self, a: usize, b: usize, chord: bool) -> usize {
        let h = self.half_edges.len();
        self.half_edges.push(HalfEdge { origin: a, dest: b, interior: true, chord });
        self.half_edges.push(HalfEdge { origin: b, dest: a, interior: chord, chord });
        self.outgoing[a].push(h);
        self.outgoing[b].push(h + 1);
        h
    }

    fn sort_rotations(&mut self) {
        self.rotation_pos = vec![0; self.half_edges.len()];
        for v in 0..self.points.len() {
            let o = self.points[v];
            let mut out = std::mem::take(&mut self.outgoing[v]);
            out.sort_by(|&h1, &h2| {
                angle_cmp(o, self.points[self.half_edges[h1].dest], self.points[self.half_edges[h2].dest])
            });
            for (i, &h) in out.iter().enumerate() {
                self.rotation_pos[h] = i;
            }
            self.outgoing[v] = out;
        }
    }

    /// Next half-edge around the face on the left of `h`.
    fn next(&self, h: usize) -> usize {
        let v = self.half_edges[h].dest;
        let twin = h ^ 1;
        let out = &self.outgoing[v];
        let i = self.rotation_pos[twin];
        out[(i + out.len() - 1) % out.len()]
    }
}

/// Whether direction `v -> p` lies strictly inside the interior wedge at ring
/// vertex `v`, swept counterclockwise from `v -> next` to `v -> prev`.
fn in_wedge(v: Point, next: Point, prev: Point, p: Point) -> bool {
    let turn = orient(v, next, prev);
    if turn > 0 {
        orient(v, next, p) > 0 && orient(v, p, prev) > 0
    } else if turn < 0 {
        !(orient(v, prev, p) >= 0 && orient(v, p, next) >= 0)
    } else if angle_cmp(v, next, prev) == Ordering::Equal {
        // Fold back: everything but the edge direction itself.
        !(orient(v, next, p) == 0 && angle_cmp(v, next, p) == Ordering::Equal)
    } else {
        orient(v, next, p) > 0
    }
}

/// Counterclockwise angular order of directions `o -> a` and `o -> b`,
/// starting from the positive x axis.
fn angle_cmp(o: Point, a: Point, b: Point) -> Ordering {
    let half = |p: Point| {
        let dy = p.cmp_y(&o);
        let dx = p.cmp_x(&o);
        if dy == Ordering::Greater || (dy == Ordering::Equal && dx == Ordering::Greater) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| match orient(o, a, b) {
        x if x > 0 => Ordering::Less,
        x if x < 0 => Ordering::Greater,
        _ => Ordering::Equal,
    })
}
