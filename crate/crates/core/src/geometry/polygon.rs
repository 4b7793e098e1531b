use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::point::{Point, Rational};
use super::predicates::{on_segment, orient, segments_intersect, Segment};

/// A polygon with an outer ring (positive shoelace orientation) and holes
/// (negative orientation). Rings are implicitly closed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polygon {
    pub outer: Vec<Point>,
    #[serde(default)]
    pub holes: Vec<Vec<Point>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

impl Polygon {
    pub fn new(outer: Vec<Point>, holes: Vec<Vec<Point>>) -> Self {
        Polygon { outer, holes }
    }

    pub fn simple(outer: Vec<Point>) -> Self {
        Polygon { outer, holes: Vec::new() }
    }

    pub fn rings(&self) -> impl Iterator<Item = &Vec<Point>> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    pub fn vertex_count(&self) -> usize {
        self.rings().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        self.rings().flat_map(|r| ring_edges(r))
    }

    /// Axis-aligned bounds of the outer ring as `(min_x, min_y, max_x, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        ring_bounds(&self.outer)
    }
}

pub fn ring_edges(ring: &[Point]) -> impl Iterator<Item = Segment> + '_ {
    let n = ring.len();
    (0..n).map(move |i| Segment { a: ring[i], b: ring[(i + 1) % n] })
}

pub fn ring_bounds(ring: &[Point]) -> (f64, f64, f64, f64) {
    ring.iter().fold((f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY), |(x0, y0, x1, y1), p| {
        (x0.min(p.xf()), y0.min(p.yf()), x1.max(p.xf()), y1.max(p.yf()))
    })
}

/// Twice the signed shoelace area of `a -> b`.
pub(crate) fn cross_term(a: Point, b: Point) -> Rational {
    let num = a.x as i128 * b.y as i128 - a.y as i128 * b.x as i128;
    Rational::new(num, a.w as i128 * b.w as i128)
}

/// Signed area of a ring, exact. Positive for the outer-ring orientation.
pub fn ring_signed_area(ring: &[Point]) -> Rational {
    if ring.iter().all(Point::is_integral) {
        let n = ring.len();
        let twice: i128 = (0..n)
            .map(|i| {
                let (a, b) = (ring[i], ring[(i + 1) % n]);
                a.x as i128 * b.y as i128 - a.y as i128 * b.x as i128
            })
            .sum();
        return Rational::new(twice, 2);
    }
    let twice = ring_edges(ring).fold(Rational::zero(), |acc, s| acc + cross_term(s.a, s.b));
    twice / Rational::from_integer(2)
}

/// Shoelace area of the outer ring minus the holes.
pub fn polygon_area(poly: &Polygon) -> Rational {
    let mut area = ring_signed_area(&poly.outer).abs();
    for hole in &poly.holes {
        area -= ring_signed_area(hole).abs();
    }
    area
}

/// Even-odd location of `p` relative to a single ring.
pub fn locate_in_ring(p: Point, ring: &[Point]) -> Location {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if on_segment(p, a, b) {
            return Location::Boundary;
        }
        if ray_crosses(p, a, b) {
            inside = !inside;
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Half-open crossing test of the rightward ray from `p` with edge `a -> b`.
/// Counts are consistent across shared vertices, so the parity over any
/// closed walk is the even-odd membership of `p` (when `p` is off the walk).
#[inline]
pub(crate) fn ray_crosses(p: Point, a: Point, b: Point) -> bool {
    let a_above = a.cmp_y(&p) == Ordering::Greater;
    let b_above = b.cmp_y(&p) == Ordering::Greater;
    if a_above == b_above {
        return false;
    }
    let o = orient(a, b, p);
    if b_above {
        o > 0
    } else {
        o < 0
    }
}

pub fn point_in_polygon(p: Point, poly: &Polygon) -> Location {
    match locate_in_ring(p, &poly.outer) {
        Location::Outside => return Location::Outside,
        Location::Boundary => return Location::Boundary,
        Location::Inside => {}
    }
    for hole in &poly.holes {
        match locate_in_ring(p, hole) {
            Location::Inside => return Location::Outside,
            Location::Boundary => return Location::Boundary,
            Location::Outside => {}
        }
    }
    Location::Inside
}

/// A ring is weakly simple when non-adjacent edges never touch, except at a
/// point that is a vertex of both (a pinch). Rings from corner tracing of
/// 8-connected sets pinch at diagonal contacts.
pub fn ring_is_weakly_simple(ring: &[Point]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    let edges: Vec<Segment> = ring_edges(ring).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                if folds_back(&edges[i], &edges[j], j == i + 1) {
                    return false;
                }
                continue;
            }
            if !edges_touch_only_at_common_vertices(&edges[i], &edges[j]) {
                return false;
            }
        }
    }
    true
}

/// Two consecutive edges overlap when the path reverses direction.
fn folds_back(e1: &Segment, e2: &Segment, forward: bool) -> bool {
    let (a, v, b) = if forward { (e1.a, e1.b, e2.b) } else { (e2.a, e2.b, e1.b) };
    orient(a, v, b) == 0 && (on_segment(b, a, v) || on_segment(a, v, b))
}

pub(crate) fn edges_touch_only_at_common_vertices(e1: &Segment, e2: &Segment) -> bool {
    if !segments_intersect(e1, e2) {
        return true;
    }
    // Contact must be a single point that is an endpoint of both.
    let common: Vec<Point> = [e1.a, e1.b].into_iter().filter(|p| *p == e2.a || *p == e2.b).collect();
    if common.len() != 1 {
        return false;
    }
    let c = common[0];
    let f1 = if e1.a == c { e1.b } else { e1.a };
    let f2 = if e2.a == c { e2.b } else { e2.a };
    !(orient(c, f1, f2) == 0 && (on_segment(f1, c, f2) || on_segment(f2, c, f1)))
}

/// Rings are pairwise weakly simple and only meet at shared vertices.
pub fn polygon_is_valid(poly: &Polygon) -> bool {
    let rings: Vec<&Vec<Point>> = poly.rings().collect();
    if !rings.iter().all(|r| ring_is_weakly_simple(r)) {
        return false;
    }
    if !ring_signed_area(&poly.outer).is_positive() || poly.holes.iter().any(|h| !ring_signed_area(h).is_negative()) {
        return false;
    }
    for i in 0..rings.len() {
        for j in (i + 1)..rings.len() {
            for e1 in ring_edges(rings[i]) {
                for e2 in ring_edges(rings[j]) {
                    if !edges_touch_only_at_common_vertices(&e1, &e2) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rect(x0: i64, y0: i64, x1: i64, y1: i64) -> Vec<Point> {
        vec![Point::int(x0, y0), Point::int(x1, y0), Point::int(x1, y1), Point::int(x0, y1)]
    }

    fn hole(x0: i64, y0: i64, x1: i64, y1: i64) -> Vec<Point> {
        let mut r = rect(x0, y0, x1, y1);
        r.reverse();
        r
    }

    #[test]
    fn unit_square_area() {
        assert_eq!(polygon_area(&Polygon::simple(rect(0, 0, 1, 1))), Rational::from_integer(1));
    }

    #[test]
    fn square_with_hole_area() {
        let p = Polygon::new(rect(0, 0, 3, 3), vec![hole(1, 1, 2, 2)]);
        assert_eq!(polygon_area(&p), Rational::from_integer(8));
        assert!(polygon_is_valid(&p));
    }

    #[test]
    fn locations() {
        let sq = Polygon::simple(rect(0, 0, 1, 1));
        assert_eq!(point_in_polygon(Point::new(1, 1, 2), &sq), Location::Inside);
        assert_eq!(point_in_polygon(Point::int(1, 1), &sq), Location::Boundary);
        assert_eq!(point_in_polygon(Point::int(2, 0), &sq), Location::Outside);
        let p = Polygon::new(rect(0, 0, 3, 3), vec![hole(1, 1, 2, 2)]);
        assert_eq!(point_in_polygon(Point::new(3, 3, 2), &p), Location::Outside);
        assert_eq!(point_in_polygon(Point::new(1, 1, 2), &p), Location::Inside);
    }

    #[test]
    fn pinched_ring_is_weakly_simple() {
        // Two unit squares touching at (1, 1).
        let ring = vec![
            Point::int(0, 0),
            Point::int(1, 0),
            Point::int(1, 1),
            Point::int(2, 1),
            Point::int(2, 2),
            Point::int(1, 2),
            Point::int(1, 1),
            Point::int(0, 1),
        ];
        assert!(ring_is_weakly_simple(&ring));
        assert_eq!(ring_signed_area(&ring), Rational::from_integer(2));
    }

    #[test]
    fn bow_tie_is_not_simple() {
        let ring = vec![Point::int(0, 0), Point::int(2, 2), Point::int(2, 0), Point::int(0, 2)];
        assert!(!ring_is_weakly_simple(&ring));
    }
}
