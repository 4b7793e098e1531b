use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::point::Point;

/// A closed segment between two distinct points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        debug_assert!(a != b, "degenerate segment");
        Segment { a, b }
    }

    pub fn midpoint(&self) -> Point {
        Point::midpoint(self.a, self.b)
    }

    pub fn length(&self) -> f64 {
        self.a.dist(&self.b)
    }

    pub fn reversed(&self) -> Segment {
        Segment { a: self.b, b: self.a }
    }
}

/// Sign of the cross product `(b - a) x (c - a)`: positive when `c` lies to the
/// left of the directed line `a -> b`.
pub fn orient(a: Point, b: Point, c: Point) -> i32 {
    let (ax, ay, aw) = (a.x as i128, a.y as i128, a.w as i128);
    let (bx, by, bw) = (b.x as i128, b.y as i128, b.w as i128);
    let (cx, cy, cw) = (c.x as i128, c.y as i128, c.w as i128);
    let det = ax * (by * cw - bw * cy) - ay * (bx * cw - bw * cx) + aw * (bx * cy - by * cx);
    det.signum() as i32
}

/// Whether `p` lies on the closed segment `a-b`.
pub fn on_segment(p: Point, a: Point, b: Point) -> bool {
    orient(a, b, p) == 0 && within_box(p, a, b)
}

fn within_box(p: Point, a: Point, b: Point) -> bool {
    let (xlo, xhi) = if a.cmp_x(&b) == Ordering::Greater { (b, a) } else { (a, b) };
    let (ylo, yhi) = if a.cmp_y(&b) == Ordering::Greater { (b, a) } else { (a, b) };
    p.cmp_x(&xlo) != Ordering::Less
        && p.cmp_x(&xhi) != Ordering::Greater
        && p.cmp_y(&ylo) != Ordering::Less
        && p.cmp_y(&yhi) != Ordering::Greater
}

/// True iff the two segments cross at a single interior point, or overlap
/// collinearly along a stretch of positive length. Touching at an endpoint
/// (including a T-junction) is not a crossing.
pub fn segments_properly_cross(s1: &Segment, s2: &Segment) -> bool {
    let o1 = orient(s1.a, s1.b, s2.a);
    let o2 = orient(s1.a, s1.b, s2.b);
    if o1 == 0 && o2 == 0 {
        return collinear_overlap(s1, s2);
    }
    let o3 = orient(s2.a, s2.b, s1.a);
    let o4 = orient(s2.a, s2.b, s1.b);
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Positive-length overlap of two collinear segments.
fn collinear_overlap(s1: &Segment, s2: &Segment) -> bool {
    let cmp: fn(&Point, &Point) -> Ordering =
        if s1.a.cmp_x(&s1.b) != Ordering::Equal { Point::cmp_x } else { Point::cmp_y };
    let order = |s: &Segment| {
        if cmp(&s.a, &s.b) == Ordering::Greater {
            (s.b, s.a)
        } else {
            (s.a, s.b)
        }
    };
    let (lo1, hi1) = order(s1);
    let (lo2, hi2) = order(s2);
    let lo = if cmp(&lo1, &lo2) == Ordering::Greater { lo1 } else { lo2 };
    let hi = if cmp(&hi1, &hi2) == Ordering::Less { hi1 } else { hi2 };
    cmp(&lo, &hi) == Ordering::Less
}

/// Whether two closed segments share at least one point.
pub fn segments_intersect(s1: &Segment, s2: &Segment) -> bool {
    let o1 = orient(s1.a, s1.b, s2.a);
    let o2 = orient(s1.a, s1.b, s2.b);
    let o3 = orient(s2.a, s2.b, s1.a);
    let o4 = orient(s2.a, s2.b, s1.b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && within_box(s2.a, s1.a, s1.b))
        || (o2 == 0 && within_box(s2.b, s1.a, s1.b))
        || (o3 == 0 && within_box(s1.a, s2.a, s2.b))
        || (o4 == 0 && within_box(s1.b, s2.a, s2.b))
}

/// Whether the two closed segments meet only at an endpoint they share.
pub fn meet_only_at_shared_endpoint(s1: &Segment, s2: &Segment) -> bool {
    let shared = [s1.a, s1.b].into_iter().filter(|p| *p == s2.a || *p == s2.b).count();
    if shared == 0 {
        return !segments_intersect(s1, s2);
    }
    if shared == 2 {
        // identical segments
        return false;
    }
    // One shared endpoint: any further contact means overlap or a fold-back.
    let common = if s1.a == s2.a || s1.a == s2.b { s1.a } else { s1.b };
    let far1 = if s1.a == common { s1.b } else { s1.a };
    let far2 = if s2.a == common { s2.b } else { s2.a };
    if orient(common, far1, far2) != 0 {
        return true;
    }
    // Collinear: they overlap unless they leave the common point in opposite
    // directions.
    !(on_segment(far1, common, far2) || on_segment(far2, common, far1))
}

/// Whether the closed segment `e` touches the open segment `s` (the segment
/// minus its endpoints).
pub fn touches_open_segment(e: &Segment, s: &Segment) -> bool {
    if !segments_intersect(e, s) {
        return false;
    }
    let o1 = orient(s.a, s.b, e.a);
    let o2 = orient(s.a, s.b, e.b);
    if o1 == 0 && o2 == 0 {
        // Collinear contact: it is confined to an endpoint of `s` only when the
        // overlap is a single point equal to `s.a` or `s.b`.
        return collinear_overlap(e, s) || {
            let inner = |p: Point| on_segment(p, s.a, s.b) && p != s.a && p != s.b;
            inner(e.a) || inner(e.b)
        };
    }
    if o1 * o2 < 0 {
        // `e` straddles the line of `s`; the contact point is an endpoint of
        // `s` only when that endpoint lies on `e`.
        let hit_a = on_segment(s.a, e.a, e.b);
        let hit_b = on_segment(s.b, e.a, e.b);
        return !(hit_a || hit_b);
    }
    // One endpoint of `e` lies on the line of `s`.
    let p = if o1 == 0 { e.a } else { e.b };
    on_segment(p, s.a, s.b) && p != s.a && p != s.b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: (i64, i64), b: (i64, i64)) -> Segment {
        Segment::new(Point::int(a.0, a.1), Point::int(b.0, b.1))
    }

    #[test]
    fn x_crossing() {
        assert!(segments_properly_cross(&seg((0, 0), (2, 2)), &seg((0, 2), (2, 0))));
    }

    #[test]
    fn shared_endpoint_is_not_a_crossing() {
        assert!(!segments_properly_cross(&seg((0, 0), (2, 0)), &seg((2, 0), (2, 2))));
    }

    #[test]
    fn collinear_overlap_is_a_crossing() {
        assert!(segments_properly_cross(&seg((0, 0), (4, 0)), &seg((1, 0), (3, 0))));
        assert!(!segments_properly_cross(&seg((0, 0), (2, 0)), &seg((2, 0), (4, 0))));
        assert!(segments_properly_cross(&seg((0, 0), (0, 3)), &seg((0, 2), (0, 5))));
    }

    #[test]
    fn t_junction_is_not_a_crossing() {
        assert!(!segments_properly_cross(&seg((0, 0), (4, 0)), &seg((2, 0), (2, 3))));
        assert!(segments_intersect(&seg((0, 0), (4, 0)), &seg((2, 0), (2, 3))));
    }

    #[test]
    fn open_segment_contact() {
        let s = seg((0, 0), (4, 4));
        assert!(!touches_open_segment(&seg((4, 4), (6, 4)), &s));
        assert!(touches_open_segment(&seg((2, 2), (6, 2)), &s));
        assert!(touches_open_segment(&seg((0, 4), (4, 0)), &s));
        assert!(!touches_open_segment(&seg((-1, 1), (1, -1)), &s));
        assert!(touches_open_segment(&seg((1, 1), (3, 3)), &s));
        assert!(!touches_open_segment(&seg((4, 4), (5, 5)), &s));
        assert!(!touches_open_segment(&seg((5, 5), (6, 6)), &s));
    }

    #[test]
    fn shared_endpoint_contact() {
        assert!(meet_only_at_shared_endpoint(&seg((0, 0), (2, 0)), &seg((2, 0), (2, 2))));
        assert!(meet_only_at_shared_endpoint(&seg((0, 0), (2, 0)), &seg((2, 0), (4, 0))));
        assert!(!meet_only_at_shared_endpoint(&seg((0, 0), (2, 0)), &seg((2, 0), (1, 0))));
        assert!(!meet_only_at_shared_endpoint(&seg((0, 0), (4, 0)), &seg((2, 0), (2, 2))));
    }
}
