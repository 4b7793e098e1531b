//! Ramer-Douglas-Peucker simplification of closed rings.
//!
//! The recursion is anchored at the two mutually farthest vertices, which
//! splits the ring into two open chains. If the result is no longer weakly
//! simple (or collapses), epsilon is halved and the pass repeated.

use num_traits::Zero;

use super::point::Point;
use super::polygon::{polygon_is_valid, ring_is_weakly_simple, ring_signed_area, Polygon};
use super::GeometryError;

const MIN_EPSILON: f64 = 1.0 / 64.0;

pub fn simplify(ring: &[Point], epsilon: f64) -> Result<Vec<Point>, GeometryError> {
    if ring.len() < 3 {
        return Err(GeometryError::DegenerateRing(ring.len()));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(GeometryError::InvalidEpsilon(epsilon));
    }
    let area = ring_signed_area(ring);
    let mut eps = epsilon;
    while eps >= MIN_EPSILON {
        let out = rdp_closed(ring, eps);
        if out.len() >= 3 && ring_is_weakly_simple(&out) && same_sign(&ring_signed_area(&out), &area) {
            return Ok(out);
        }
        eps /= 2.0;
    }
    Ok(ring.to_vec())
}

/// Simplifies every ring of a polygon, retrying with smaller epsilon until the
/// rings are valid together (no ring crosses or touches another).
pub fn simplify_polygon(poly: &Polygon, epsilon: f64) -> Result<Polygon, GeometryError> {
    let mut eps = epsilon;
    loop {
        let outer = simplify(&poly.outer, eps)?;
        let holes = poly.holes.iter().map(|h| simplify(h, eps)).collect::<Result<Vec<_>, _>>()?;
        let candidate = Polygon { outer, holes };
        if eps < MIN_EPSILON || polygon_is_valid(&candidate) {
            return Ok(candidate);
        }
        eps /= 2.0;
        if eps < MIN_EPSILON {
            return Ok(poly.clone());
        }
    }
}

fn same_sign(a: &super::point::Rational, b: &super::point::Rational) -> bool {
    !a.is_zero() && (*a > super::point::Rational::zero()) == (*b > super::point::Rational::zero())
}

fn rdp_closed(ring: &[Point], eps: f64) -> Vec<Point> {
    if eps == 0.0 {
        return ring.to_vec();
    }
    let n = ring.len();
    let pts: Vec<(f64, f64)> = ring.iter().map(|p| (p.xf(), p.yf())).collect();
    let (mut i0, mut i1, mut best) = (0, 1, -1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = sq(pts[i].0 - pts[j].0) + sq(pts[i].1 - pts[j].1);
            if d > best {
                best = d;
                i0 = i;
                i1 = j;
            }
        }
    }
    let mut keep = vec![false; n];
    keep[i0] = true;
    keep[i1] = true;
    // chain i0 -> i1 and i1 -> i0 (wrapping)
    let chain_a: Vec<usize> = (i0..=i1).collect();
    let chain_b: Vec<usize> = (i1..n).chain(0..=i0).collect();
    rdp_chain(&pts, &chain_a, eps, &mut keep);
    rdp_chain(&pts, &chain_b, eps, &mut keep);
    ring.iter().zip(keep).filter_map(|(p, k)| k.then_some(*p)).collect()
}

fn rdp_chain(pts: &[(f64, f64)], chain: &[usize], eps: f64, keep: &mut [bool]) {
    let mut stack = vec![(0usize, chain.len() - 1)];
    while let Some((lo, hi)) = stack.pop() {
        if hi <= lo + 1 {
            continue;
        }
        let (a, b) = (pts[chain[lo]], pts[chain[hi]]);
        let mut far = lo;
        let mut far_d = -1.0;
        for k in (lo + 1)..hi {
            let d = seg_dist(pts[chain[k]], a, b);
            if d > far_d {
                far_d = d;
                far = k;
            }
        }
        if far_d > eps {
            keep[chain[far]] = true;
            stack.push((lo, far));
            stack.push((far, hi));
        }
    }
}

fn sq(v: f64) -> f64 {
    v * v
}

/// Distance from `p` to the closed segment `a-b`.
pub(crate) fn seg_dist(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return (sq(p.0 - a.0) + sq(p.1 - a.1)).sqrt();
    }
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    (sq(p.0 - a.0 - t * dx) + sq(p.1 - a.1 - t * dy)).sqrt()
}
