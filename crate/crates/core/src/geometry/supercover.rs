//! Exact supercover traversal: every tile whose closed square meets a segment.

use num_traits::{One, Zero};

use super::point::Rational;
use super::predicates::Segment;
use crate::tile::Tile;

/// Tiles whose closed unit square intersects the closed segment, sorted by
/// column then row. Invariant under endpoint swap.
pub fn closed_supercover_tiles(s: &Segment) -> Vec<Tile> {
    let (ax, ay, bx, by) = (s.a.x(), s.a.y(), s.b.x(), s.b.y());
    let (xmin, xmax) = if ax <= bx { (ax, bx) } else { (bx, ax) };
    let col_lo = to_i32(xmin.ceil().to_integer()) - 1;
    let col_hi = to_i32(xmax.floor().to_integer());
    let mut out = Vec::new();
    for cx in col_lo..=col_hi {
        let c = Rational::from_integer(cx as i128);
        let x0 = if c > xmin { c } else { xmin };
        let c1 = c + Rational::one();
        let x1 = if c1 < xmax { c1 } else { xmax };
        if x0 > x1 {
            continue;
        }
        let (ylo, yhi) = if ax == bx {
            if ay <= by {
                (ay, by)
            } else {
                (by, ay)
            }
        } else {
            let slope = (by - ay) / (bx - ax);
            let y0 = ay + (x0 - ax) * slope;
            let y1 = ay + (x1 - ax) * slope;
            if y0 <= y1 {
                (y0, y1)
            } else {
                (y1, y0)
            }
        };
        let row_lo = to_i32(ylo.ceil().to_integer()) - 1;
        let row_hi = to_i32(yhi.floor().to_integer());
        out.extend((row_lo..=row_hi).map(|cy| Tile::new(cx, cy)));
    }
    out
}

fn to_i32(v: i128) -> i32 {
    i32::try_from(v).expect("tile coordinate out of range")
}

/// Parametric interval `[t0, t1]` of the segment inside the closed square of
/// `tile` (Liang-Barsky clipping, exact), or `None` if they are disjoint.
pub fn clip_to_tile(s: &Segment, tile: Tile) -> Option<(Rational, Rational)> {
    let (ax, ay) = (s.a.x(), s.a.y());
    let (dx, dy) = (s.b.x() - ax, s.b.y() - ay);
    let (x0, y0) = (Rational::from_integer(tile.x as i128), Rational::from_integer(tile.y as i128));
    let (x1, y1) = (x0 + Rational::one(), y0 + Rational::one());
    let mut t0 = Rational::zero();
    let mut t1 = Rational::one();
    for (p, q) in [(-dx, ax - x0), (dx, x1 - ax), (-dy, ay - y0), (dy, y1 - ay)] {
        if p.is_zero() {
            if q < Rational::zero() {
                return None;
            }
        } else {
            let r = q / p;
            if p < Rational::zero() {
                if r > t0 {
                    t0 = r;
                }
            } else if r < t1 {
                t1 = r;
            }
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

/// Supercover of a segment: tiles whose closed square meets the segment
/// somewhere other than at its two endpoints, sorted by column then row.
///
/// Contacts confined to an endpoint are dropped, so a chord anchored on a
/// region boundary does not pick up the tiles it merely starts from; a
/// horizontal run from `(0, 0.5)` to `(3, 0.5)` covers exactly three tiles.
pub fn supercover_tiles(s: &Segment) -> Vec<Tile> {
    closed_supercover_tiles(s)
        .into_iter()
        .filter(|&t| match clip_to_tile(s, t) {
            Some((t0, t1)) => t0 < Rational::one() && t1 > Rational::zero(),
            None => false,
        })
        .collect()
}
