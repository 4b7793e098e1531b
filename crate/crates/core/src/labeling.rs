//! Connected-component labeling by contour tracing.
//!
//! One raster scan traces each component's outer contour when its first tile
//! is met, traces a hole contour whenever an untraced bottom edge faces
//! background, and labels remaining interior tiles from their left neighbour.
//! Foreground is 8-connected, background 4-connected. Contours run along tile
//! corners with the foreground on the right-hand side (y grows downward), so
//! outer rings have positive shoelace area and holes negative.

use crate::geometry::{Point, Polygon};
use crate::map::TileGrid;
use crate::tile::Tile;

/// Per-tile component labels; 0 marks background.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGrid {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<u32>,
    pub component_count: u32,
}

impl LabeledGrid {
    pub fn label(&self, t: Tile) -> u32 {
        if t.x < 0 || t.y < 0 || t.x as u32 >= self.width || t.y as u32 >= self.height {
            return 0;
        }
        self.labels[t.y as usize * self.width as usize + t.x as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub id: u32,
    /// Class value shared by every tile of the component.
    pub class: u32,
    pub outer_contour: Vec<Point>,
    pub inner_contours: Vec<Vec<Point>>,
    pub tile_count: usize,
    /// First tile in raster order.
    pub seed: Tile,
}

impl Component {
    pub fn polygon(&self) -> Polygon {
        Polygon::new(self.outer_contour.clone(), self.inner_contours.clone())
    }
}

/// Labels the 8-connected components of tiles satisfying `predicate`.
pub fn label_components(grid: &TileGrid, predicate: impl Fn(Tile) -> bool) -> (LabeledGrid, Vec<Component>) {
    label_classes(grid.width(), grid.height(), |t| predicate(t).then_some(0))
}

/// Labels 8-connected runs of tiles sharing the same class. Tiles mapped to
/// `None` are background; tiles of a different class count as background for
/// each other's contours.
pub fn label_classes(width: u32, height: u32, class_of: impl Fn(Tile) -> Option<u32>) -> (LabeledGrid, Vec<Component>) {
    let w = width as usize;
    let h = height as usize;
    let classes: Vec<Option<u32>> = (0..w * h).map(|i| class_of(Tile::new((i % w) as i32, (i / w) as i32))).collect();
    let mut tracer =
        Tracer { w: w as i32, h: h as i32, classes, labels: vec![0; w * h], bottom_traced: vec![false; w * h] };
    let mut components: Vec<Component> = Vec::new();

    for y in 0..h as i32 {
        for x in 0..w as i32 {
            let i = y as usize * w + x as usize;
            let Some(c) = tracer.classes[i] else { continue };
            if tracer.labels[i] == 0 {
                if tracer.class(x, y - 1) != Some(c) {
                    let id = components.len() as u32 + 1;
                    let ring = tracer.trace((x, y), Dir::E, c, id);
                    components.push(Component {
                        id,
                        class: c,
                        outer_contour: ring,
                        inner_contours: Vec::new(),
                        tile_count: 0,
                        seed: Tile::new(x, y),
                    });
                } else {
                    // The left edge of an unlabeled interior tile cannot be a
                    // boundary, so the left neighbour is labeled and same-class.
                    tracer.labels[i] = tracer.labels[i - 1];
                }
            }
            if tracer.class(x, y + 1) != Some(c) && !tracer.bottom_traced[i] {
                let id = tracer.labels[i];
                let ring = tracer.trace((x + 1, y + 1), Dir::W, c, id);
                components[id as usize - 1].inner_contours.push(ring);
            }
        }
    }
    for &l in &tracer.labels {
        if l > 0 {
            components[l as usize - 1].tile_count += 1;
        }
    }
    let count = components.len() as u32;
    (LabeledGrid { width, height, labels: tracer.labels, component_count: count }, components)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Dir {
    E,
    S,
    W,
    N,
}

impl Dir {
    fn delta(self) -> (i32, i32) {
        match self {
            Dir::E => (1, 0),
            Dir::S => (0, 1),
            Dir::W => (-1, 0),
            Dir::N => (0, -1),
        }
    }

    fn right(self) -> Dir {
        match self {
            Dir::E => Dir::S,
            Dir::S => Dir::W,
            Dir::W => Dir::N,
            Dir::N => Dir::E,
        }
    }

    fn left(self) -> Dir {
        self.right().right().right()
    }
}

struct Tracer {
    w: i32,
    h: i32,
    classes: Vec<Option<u32>>,
    labels: Vec<u32>,
    bottom_traced: Vec<bool>,
}

impl Tracer {
    fn class(&self, x: i32, y: i32) -> Option<u32> {
        if x < 0 || y < 0 || x >= self.w || y >= self.h {
            None
        } else {
            self.classes[(y * self.w + x) as usize]
        }
    }

    /// Tile touching corner `p` that lies ahead of `d`, on the side `side`.
    fn ahead(p: (i32, i32), d: Dir, side: Dir) -> (i32, i32) {
        let (dx, dy) = d.delta();
        let (sx, sy) = side.delta();
        let off = |s: i32| if s > 0 { 0 } else { -1 };
        (p.0 + off(dx + sx), p.1 + off(dy + sy))
    }

    /// Follows the boundary starting at corner `start` heading `dir`, returns
    /// the turning corners, and labels the foreground tiles along the way.
    fn trace(&mut self, start: (i32, i32), dir: Dir, class: u32, id: u32) -> Vec<Point> {
        let mut corners: Vec<((i32, i32), Dir)> = Vec::new();
        let (mut p, mut d) = (start, dir);
        loop {
            corners.push((p, d));
            // Foreground tile on the right of the edge about to be walked.
            let (fx, fy) = Self::ahead(p, d, d.right());
            debug_assert_eq!(self.class(fx, fy), Some(class));
            let fi = (fy * self.w + fx) as usize;
            self.labels[fi] = id;
            if d == Dir::W {
                self.bottom_traced[fi] = true;
            }
            let (dx, dy) = d.delta();
            p = (p.0 + dx, p.1 + dy);
            let al = Self::ahead(p, d, d.left());
            let ar = Self::ahead(p, d, d.right());
            d = if self.class(al.0, al.1) == Some(class) {
                d.left()
            } else if self.class(ar.0, ar.1) == Some(class) {
                d
            } else {
                d.right()
            };
            if p == start && d == dir {
                break;
            }
        }
        let n = corners.len();
        (0..n)
            .filter(|&i| corners[(i + n - 1) % n].1 != corners[i].1)
            .map(|i| Point::int(corners[i].0 .0 as i64, corners[i].0 .1 as i64))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{polygon_area, ring_signed_area, Rational};
    use crate::map::{load_map, MapFormat};

    fn grid(ascii: &str) -> TileGrid {
        load_map(ascii.as_bytes(), MapFormat::Ascii).unwrap().grid
    }

    fn pts(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::int(x, y)).collect()
    }

    #[test]
    fn full_square() {
        let g = grid("...\n...\n...\n");
        let (lg, comps) = label_components(&g, |t| g.walkable(t));
        assert_eq!(lg.component_count, 1);
        assert_eq!(comps[0].outer_contour, pts(&[(0, 0), (3, 0), (3, 3), (0, 3)]));
        assert!(comps[0].inner_contours.is_empty());
        assert_eq!(comps[0].tile_count, 9);
    }

    #[test]
    fn ring_with_hole() {
        let g = grid(".....\n.....\n..#..\n.....\n.....\n");
        let (_, comps) = label_components(&g, |t| g.walkable(t));
        assert_eq!(comps.len(), 1);
        // Hole traced from the bottom edge of tile (2,1), heading west.
        assert_eq!(comps[0].inner_contours, vec![pts(&[(3, 2), (2, 2), (2, 3), (3, 3)])]);
        assert_eq!(ring_signed_area(&comps[0].inner_contours[0]), Rational::from_integer(-1));
        assert_eq!(polygon_area(&comps[0].polygon()), Rational::from_integer(24));
    }

    #[test]
    fn diagonal_contact_is_connected() {
        let g = grid(".#\n#.\n");
        let (lg, comps) = label_components(&g, |t| g.walkable(t));
        assert_eq!(lg.component_count, 1);
        assert_eq!(comps[0].outer_contour.len(), 8);
        assert_eq!(ring_signed_area(&comps[0].outer_contour), Rational::from_integer(2));
    }

    #[test]
    fn empty_predicate() {
        let g = grid("##\n##\n");
        let (lg, comps) = label_components(&g, |t| g.walkable(t));
        assert_eq!(lg.component_count, 0);
        assert!(comps.is_empty());
    }

    #[test]
    fn classes_split_by_value() {
        let g = grid("..::\n..::\n");
        let (lg, comps) = label_classes(4, 2, |t| Some(g.height_level(t) as u32));
        assert_eq!(lg.component_count, 2);
        assert_eq!(comps[1].class, 1);
        assert_eq!(comps[1].outer_contour, pts(&[(2, 0), (4, 0), (4, 2), (2, 2)]));
    }
}
