use rstar::primitives::{GeomWithData, Rectangle};
use rstar::{RTree, AABB};

/// Axis-aligned box `[min_x, max_x] x [min_y, max_y]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BBox {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        BBox { min_x, min_y, max_x, max_y }
    }

    pub fn of_segment(s: &super::Segment) -> Self {
        let (ax, ay, bx, by) = (s.a.xf(), s.a.yf(), s.b.xf(), s.b.yf());
        BBox::new(ax.min(bx), ay.min(by), ax.max(bx), ay.max(by))
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.min_x <= other.max_x && other.min_x <= self.max_x && self.min_y <= other.max_y && other.min_y <= self.max_y
    }

    /// Grown by a hair so that boxes of exact rational geometry rounded to
    /// `f64` never miss a touching neighbor.
    fn padded(&self) -> AABB<[f64; 2]> {
        const PAD: f64 = 1e-9;
        AABB::from_corners([self.min_x - PAD, self.min_y - PAD], [self.max_x + PAD, self.max_y + PAD])
    }
}

/// Bounding-box index over geometry ids. Queries return every id whose box
/// meets the query box; exact tests are up to the caller.
#[derive(Default)]
pub struct SpatialIndex {
    tree: RTree<GeomWithData<Rectangle<[f64; 2]>, usize>>,
}

impl SpatialIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bulk(items: impl IntoIterator<Item = (usize, BBox)>) -> Self {
        let entries =
            items.into_iter().map(|(id, b)| GeomWithData::new(Rectangle::from_aabb(b.padded()), id)).collect();
        SpatialIndex { tree: RTree::bulk_load(entries) }
    }

    pub fn insert(&mut self, id: usize, bbox: BBox) {
        self.tree.insert(GeomWithData::new(Rectangle::from_aabb(bbox.padded()), id));
    }

    pub fn len(&self) -> usize {
        self.tree.size()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.size() == 0
    }

    /// Ids whose boxes meet `query`, sorted ascending.
    pub fn query(&self, query: &BBox) -> Vec<usize> {
        let mut ids: Vec<usize> = self.tree.locate_in_envelope_intersecting(&query.padded()).map(|g| g.data).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_index() {
        assert!(SpatialIndex::new().query(&BBox::new(0.0, 0.0, 1.0, 1.0)).is_empty());
    }

    #[test]
    fn single_box() {
        let mut idx = SpatialIndex::new();
        idx.insert(7, BBox::new(0.0, 0.0, 1.0, 1.0));
        assert_eq!(idx.query(&BBox::new(0.0, 0.0, 1.0, 1.0)), vec![7]);
        assert_eq!(idx.query(&BBox::new(1.0, 1.0, 2.0, 2.0)), vec![7]);
        assert!(idx.query(&BBox::new(1.5, 1.5, 2.0, 2.0)).is_empty());
    }
}
