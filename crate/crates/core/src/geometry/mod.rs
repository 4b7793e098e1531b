//! Exact planar geometry over rational points.

mod index;
mod point;
mod polygon;
mod predicates;
mod simplify;
mod split;
mod supercover;

use thiserror::Error;

pub use index::{BBox, SpatialIndex};
pub use point::{rational_from_f64, rational_to_f64, Point, Rational, MAX_RECOVERED_DENOMINATOR};
pub(crate) use polygon::ray_crosses;
pub use polygon::{
    locate_in_ring, point_in_polygon, polygon_area, polygon_is_valid, ring_bounds, ring_edges, ring_is_weakly_simple,
    ring_signed_area, Location, Polygon,
};
pub use predicates::{
    meet_only_at_shared_endpoint, on_segment, orient, segments_intersect, segments_properly_cross,
    touches_open_segment, Segment,
};
pub(crate) use simplify::seg_dist;
pub use simplify::{simplify, simplify_polygon};
pub use split::{split_by_chords, split_by_chords_detailed, ChordSplit};
pub use supercover::{clip_to_tile, closed_supercover_tiles, supercover_tiles};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("ring has {0} vertices, need at least 3")]
    DegenerateRing(usize),
    #[error("invalid simplification epsilon {0}")]
    InvalidEpsilon(f64),
    #[error("chord endpoint {0:?} is not on any ring")]
    ChordEndpointOffRing(Point),
    #[error("chord {0} has coincident endpoints")]
    DegenerateChord(usize),
    #[error("chord {0} leaves the polygon or touches its boundary")]
    ChordExitsPolygon(usize),
    #[error("chords {0} and {1} cross")]
    ChordsCross(usize, usize),
    #[error("hole cycle is not enclosed by any face")]
    OrphanHole,
}
