//! Candidate separations for a zone and the optimisation model built from them.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    on_segment, point_in_polygon, simplify_polygon, supercover_tiles, touches_open_segment, BBox, GeometryError,
    Location, Point, Polygon, Segment, SpatialIndex,
};
use crate::map::MapData;
use crate::tile::Tile;
use crate::zoning::{ResourceCluster, Zone};

pub const DEFAULT_MAX_EDGE: f64 = 10.0;
pub const DEFAULT_EPSILON: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    #[serde(rename = "min-sep")]
    MinSeparationLength,
    #[serde(rename = "areas")]
    LeastSquaresAreas,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    NoCrossings,
    MaxOneClusterPerRegion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Separation {
    /// Index into the model's candidate list.
    pub id: usize,
    pub a: Point,
    pub b: Point,
    pub length: f64,
    pub covered_tiles: Vec<Tile>,
}

impl Separation {
    pub fn new(id: usize, a: Point, b: Point) -> Self {
        let seg = Segment::new(a, b);
        Separation { id, a, b, length: seg.length(), covered_tiles: supercover_tiles(&seg) }
    }

    pub fn segment(&self) -> Segment {
        Segment::new(self.a, self.b)
    }
}

#[derive(Clone, Debug)]
pub struct EfopModel {
    pub zone_id: u32,
    /// Simplified and enriched zone polygon the candidates live on.
    pub polygon: Polygon,
    pub candidates: Vec<Separation>,
    pub cluster_ids: Vec<u32>,
    /// One interior point per cluster, used to count clusters per region.
    pub anchors: Vec<Point>,
    pub n_clusters: usize,
    pub required_selected: usize,
    pub objective: Objective,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelConfig {
    pub epsilon: f64,
    pub max_edge: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { epsilon: DEFAULT_EPSILON, max_edge: DEFAULT_MAX_EDGE }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("zone {zone}: {survivors} candidate separations survive filtering, {required} needed")]
    ModelTooSmall { zone: u32, survivors: usize, required: usize },
    #[error("zone {zone} has {clusters} clusters, nothing to split")]
    NothingToSplit { zone: u32, clusters: usize },
    #[error("zone {zone}: {source}")]
    Geometry { zone: u32, source: GeometryError },
}

/// Subdivides every edge longer than `max_edge` into equal parts.
pub fn enrich_contour(contour: &Polygon, max_edge: f64) -> Polygon {
    let ring = |r: &Vec<Point>| {
        let mut out = Vec::with_capacity(r.len());
        for i in 0..r.len() {
            let (a, b) = (r[i], r[(i + 1) % r.len()]);
            out.push(a);
            let parts = (a.dist(&b) / max_edge - 1e-9).ceil().max(1.0) as i64;
            for k in 1..parts {
                out.push(Point::lerp(a, b, k, parts));
            }
        }
        out
    };
    Polygon::new(ring(&contour.outer), contour.holes.iter().map(ring).collect())
}

/// Everything `filter_candidate` needs about a zone, precomputed once.
pub struct FilterContext<'a> {
    pub polygon: &'a Polygon,
    pub zone_tiles: HashSet<Tile>,
    pub resource_tiles: HashSet<Tile>,
    pub anchors: Vec<Point>,
    pub map: &'a MapData,
    edges: Vec<Segment>,
    index: SpatialIndex,
    ring_edges: HashSet<(Point, Point)>,
    pinches: HashSet<Point>,
}

impl<'a> FilterContext<'a> {
    pub fn new(polygon: &'a Polygon, zone: &Zone, map: &'a MapData, anchors: Vec<Point>) -> Self {
        let edges: Vec<Segment> = polygon.edges().collect();
        let index = SpatialIndex::bulk(edges.iter().enumerate().map(|(i, e)| (i, BBox::of_segment(e))));
        let ring_edges = edges.iter().map(|e| (e.a.min(e.b), e.a.max(e.b))).collect();
        let mut seen = HashSet::new();
        let pinches = polygon.rings().flatten().filter(|p| !seen.insert(**p)).copied().collect();
        FilterContext {
            polygon,
            zone_tiles: zone.tiles.iter().copied().collect(),
            resource_tiles: map.resources.iter().map(|r| r.position).collect(),
            anchors,
            map,
            edges,
            index,
            ring_edges,
            pinches,
        }
    }
}

/// Whether a candidate is a well-formed separation of the zone.
pub fn filter_candidate(s: &Separation, ctx: &FilterContext) -> bool {
    let (a, b) = (s.a, s.b);
    if a == b || ctx.ring_edges.contains(&(a.min(b), a.max(b))) {
        return false;
    }
    // Chords through a pinch vertex would leave the zone through the pinch.
    if ctx.pinches.contains(&a) || ctx.pinches.contains(&b) {
        return false;
    }
    let seg = s.segment();
    if point_in_polygon(seg.midpoint(), ctx.polygon) != Location::Inside {
        return false;
    }
    if ctx.index.query(&BBox::of_segment(&seg)).into_iter().any(|i| touches_open_segment(&ctx.edges[i], &seg)) {
        return false;
    }
    let grid = &ctx.map.grid;
    let tiles_ok = s.covered_tiles.iter().all(|&t| {
        ctx.zone_tiles.contains(&t) && grid.walkable(t) && grid.buildable(t) && !ctx.resource_tiles.contains(&t)
    });
    tiles_ok && !ctx.anchors.iter().any(|&c| on_segment(c, a, b))
}

/// Every unordered pair of polygon vertices that survives the filter, with ids
/// assigned in sorted endpoint order.
pub fn generate_candidates(enriched: &Polygon, ctx: &FilterContext) -> Vec<Separation> {
    let vertices: Vec<Point> = enriched.rings().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = Vec::new();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            let s = Separation::new(out.len(), vertices[i], vertices[j]);
            if filter_candidate(&s, ctx) {
                out.push(s);
            }
        }
    }
    out
}

/// Interior representative of a cluster: its centroid when strictly inside
/// the polygon, else the nearest member tile center strictly inside.
pub fn cluster_anchor(cluster: &ResourceCluster, polygon: &Polygon) -> Option<Point> {
    if point_in_polygon(cluster.centroid, polygon) == Location::Inside {
        return Some(cluster.centroid);
    }
    cluster
        .members
        .iter()
        .map(|r| Point::tile_center(r.position.x as i64, r.position.y as i64))
        .filter(|&p| point_in_polygon(p, polygon) == Location::Inside)
        .min_by(|p, q| p.dist2(&cluster.centroid).cmp(&q.dist2(&cluster.centroid)).then(p.cmp(q)))
}

/// Simplified zone polygon in which every cluster has an interior anchor.
/// Epsilon is halved until that holds; the unsimplified trace always works.
pub fn zone_polygon(zone: &Zone, epsilon: f64) -> Result<(Polygon, Vec<Point>), GeometryError> {
    let mut eps = epsilon;
    loop {
        let poly = if eps > 0.0 { simplify_polygon(&zone.contour, eps)? } else { zone.contour.clone() };
        let anchors: Option<Vec<Point>> = zone.clusters.iter().map(|c| cluster_anchor(c, &poly)).collect();
        match anchors {
            Some(a) => return Ok((poly, a)),
            None if eps < 1.0 / 64.0 => eps = 0.0,
            None => eps /= 2.0,
        }
    }
}

pub fn build_model(
    zone: &Zone,
    map: &MapData,
    objective: Objective,
    config: ModelConfig,
) -> Result<EfopModel, ModelError> {
    let n = zone.clusters.len();
    if n < 2 {
        return Err(ModelError::NothingToSplit { zone: zone.id, clusters: n });
    }
    let (simplified, anchors) =
        zone_polygon(zone, config.epsilon).map_err(|source| ModelError::Geometry { zone: zone.id, source })?;
    let polygon = enrich_contour(&simplified, config.max_edge);
    let ctx = FilterContext::new(&polygon, zone, map, anchors.clone());
    let candidates = generate_candidates(&polygon, &ctx);
    if candidates.len() < n - 1 {
        return Err(ModelError::ModelTooSmall { zone: zone.id, survivors: candidates.len(), required: n - 1 });
    }
    Ok(EfopModel {
        zone_id: zone.id,
        polygon,
        candidates,
        cluster_ids: zone.clusters.iter().map(|c| c.id).collect(),
        anchors,
        n_clusters: n,
        required_selected: n - 1,
        objective,
        constraints: vec![Constraint::NoCrossings, Constraint::MaxOneClusterPerRegion],
    })
}
