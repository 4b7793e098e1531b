//! Zones of uniform (height, buildability), resource clusters and zone
//! classification.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::geometry::{simplify_polygon, GeometryError, Point, Polygon};
use crate::labeling::{label_classes, LabeledGrid};
use crate::map::{Resource, TileGrid};
use crate::tile::Tile;

pub const DEFAULT_CLUSTER_THRESHOLD: f64 = 12.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Zone {
    pub id: u32,
    pub parent_component: u32,
    pub height_level: u8,
    pub buildable: bool,
    /// Raster-ordered tiles.
    pub tiles: Vec<Tile>,
    /// Traced contour along tile corners, not simplified.
    pub contour: Polygon,
    pub clusters: Vec<ResourceCluster>,
}

impl Zone {
    pub fn signature(&self) -> (u8, bool) {
        (self.height_level, self.buildable)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceCluster {
    pub id: u32,
    pub zone: u32,
    pub members: Vec<Resource>,
    /// Mean of the member tile centers.
    pub centroid: Point,
    /// Inclusive tile bounds `(min, max)`.
    pub bounding_box: (Tile, Tile),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneClassification {
    NeedsSplit,
    SingleCluster,
    ExceptionIsland,
    ExceptionUnbuildableSurround,
    ExceptionNoCluster,
    /// Unbuildable zones are natural choke areas and never split.
    Unbuildable,
}

/// All zones of a map plus the zone label of every tile.
#[derive(Clone, Debug)]
pub struct Zoning {
    pub zones: Vec<Zone>,
    pub labels: LabeledGrid,
    /// Pairs `(a, b)` with `a < b` of zones sharing a tile edge.
    pub adjacency: BTreeSet<(u32, u32)>,
}

impl Zoning {
    pub fn zone(&self, id: u32) -> &Zone {
        &self.zones[id as usize - 1]
    }

    pub fn zone_of(&self, t: Tile) -> Option<u32> {
        match self.labels.label(t) {
            0 => None,
            z => Some(z),
        }
    }

    pub fn neighbors(&self, id: u32) -> Vec<u32> {
        self.adjacency
            .iter()
            .filter_map(|&(a, b)| {
                if a == id {
                    Some(b)
                } else if b == id {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }
}

fn signature_class(height_level: u8, buildable: bool) -> u32 {
    height_level as u32 * 2 + buildable as u32
}

/// Splits every walkable component into 8-connected zones of uniform
/// signature. Clusters are left empty; see [`cluster_zones`].
pub fn split_into_zones(grid: &TileGrid, components: &LabeledGrid) -> Zoning {
    let (labels, traced) = label_classes(grid.width(), grid.height(), |t| {
        grid.walkable(t).then(|| signature_class(grid.height_level(t), grid.buildable(t)))
    });
    let mut tiles: Vec<Vec<Tile>> = vec![Vec::new(); traced.len()];
    let mut adjacency = BTreeSet::new();
    for t in grid.tiles() {
        let z = labels.label(t);
        if z == 0 {
            continue;
        }
        tiles[z as usize - 1].push(t);
        for n in [Tile::new(t.x + 1, t.y), Tile::new(t.x, t.y + 1)] {
            let o = labels.label(n);
            if o != 0 && o != z {
                adjacency.insert((z.min(o), z.max(o)));
            }
        }
    }
    let zones = traced
        .into_iter()
        .zip(tiles)
        .map(|(c, tiles)| Zone {
            id: c.id,
            parent_component: components.label(c.seed),
            height_level: (c.class / 2) as u8,
            buildable: c.class % 2 == 1,
            contour: c.polygon(),
            tiles,
            clusters: Vec::new(),
        })
        .collect();
    Zoning { zones, labels, adjacency }
}

/// Single-linkage clustering: two resources share a cluster iff a chain of
/// members each within `threshold` tiles connects them. Cluster ids start at
/// `first_id`, in order of each cluster's smallest member position.
pub fn cluster_resources(zone_id: u32, resources: &[Resource], threshold: f64, first_id: u32) -> Vec<ResourceCluster> {
    let mut rs: Vec<Resource> = resources.to_vec();
    rs.sort_by_key(|r| (r.position.y, r.position.x, r.kind));
    let mut parent: Vec<usize> = (0..rs.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let t2 = threshold * threshold;
    for i in 0..rs.len() {
        for j in i + 1..rs.len() {
            let dx = (rs[i].position.x - rs[j].position.x) as f64;
            let dy = (rs[i].position.y - rs[j].position.y) as f64;
            if dx * dx + dy * dy <= t2 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Resource>> = BTreeMap::new();
    for (i, r) in rs.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(*r);
    }
    groups
        .into_values()
        .enumerate()
        .map(|(k, members)| {
            let m = members.len() as i64;
            let sx: i64 = members.iter().map(|r| 2 * r.position.x as i64 + 1).sum();
            let sy: i64 = members.iter().map(|r| 2 * r.position.y as i64 + 1).sum();
            let min = Tile::new(
                members.iter().map(|r| r.position.x).min().unwrap(),
                members.iter().map(|r| r.position.y).min().unwrap(),
            );
            let max = Tile::new(
                members.iter().map(|r| r.position.x).max().unwrap(),
                members.iter().map(|r| r.position.y).max().unwrap(),
            );
            ResourceCluster {
                id: first_id + k as u32,
                zone: zone_id,
                centroid: Point::new(sx, sy, 2 * m),
                members,
                bounding_box: (min, max),
            }
        })
        .collect()
}

/// Clusters the resources of every buildable zone; cluster ids are global and
/// follow zone order. Returns the resources that sit outside any buildable zone.
pub fn cluster_zones(zoning: &mut Zoning, resources: &[Resource], threshold: f64) -> Vec<Resource> {
    let mut per_zone: BTreeMap<u32, Vec<Resource>> = BTreeMap::new();
    let mut stray = Vec::new();
    for r in resources {
        match zoning.zone_of(r.position) {
            Some(z) if zoning.zone(z).buildable => per_zone.entry(z).or_default().push(*r),
            _ => stray.push(*r),
        }
    }
    let mut next = 1;
    for zone in &mut zoning.zones {
        let rs = per_zone.remove(&zone.id).unwrap_or_default();
        zone.clusters = cluster_resources(zone.id, &rs, threshold, next);
        next += zone.clusters.len() as u32;
    }
    stray
}

pub fn classify_zone(zone: &Zone, neighbors: &[&Zone]) -> ZoneClassification {
    if !zone.buildable {
        return ZoneClassification::Unbuildable;
    }
    match zone.clusters.len() {
        0 if neighbors.is_empty() => ZoneClassification::ExceptionIsland,
        0 if neighbors.iter().all(|n| !n.buildable) => ZoneClassification::ExceptionUnbuildableSurround,
        0 => ZoneClassification::ExceptionNoCluster,
        1 => ZoneClassification::SingleCluster,
        _ => ZoneClassification::NeedsSplit,
    }
}

pub fn classify_all(zoning: &Zoning) -> Vec<ZoneClassification> {
    zoning
        .zones
        .iter()
        .map(|z| {
            let ns: Vec<&Zone> = zoning.neighbors(z.id).into_iter().map(|n| zoning.zone(n)).collect();
            classify_zone(z, &ns)
        })
        .collect()
}

/// Simplified contours of every unbuildable zone.
pub fn contour_unbuildable_zones(zones: &[Zone], epsilon: f64) -> Result<Vec<(u32, Polygon)>, GeometryError> {
    zones.iter().filter(|z| !z.buildable).map(|z| Ok((z.id, simplify_polygon(&z.contour, epsilon)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{polygon_area, Rational};
    use crate::labeling::label_components;
    use crate::map::{load_map, MapData, MapFormat, ResourceKind};

    fn zoning(ascii: &str) -> (MapData, Zoning) {
        let m = load_map(ascii.as_bytes(), MapFormat::Ascii).unwrap();
        let (lg, _) = label_components(&m.grid, |t| m.grid.walkable(t));
        let mut z = split_into_zones(&m.grid, &lg);
        cluster_zones(&mut z, &m.resources, DEFAULT_CLUSTER_THRESHOLD);
        (m, z)
    }

    fn mineral(x: i32, y: i32) -> Resource {
        Resource { kind: ResourceKind::Mineral, position: Tile::new(x, y), amount: 1500 }
    }

    #[test]
    fn flat_component_is_one_zone() {
        let (_, z) = zoning("....\n....\n");
        assert_eq!(z.zones.len(), 1);
    }

    #[test]
    fn plateaus_joined_by_unbuildable_strip() {
        let (_, z) = zoning("....,,,,....\n....,,,,....\n....,,,,....\n....,,,,....\n....,,,,....\n");
        assert_eq!(z.zones.len(), 3);
        assert_eq!(z.zones.iter().filter(|z| !z.buildable).count(), 1);
        assert_eq!(z.adjacency.len(), 2);
    }

    #[test]
    fn unbuildable_contours() {
        let (_, z) = zoning("....\n.,,.\n.,,.\n.,,.\n");
        let c = contour_unbuildable_zones(&z.zones, 1.0).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(polygon_area(&c[0].1), Rational::from_integer(6));
        let (_, flat) = zoning("...\n");
        assert!(contour_unbuildable_zones(&flat.zones, 1.0).unwrap().is_empty());
    }

    #[test]
    fn clustering_examples() {
        assert!(cluster_resources(1, &[], 12.0, 1).is_empty());
        let far = [mineral(0, 0), mineral(1, 0), mineral(31, 0), mineral(32, 0)];
        assert_eq!(cluster_resources(1, &far, 12.0, 1).len(), 2);
        let c = cluster_resources(1, &[mineral(0, 0), mineral(2, 1)], 12.0, 5);
        assert_eq!(c[0].id, 5);
        assert_eq!(c[0].centroid, Point::new(3, 2, 2));
    }

    #[test]
    fn classification() {
        let (_, z) = zoning(",,,,,\n,...,\n,,,,,\n");
        let k = classify_all(&z);
        let inner = z.zones.iter().position(|z| z.buildable).unwrap();
        assert_eq!(k[inner], ZoneClassification::ExceptionUnbuildableSurround);

        let (_, z) = zoning("m....#....\n.....#...m\n");
        assert_eq!(classify_all(&z), vec![ZoneClassification::SingleCluster; 2]);
        let (_, z) = zoning("....\n....\n");
        assert_eq!(classify_all(&z), vec![ZoneClassification::ExceptionIsland]);
        let (_, z) = zoning("m..............................m\n");
        assert_eq!(classify_all(&z), vec![ZoneClassification::NeedsSplit]);
    }
}
